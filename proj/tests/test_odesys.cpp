#include <doctest.h>

#include <cmath>
#include <random>

#include "pulledfront/evans.hpp"
#include "pulledfront/odesys.hpp"

using namespace pf;

namespace {
const CoefficientField& field() {
  static const ModelParameters p;
  static const DerivedConstants dc = make_constants(p);
  static const FrontProfile prof = solve_front(p, dc, 80.0, 8000, 1e-10);
  static const CoefficientField F = build_coefficient_field(prof, dc);
  return F;
}

Vec4 random_vec(std::mt19937& g) {
  std::normal_distribution<double> n;
  Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = cplx(n(g), n(g));
  return v;
}
}  // namespace

TEST_SUITE("odesys") {

TEST_CASE("remainder decay beats alpha") {
  const auto& F = field();
  const auto& dc = F.constants();
  CHECK(F.X_plus > 0.0);
  CHECK(F.X_minus < 0.0);
  CHECK(F.alpha_meas_plus > dc.alpha);
  CHECK(F.alpha_meas_minus > dc.alpha);
  CHECK(F.B_plus_at_X < 1e-6);
  CHECK(F.B_minus_at_X < 1e-4);
}

TEST_CASE("exterior algebra identities") {
  std::mt19937 g(7);
  const Vec4 u1 = random_vec(g), u2 = random_vec(g), v1 = random_vec(g), v2 = random_vec(g);
  Mat4 M;
  M << u1, u2, v1, v2;
  CHECK(std::abs(wedge_pair(wedge(u1, u2), wedge(v1, v2)) - M.determinant()) <
        1e-12 * std::abs(M.determinant()));
  Mat4 A;
  for (int j = 0; j < 4; ++j) A.col(j) = random_vec(g);
  const Vec6 lhs = compound(A) * wedge(u1, u2);
  const Vec6 rhs = wedge(A * u1, u2) + wedge(u1, A * u2);
  CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
}

TEST_CASE("Abel's law for the Wronskian") {
  const auto& F = field();
  const auto& dc = F.constants();
  const double s = F.params().sigma;
  for (cplx lam : {cplx(0.1, 0.0), cplx(0.5, 1.0), cplx(3.0, 10.0)}) {
    const auto sp = SpectralPoint::from_lambda(lam);
    const auto tp = plus_track(F, sp), tm = minus_track(F, sp);
    const cplx W0 = wronskian(tp, tm, tp.exact_node(0.0), tm.exact_node(0.0));
    for (double x : {-5.0, 5.0}) {
      const cplx Wx = wronskian(tp, tm, tp.exact_node(x), tm.exact_node(x));
      const double trace_int = -dc.c_star * (1.0 + 1.0 / s) * x - 2.0 * (1.0 + s) * F.weight().log_value(x);
      CHECK(std::abs(Wx / W0 / std::exp(trace_int) - 1.0) < 1e-7);
    }
  }
}

TEST_CASE("direct basis and 2-form routes agree") {
  const auto& F = field();
  for (cplx lam : {cplx(1.0, 0.0), cplx(0.05, 0.3), cplx(-0.02, 0.5)}) {
    const auto sp = SpectralPoint::from_lambda(lam);
    const auto a = evans(F, sp), b = evans(F, sp, EvansMethod::TwoForm);
    CHECK(relative_difference(a, b) < 1e-7);
  }
}

TEST_CASE("frozen field reproduces the asymptotic eigenvectors") {
  const auto& F = field();
  const auto Fz = CoefficientField::frozen(F.params(), F.constants());
  const auto sp = SpectralPoint::from_lambda(0.2);
  const auto e = asymptotic_eigendata(sp, F.params(), F.constants());
  const auto bp = bounded_basis_plus(Fz, sp);
  const auto bm = bounded_basis_minus(Fz, sp);
  CHECK((bp.phi1_plus - e.e_u_minus).norm() < 1e-10);
  CHECK((bm.phi1_minus - e.eps_u_plus).norm() < 1e-10);
  // phi_2^- is re-based, so compare the planes instead of the vectors
  const Vec6 plane = wedge(bm.phi1_minus, bm.phi2_minus);
  const Vec6 ref = wedge(e.eps_u_plus, regular_eps_v(e, F.params()));
  const cplx k = plane.dot(ref) / ref.squaredNorm();
  CHECK((plane - k * ref).norm() < 1e-9 * plane.norm());
}

TEST_CASE("bounded solutions approach their limits at rate alpha") {
  const auto& F = field();
  const auto sp = SpectralPoint::from_lambda(0.05);
  const auto bp = bounded_basis_plus(F, sp);
  const auto bm = bounded_basis_minus(F, sp);
  for (double v : {bp.theta1_plus, bp.theta2_plus, bp.kappa1_plus, bm.theta1_minus, bm.theta2_minus}) {
    CHECK(std::isfinite(v));
    CHECK(v < 1e3);
  }
  CHECK(bp.independence_plus > 1e-8);
}

TEST_CASE("theta-kappa difference scales with sqrt(lambda)") {
  const auto& F = field();
  const auto d2 = theta_kappa_difference(F, SpectralPoint::from_lambda(1e-2), 0.0, 40.0);
  const auto d4 = theta_kappa_difference(F, SpectralPoint::from_lambda(1e-4), 0.0, 40.0);
  CHECK(d2.sup_ratio > 0.0);
  CHECK(d2.sup_ratio / d4.sup_ratio < 3.0);
  CHECK(d4.sup_ratio / d2.sup_ratio < 3.0);
}

}
