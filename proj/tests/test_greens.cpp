#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pulledfront/greens.hpp"

using namespace pf;

namespace {
const CoefficientField& field() {
  static const ModelParameters p;
  static const DerivedConstants dc = make_constants(p);
  static const FrontProfile prof = solve_front(p, dc, 80.0, 8000, 1e-10);
  static const CoefficientField F = build_coefficient_field(prof, dc);
  return F;
}
}  // namespace

TEST_SUITE("greens") {

TEST_CASE("jump conditions") {
  const auto& F = field();
  for (cplx lam : {cplx(0.05, 0.0), cplx(1.0, 1.0), cplx(-0.01, 0.2)}) {
    const auto ctx = green_context(F, SpectralPoint::from_lambda(lam), -6.0, 6.0);
    for (double y : {-4.0, 0.3, 5.0}) {
      const auto j = jump_identities(ctx, y);
      CHECK(j.continuity < 1e-8);
      CHECK(j.jump11 < 1e-8);
      CHECK(j.jump22 < 1e-8);
      CHECK(j.cross < 1e-8);
    }
  }
}

TEST_CASE("basis route matches the finite-difference resolvent") {
  const auto& F = field();
  const auto sp = SpectralPoint::from_lambda(0.05);
  const auto ctx = green_context(F, sp, -10.0, 10.0);
  const auto dg = discrete_green_oracle(F, sp, 0.7, 80.0, 8000);
  double worst = 0.0;
  for (size_t i = 0; i < dg.x.size(); ++i)
    if (std::abs(dg.x[i]) <= 10.0)
      worst = std::max(worst, (dg.G[i] - pointwise_green(ctx, dg.x[i], dg.y)).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-4);
}

TEST_CASE("h stays bounded as lambda approaches zero") {
  const auto& F = field();
  std::vector<double> xs, ys = {-3, 0, 3};
  for (int x = -15; x <= 15; x += 3) xs.push_back(x);
  std::vector<cplx> lams = {1e-2, 1e-3, 1e-4, std::polar(1e-4, std::numbers::pi / 4)};
  const auto hs = h_bound_scan(F, lams, xs, ys);
  CHECK(hs.pass);
  CHECK(hs.variation < 10.0);
  // splitting along both phi_1 and psi_1 loses the cancellation
  const auto naive = h_bound_scan(F, {1e-2, 1e-4, 1e-6}, xs, ys, true);
  CHECK(naive.variation > 10.0);
}

TEST_CASE("contour quadrature reproduces the heat kernel") {
  const auto& F = field();
  for (auto [t, d] : {std::pair{1.0, 2.0}, std::pair{4.0, 1.0}}) {
    const double got = scalar_heat_kernel(F.params(), F.constants(), t, d);
    const double exact = std::exp(-d * d / (4 * t)) / std::sqrt(4 * std::numbers::pi * t);
    CHECK(std::abs(got - exact) < 1e-8);
  }
  // |x - y| = 2 at t = 1
  CHECK(scalar_heat_kernel(F.params(), F.constants(), 1.0, 2.0) ==
        doctest::Approx(0.10377687435514868).epsilon(1e-9));
}

TEST_CASE("temporal Green's function is real") {
  const auto& F = field();
  const auto g = temporal_green(F, 20.0, 9.0, 8.0);
  CHECK(g.imag.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(g.value(0, 0) > 0.0);
}

}
