#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pulledfront/error.hpp"
#include "pulledfront/front.hpp"
#include "pulledfront/model.hpp"

using namespace pf;

TEST_SUITE("model") {

TEST_CASE("reference constants") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  CHECK(dc.c_star == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dc.gamma_star == doctest::Approx(0.5).epsilon(1e-15));
  const auto range = admissible_delta_range(dc, p);
  CHECK(range.upper == doctest::Approx(-0.5 + std::sqrt(0.45)).epsilon(1e-14));
  CHECK(dc.delta == doctest::Approx(range.midpoint()));
  CHECK(dc.iota < 0.0);
  CHECK(dc.delta0 == doctest::Approx(0.5 * std::abs(dc.iota)));
  CHECK(dc.alpha == doctest::Approx(0.9 * dc.delta));
  CHECK(dc.complete());
  // at delta = 0.085 the v-border at -infinity sets the margin
  CHECK(iota(p, dc, 0.085) == doctest::Approx(-0.2 + 0.085 + 0.085 * 0.085).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate_parameters(1.5, 2, 1, 0.2), Error);
  try {
    validate_parameters(1.5, 2, 1, 0.2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ViolatesMonotone);
  }
  try {
    validate_parameters(0.75, 2, 1, 5.0);
    FAIL("expected ViolatesLinear");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ViolatesLinear);
  }
  try {
    validate_parameters(0.75, 2, 2.5, 0.2);
    FAIL("expected NonPositive");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositive);
  }
  const ModelParameters p;
  const auto dc = validate_parameters(p);
  try {
    iota(p, dc, 0.5);
    FAIL("expected NotNegative");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotNegative);
  }
}

TEST_CASE("weight function is C2 with the prescribed tails") {
  const WeightFunction w(0.085, 0.5);
  CHECK(w.log_value(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(w.log_value(3.0) == doctest::Approx(-1.5));
  CHECK(w.log_value(-3.0) == doctest::Approx(-0.255));
  for (double x : {-1.0, 1.0}) {
    const double e = 1e-7;
    CHECK(std::abs(w.log_value(x + e) - w.log_value(x - e)) < 1e-6);
    CHECK(std::abs(w.dlog(x + e) - w.dlog(x - e)) < 1e-6);
    CHECK(std::abs(w.d2ratio(x + e) - w.d2ratio(x - e)) < 1e-5);
  }
  // derivative consistency
  for (double x : {-0.7, -0.2, 0.3, 0.9}) {
    const double e = 1e-5;
    const double fd = (w.value(x + e) - w.value(x - e)) / (2 * e);
    CHECK(fd == doctest::Approx(w.derivative(x)).epsilon(1e-8));
  }
}

TEST_CASE("borders and sector") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  CHECK(right_of_borders({1.0, 0.0}, p, dc));
  CHECK(right_of_borders({0.01, 0.5}, p, dc));
  CHECK_FALSE(right_of_borders({-0.5, 0.0}, p, dc));
  CHECK_FALSE(right_of_borders({-1.0, 0.1}, p, dc));
  std::vector<double> ell;
  for (int i = -50; i <= 50; ++i) ell.push_back(0.2 * i);
  const auto borders = fredholm_borders(p, dc, ell);
  // the u-border at +infinity touches the origin; the others stay left of iota
  CHECK(borders[2].max_re == doctest::Approx(0.0).epsilon(1e-12));
  for (int k : {0, 1, 3}) CHECK(borders[k].max_re <= dc.iota + 1e-12);
  CHECK(sector_contains({-dc.delta0 + 0.01, 0.0}, dc.delta0, dc.delta1));
  CHECK_FALSE(sector_contains({-dc.delta0 - 0.01, 0.0}, dc.delta0, dc.delta1));
}

TEST_CASE("asymptotic eigenvectors") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  for (cplx lam : {cplx(0.3, 0.0), cplx(-0.02, 0.4), cplx(5.0, -7.0)}) {
    const auto sp = SpectralPoint::from_lambda(lam);
    const auto e = asymptotic_eigendata(sp, p, dc);
    const Mat4 Ap = asymptotic_matrix_plus(sp, p, dc), Am = asymptotic_matrix_minus(sp, p, dc);
    CHECK((Ap * e.e_u_plus - sp.mu * e.e_u_plus).norm() < 1e-12);
    CHECK((Ap * e.e_v_minus - e.nu_v_minus * e.e_v_minus).norm() < 1e-12);
    CHECK((Am * e.eps_u_plus - e.mu_u_plus * e.eps_u_plus).norm() < 1e-12);
    CHECK((Am * e.eps_v_plus - e.mu_v_plus * e.eps_v_plus).norm() < 1e-12);
  }
  // ordering holds near the origin
  CHECK(asymptotic_eigendata(SpectralPoint::from_lambda(0.01), p, dc).ordering);
}

TEST_CASE("small-lambda radius is positive and finite") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  CHECK(dc.M_s > 0.0);
  CHECK(std::isfinite(dc.M_s));
  CHECK(dc.eta_plus > 0.0);
}

TEST_CASE("behaviour at minus infinity") {
  const ModelParameters ref;
  CHECK(minus_infinity_case(ref, make_constants(ref)).kind == MinusInfinityCase::VFaster);
  const ModelParameters res{0.2, 3.0, 1.0, 0.5};
  CHECK(minus_infinity_case(res, make_constants(res)).kind == MinusInfinityCase::Resonant);
  const ModelParameters uf{0.2, 3.0, 1.0, 1.0};
  CHECK(minus_infinity_case(uf, make_constants(uf)).kind == MinusInfinityCase::UFaster);
}

}
