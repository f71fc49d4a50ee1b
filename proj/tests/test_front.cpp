#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pulledfront/error.hpp"
#include "pulledfront/front.hpp"

using namespace pf;

TEST_SUITE("front") {

TEST_CASE("Newton front on the reference set") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto f = solve_front(p, dc, 80.0, 8000, 1e-10);
  CHECK(f.solver_residual < 1e-8);
  CHECK(f.boundary_residual < f.truncation_residual);
  CHECK(f.U[f.center()] == doctest::Approx(0.5));
  CHECK(f.case_minus == MinusInfinityCase::VFaster);
  const auto fit = front_decay_rate_plus(f);
  CHECK(std::abs(fit.gamma_fit - 0.5) / 0.5 < 0.02);
  CHECK(fit.ratio_expected == doctest::Approx(-0.88888888888888884));
  CHECK(std::abs(fit.ratio / fit.ratio_expected - 1.0) < 0.05);
  CHECK_FALSE(fit.log_xi_misfit);
}

TEST_CASE("second-order convergence of the discretization") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto f1 = solve_front(p, dc, 80.0, 4000, 1e-10);
  const auto f2 = solve_front(p, dc, 80.0, 8000, 1e-10);
  const double ratio = f1.truncation_residual / f2.truncation_residual;
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("short domains are flagged") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  try {
    solve_front(p, dc, 10.0, 2000, 1e-10);
    FAIL("expected TruncationDominant");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TruncationDominant);
  }
}

TEST_CASE("relaxation agrees with Newton") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto f = solve_front(p, dc, 60.0, 3000, 1e-10);
  const auto r = relax_to_front(p, dc, 60.0, 3000, 3000.0);
  double d = 0.0;
  for (size_t i = 0; i < f.U.size(); ++i) d = std::max(d, std::abs(f.U[i] - r.U[i]));
  CHECK(d < 1e-4);
}

TEST_CASE("monotone on a wide simulation grid") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto f = solve_front(p, dc, 400.0, 8000, 1e-10);
  CHECK_NOTHROW(check_monotone(f));
  CHECK(f.U.front() > 1.0 - 1e-12);
  CHECK(f.W.back() > -1e-12);
}

TEST_CASE("the other behaviours at minus infinity") {
  for (auto [p, kind] : {std::pair{ModelParameters{0.2, 3.0, 1.0, 0.5}, MinusInfinityCase::Resonant},
                         std::pair{ModelParameters{0.2, 3.0, 1.0, 1.0}, MinusInfinityCase::UFaster}}) {
    const auto dc = make_constants(p);
    const auto f = solve_front(p, dc, 80.0, 8000, 1e-10);
    CHECK(f.case_minus == kind);
    const auto fit = front_decay_rate_plus(f);
    CHECK(std::abs(fit.ratio / fit.ratio_expected - 1.0) < 0.05);
  }
}

}
