#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pulledfront/error.hpp"
#include "pulledfront/simulate.hpp"

using namespace pf;

namespace {
ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ConfigInvalid;
}
}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("step limits") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  CHECK_NOTHROW(check_step_limits(p, dc, 0.1, 0.05));
  CHECK(kind_of([&] { check_step_limits(p, dc, 0.1, 0.3); }) == ErrorKind::CFLViolated);
  CHECK(kind_of([&] { check_step_limits(p, dc, 2.5, 0.05); }) == ErrorKind::CFLViolated);
  CHECK(kind_of([] { make_state(10.0, 0.3, 0.05); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("the discrete front is stationary") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto prof = simulation_profile(p, dc, 400.0, 0.1);
  auto s = make_state(400.0, 0.1, 0.05);
  s.u = prof.U;
  for (size_t i = 0; i < s.v.size(); ++i) s.v[i] = 1.0 + prof.W[i];
  const Stepper st(p, dc, 400.0, 0.1, 0.05);
  for (int k = 0; k < 400; ++k) st.advance(s);
  double d = 0.0;
  for (size_t i = 0; i < s.u.size(); ++i)
    d = std::max({d, std::abs(s.u[i] - prof.U[i]), std::abs(s.v[i] - 1.0 - prof.W[i])});
  CHECK(d < 1e-10);
  CHECK(s.t == doctest::Approx(20.0));
}

TEST_CASE("NaN is detected") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  auto s = make_state(20.0, 0.1, 0.05);
  s.u[50] = std::nan("");
  CHECK(kind_of([&] { step(s, p, dc); }) == ErrorKind::NaNDetected);
}

TEST_CASE("invariant region under random data") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto s = make_state(10.0, 0.1, 0.05);
  for (size_t i = 1; i + 1 < s.x.size(); ++i) {
    s.u[i] = u01(g);
    s.v[i] = u01(g);
  }
  const Stepper st(p, dc, 10.0, 0.1, 0.05);
  double excess = 0.0;
  for (int k = 0; k < 200; ++k) {
    st.advance(s);
    for (size_t i = 0; i < s.x.size(); ++i)
      excess = std::max({excess, -s.u[i], s.u[i] - 1.0, -s.v[i], s.v[i] - 1.0});
  }
  CHECK(excess <= 1e-12);
}

TEST_CASE("perturbation size and guards") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto prof = simulation_profile(p, dc, 100.0, 0.1);
  DecayConfig cfg;
  cfg.L = 100.0;
  cfg.T = 60.0;
  PerturbationConfig big;
  big.eps = 0.5;
  CHECK(kind_of([&] { run_decay_experiment(p, dc, prof, big, cfg); }) ==
        ErrorKind::PerturbationTooLarge);
  PerturbationConfig zero;
  zero.eps = 0.0;
  CHECK(kind_of([&] { run_decay_experiment(p, dc, prof, zero, cfg); }) == ErrorKind::WindowTooShort);
  DecayConfig short_cfg = cfg;
  short_cfg.T = 20.0;
  CHECK(kind_of([&] { run_decay_experiment(p, dc, prof, PerturbationConfig{}, short_cfg); }) ==
        ErrorKind::WindowTooShort);
  DecayConfig off_grid = cfg;
  off_grid.L = 120.0;
  CHECK(kind_of([&] { run_decay_experiment(p, dc, prof, PerturbationConfig{}, off_grid); }) ==
        ErrorKind::ConfigInvalid);

  // Gaussian bump: sup = eps, weighted L1 close to 2 eps sqrt(pi) (1 + xc)
  std::vector<double> p0(prof.x.size());
  for (size_t i = 0; i < p0.size(); ++i) p0[i] = 0.5 * std::exp(-(prof.x[i] - 8) * (prof.x[i] - 8));
  CHECK(perturbation_size(prof.x, p0, p0) == doctest::Approx(0.5 + 9.0 * std::sqrt(std::numbers::pi)).epsilon(1e-3));
}

TEST_CASE("log-log fit") {
  std::vector<double> t, y;
  for (int k = 0; k < 10; ++k) {
    t.push_back(20.0 * std::pow(1.2, k));
    y.push_back(3.0 * std::pow(t.back(), -1.5));
  }
  const auto f = fit_log_log(t, y);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(f.stderr_slope < 1e-12);
}

TEST_CASE("short decay run: linear and nonlinear agree at small amplitude") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto prof = simulation_profile(p, dc, 200.0, 0.1);
  DecayConfig cfg;
  cfg.L = 200.0;
  cfg.T = 80.0;
  PerturbationConfig pert;
  pert.eps = 1e-3;
  const auto nl = run_decay_experiment(p, dc, prof, pert, cfg);
  cfg.linear = true;
  const auto li = run_decay_experiment(p, dc, prof, pert, cfg);
  CHECK(std::abs(nl.exponent - li.exponent) < 0.01);
  CHECK(nl.exponent < -1.0);
  CHECK(nl.ci_low <= nl.exponent);

  // the weighted linear system gives the same decay
  std::vector<double> p0(prof.x.size()), q0(prof.x.size());
  for (size_t i = 0; i < p0.size(); ++i)
    p0[i] = q0[i] = pert.eps * std::exp(-(prof.x[i] - 8) * (prof.x[i] - 8));
  const auto w = linear_evolution(p, dc, prof, p0, q0, cfg.T, cfg.dt, {10.0});
  CHECK(std::abs(w.exponent - li.exponent) < 0.05);
  REQUIRE(w.snapshot_times.size() == 1);
  CHECK(w.snapshot_times[0] == doctest::Approx(10.0));
}

}
