#include "pulledfront/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "pulledfront/error.hpp"
#include "pulledfront/evans.hpp"
#include "pulledfront/front.hpp"
#include "pulledfront/greens.hpp"
#include "pulledfront/odesys.hpp"
#include "pulledfront/simulate.hpp"

namespace pf {

struct VerifySession::Impl {
  ModelParameters p;
  DerivedConstants dc;
  std::optional<FrontProfile> front;
  std::optional<CoefficientField> field;
};

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double sup_diff(const FrontProfile& a, const FrontProfile& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.U.size(); ++i)
    d = std::max({d, std::abs(a.U[i] - b.U[i]), std::abs(a.W[i] - b.W[i])});
  return d;
}

cplx wronskian_at(const CoefficientField& F, const BasisTrack& tp, const BasisTrack& tm,
                  double x) {
  int kp = 0, km = 0;
  const MatZ Zp = track_at(F, tp, x, kp);
  const MatZ Zm = track_at(F, tm, x, km);
  Mat4 M;
  M.leftCols(2) = Zp.leftCols(2);
  M.rightCols(2) = Zm.leftCols(2);
  const cplx ls =
      tp.logscale[kp][0] + tp.logscale[kp][1] + tm.logscale[km][0] + tm.logscale[km][1];
  return M.determinant() * std::exp(ls);
}

double eigen_residual(const Mat4& A, const Vec4& e, cplx k) {
  return (A * e - k * e).norm() / e.norm();
}

}  // namespace

std::vector<NamedParameters> alternate_parameter_sets() {
  // a = 0.2, b = 3 keeps the linear-determinacy condition; mu_u = mu_v at
  // -infinity for r = 0.5 and the v-rate is faster for r = 1
  ModelParameters res{0.2, 3.0, 1.0, 0.5};
  ModelParameters ufast{0.2, 3.0, 1.0, 1.0};
  return {{"Resonant", res}, {"UFaster", ufast}};
}

VerifySession::VerifySession(RunConfig cfg) : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {
  impl_->p = cfg_.params;
  impl_->dc = make_constants(cfg_.params, cfg_.delta);
}

VerifySession::~VerifySession() = default;

const ModelParameters& VerifySession::params() const { return impl_->p; }
const DerivedConstants& VerifySession::constants() const { return impl_->dc; }

namespace {

const FrontProfile& reference_front(VerifySession::Impl& s, const RunConfig& cfg) {
  if (!s.front) s.front = solve_front(s.p, s.dc, cfg.front_L, cfg.front_n, cfg.front_tol);
  return *s.front;
}

const CoefficientField& reference_field(VerifySession::Impl& s, const RunConfig& cfg) {
  if (!s.field) s.field = build_coefficient_field(reference_front(s, cfg), s.dc);
  return *s.field;
}

}  // namespace

CriterionResult VerifySession::front_correctness() {
  CriterionResult r;
  r.id = 1;
  r.name = "front correctness";
  const auto& f = reference_front(*impl_, cfg_);
  const double residual = std::max(f.solver_residual, f.boundary_residual);
  const FrontProfile relaxed =
      relax_to_front(impl_->p, impl_->dc, cfg_.front_L, cfg_.front_n, cfg_.relax_T);
  const double relax_diff = sup_diff(f, relaxed);
  const auto fit = front_decay_rate_plus(f);
  const double g_err = rel_err(fit.gamma_fit, impl_->dc.gamma_star);
  const double ratio_err = rel_err(fit.ratio, fit.ratio_expected);
  bool ok = residual < 1e-8 && relax_diff <= 1e-4 && g_err <= 0.02 && ratio_err <= 0.05;
  r.data = {{"residual", residual},        {"relaxation_sup_diff", relax_diff},
            {"gamma_fit", fit.gamma_fit},  {"gamma_rel_err", g_err},
            {"ratio", fit.ratio},          {"ratio_expected", fit.ratio_expected},
            {"ratio_rel_err", ratio_err},  {"settle_rate", relaxed.settle_rate}};
  std::string alt;
  for (const auto& set : alternate_parameter_sets()) {
    json j;
    try {
      const auto dc = make_constants(set.params);
      const auto fa = solve_front(set.params, dc, cfg_.front_L, cfg_.front_n, cfg_.front_tol);
      const auto fa_fit = front_decay_rate_plus(fa);
      const auto pred = minus_infinity_case(set.params, dc);
      const double res = std::max(fa.solver_residual, fa.boundary_residual);
      const double rerr = rel_err(fa_fit.ratio, fa_fit.ratio_expected);
      const bool set_ok = res < 1e-8 && rerr <= 0.05 && pred.kind == fa.case_minus;
      j = {{"residual", res},
           {"ratio_rel_err", rerr},
           {"gamma_fit", fa_fit.gamma_fit},
           {"case_minus", to_string(fa.case_minus)},
           {"pass", set_ok}};
      ok = ok && set_ok;
      alt += fmt::format(" {}:{}", set.name, set_ok ? "ok" : "bad");
    } catch (const Error& e) {
      j = {{"error", e.what()}, {"pass", false}};
      ok = false;
      alt += fmt::format(" {}:{}", set.name, to_string(e.kind()));
    }
    r.data["alternate"][set.name] = j;
  }
  r.pass = ok;
  r.summary = fmt::format("residual {:.2e}, relax diff {:.2e}, gamma_fit {:.4f}, ratio {:.4f};{}",
                          residual, relax_diff, fit.gamma_fit, fit.ratio, alt);
  return r;
}

CriterionResult VerifySession::eigen_identities() {
  CriterionResult r;
  r.id = 2;
  r.name = "eigen-data identities";
  const auto& p = impl_->p;
  double worst = 0.0;
  int count = 0, skipped = 0;
  auto sweep = [&](const ModelParameters& pp, const DerivedConstants& dc) {
    for (int i = 0; i < 10; ++i) {
      const double mod = std::pow(10.0, -3.0 + 4.0 * i / 9.0);
      for (int j = 0; j < 10; ++j) {
        const double arg = -0.9 * std::numbers::pi + 1.8 * std::numbers::pi * j / 9.0;
        const auto sp = SpectralPoint::from_lambda(std::polar(mod, arg));
        const auto e = asymptotic_eigendata(sp, pp, dc);
        const Mat4 Ap = asymptotic_matrix_plus(sp, pp, dc);
        const Mat4 Am = asymptotic_matrix_minus(sp, pp, dc);
        std::vector<double> res = {eigen_residual(Ap, e.e_u_plus, sp.mu),
                                   eigen_residual(Ap, e.e_u_minus, -sp.mu),
                                   eigen_residual(Ap, e.e_v_plus, e.nu_v_plus),
                                   eigen_residual(Ap, e.e_v_minus, e.nu_v_minus),
                                   eigen_residual(Am, e.eps_u_plus, e.mu_u_plus),
                                   eigen_residual(Am, e.eps_u_minus, e.mu_u_minus)};
        // eps_v does not exist where mu_v coincides with a u-rate (Jordan block)
        for (const auto& [vec, k, xu] : {std::tuple{e.eps_v_plus, e.mu_v_plus, e.x_u_plus},
                                         std::tuple{e.eps_v_minus, e.mu_v_minus, e.x_u_minus}}) {
          if (!std::isfinite(std::abs(xu)) || std::abs(xu) > 1e12) {
            ++skipped;
            continue;
          }
          res.push_back(eigen_residual(Am, vec, k));
        }
        for (double v : res) worst = std::max(worst, std::isfinite(v) ? v : 1.0);
        ++count;
      }
    }
  };
  sweep(p, impl_->dc);
  for (const auto& set : alternate_parameter_sets()) sweep(set.params, make_constants(set.params));
  r.pass = worst < 1e-10;
  r.data = {{"max_residual", worst}, {"points", count}, {"degenerate_skipped", skipped}};
  r.summary = fmt::format("max residual {:.2e} over {} lambda points ({} degenerate vectors skipped)",
                          worst, count, skipped);
  return r;
}

CriterionResult VerifySession::wronskian_laws() {
  CriterionResult r;
  r.id = 3;
  r.name = "Wronskian laws";
  const auto& F = reference_field(*impl_, cfg_);
  double worst = 0.0;
  for (cplx lam : {cplx(0.01, 0.0), cplx(0.1, 0.0), std::polar(1.0, std::numbers::pi / 4)}) {
    const auto sp = SpectralPoint::from_lambda(lam);
    const auto e = asymptotic_eigendata(sp, impl_->p, impl_->dc);
    const auto tp = plus_track(F, sp), tm = minus_track(F, sp);
    const cplx W0 = wronskian_at(F, tp, tm, 0.0);
    const cplx kp = e.nu_v_plus + e.nu_v_minus;
    const cplx km = e.mu_u_plus + e.mu_u_minus + e.mu_v_plus + e.mu_v_minus;
    double lam_worst = 0.0;
    for (int i = 0; i <= 8; ++i) {
      const double x = 1.0 + 0.5 * i;
      lam_worst = std::max(lam_worst, std::abs(wronskian_at(F, tp, tm, x) / W0 / std::exp(kp * x) - 1.0));
      lam_worst = std::max(lam_worst, std::abs(wronskian_at(F, tp, tm, -x) / W0 / std::exp(-km * x) - 1.0));
    }
    r.data["rel_err"].push_back({{"lambda", {lam.real(), lam.imag()}}, {"err", lam_worst}});
    worst = std::max(worst, lam_worst);
  }
  r.pass = worst <= 1e-6;
  r.data["max_rel_err"] = worst;
  r.summary = fmt::format("max relative error {:.2e} on [1,5] and [-5,-1]", worst);
  return r;
}

CriterionResult VerifySession::spectral_certificate() {
  CriterionResult r;
  r.id = 4;
  r.name = "spectral certificate";
  const auto& F = reference_field(*impl_, cfg_);
  const auto w = winding_number(F, default_contour(impl_->dc));
  const auto oracle = discrete_spectrum_oracle(F, cfg_.spectrum_L, cfg_.spectrum_n);
  double point_max_re = -std::numeric_limits<double>::infinity();
  for (cplx l : oracle.point) point_max_re = std::max(point_max_re, l.real());
  double ess_max_re = -std::numeric_limits<double>::infinity();
  for (cplx l : oracle.essential) ess_max_re = std::max(ess_max_re, l.real());
  const bool oracle_clean = point_max_re < 0.0 && ess_max_re < 0.0;
  const auto z = evans_at_zero(F);
  const auto circ = mu_circle_fit(F);
  const double consistency = std::abs(z.extrapolated - z.direct) / std::abs(z.direct);
  const bool w0_ok = z.normalized_direct > 1e-2 && consistency < 0.1;
  r.pass = w.winding == 0 && oracle_clean && w0_ok;
  r.data = {{"winding", w.winding},
            {"contour_samples", w.lambda.size()},
            {"max_phase_step", w.max_phase_step},
            {"min_normalized", w.min_normalized},
            {"oracle_point", oracle.point.size()},
            {"oracle_essential", oracle.essential.size()},
            {"oracle_max_re", std::max(point_max_re, ess_max_re)},
            {"W0_direct", {z.direct.real(), z.direct.imag()}},
            {"W0_extrapolated", {z.extrapolated.real(), z.extrapolated.imag()}},
            {"W0_normalized", z.normalized_direct},
            {"W0_consistency", consistency},
            {"mu_circle_residual", circ.residual}};
  r.summary = fmt::format(
      "winding {}, oracle {} point / {} essential (max Re {:.2e}), |W0| normalized {:.3f}",
      w.winding, oracle.point.size(), oracle.essential.size(), std::max(point_max_re, ess_max_re),
      z.normalized_direct);
  return r;
}

CriterionResult VerifySession::theta_kappa() {
  CriterionResult r;
  r.id = 5;
  r.name = "theta-kappa difference";
  const auto& F = reference_field(*impl_, cfg_);
  std::vector<double> ratios;
  for (double l : {1e-2, 1e-3, 1e-4})
    ratios.push_back(theta_kappa_difference(F, SpectralPoint::from_lambda(l), 0.0, 40.0).sup_ratio);
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double factor = *hi / *lo;
  r.pass = std::isfinite(factor) && factor <= 3.0;
  r.data = {{"ratios", ratios}, {"factor", factor}};
  r.summary = fmt::format("ratios {:.1f} {:.1f} {:.1f}, spread factor {:.2f}", ratios[0],
                          ratios[1], ratios[2], factor);
  return r;
}

CriterionResult VerifySession::green_function() {
  CriterionResult r;
  r.id = 6;
  r.name = "Green's function";
  const auto& F = reference_field(*impl_, cfg_);
  double jump = 0.0;
  for (cplx lam : {cplx(0.05, 0.0), cplx(1.0, 1.0), cplx(-0.01, 0.2)}) {
    const auto ctx = green_context(F, SpectralPoint::from_lambda(lam), -10.0, 10.0);
    for (double y : {-3.0, 0.7, 4.0}) {
      const auto j = jump_identities(ctx, y);
      jump = std::max({jump, j.continuity, j.jump11, j.jump22, j.cross});
    }
  }
  const auto sp = SpectralPoint::from_lambda(0.05);
  const auto ctx = green_context(F, sp, -10.0, 10.0);
  const auto dg = discrete_green_oracle(F, sp, 0.7, cfg_.front_L, 8000);
  double disc = 0.0;
  for (size_t i = 0; i < dg.x.size(); ++i)
    if (std::abs(dg.x[i]) <= 10.0)
      disc = std::max(disc, (dg.G[i] - pointwise_green(ctx, dg.x[i], dg.y)).cwiseAbs().maxCoeff());

  std::vector<double> xs, ys = {-5, -2, 0, 2, 5};
  for (int x = -20; x <= 20; ++x) xs.push_back(x);
  std::vector<cplx> lams;
  for (double m : {1e-2, 1e-3, 1e-4})
    for (double a : {0.0, std::numbers::pi / 4, -std::numbers::pi / 4}) lams.push_back(std::polar(m, a));
  const auto hs = h_bound_scan(F, lams, xs, ys);
  r.pass = jump <= 1e-8 && disc <= 1e-4 && hs.pass;
  r.data = {{"max_jump_err", jump}, {"discrete_diff", disc}, {"h_sup", hs.sup},
            {"h_variation", hs.variation}};
  r.summary = fmt::format("jump err {:.2e}, discrete diff {:.2e}, h-scan variation {:.2f}", jump,
                          disc, hs.variation);
  return r;
}

CriterionResult VerifySession::temporal_kernel() {
  CriterionResult r;
  r.id = 7;
  r.name = "temporal kernel";
  const double heat = scalar_heat_kernel(impl_->p, impl_->dc, 1.0, 2.0);
  const double exact = std::exp(-1.0) / (2.0 * std::sqrt(std::numbers::pi));
  const double heat_err = std::abs(heat - exact);
  const auto& F = reference_field(*impl_, cfg_);
  std::vector<double> ts = {5, 10, 20, 40}, g;
  double imag = 0.0;
  for (double t : ts) {
    const auto tg = temporal_green(F, t, 9.0, 8.0);
    g.push_back(std::abs(tg.value(0, 0)));
    imag = std::max(imag, tg.imag.cwiseAbs().maxCoeff());
  }
  const auto fit = fit_log_log(ts, g);
  r.pass = heat_err <= 1e-6 && std::abs(fit.slope + 1.5) <= 0.15;
  r.data = {{"heat_kernel", heat}, {"heat_exact", exact}, {"heat_err", heat_err},
            {"t", ts},             {"G11", g},            {"slope", fit.slope},
            {"max_imag", imag}};
  r.summary = fmt::format("heat kernel err {:.2e}, G11 slope {:.4f}", heat_err, fit.slope);
  return r;
}

CriterionResult VerifySession::nonlinear_decay() {
  CriterionResult r;
  r.id = 8;
  r.name = "nonlinear decay";
  const auto& p = impl_->p;
  const auto& dc = impl_->dc;
  PerturbationConfig pert;
  pert.eps = cfg_.sim_eps;
  pert.xc = cfg_.sim_xc;
  DecayConfig base;
  base.L = cfg_.sim_L;
  base.h = cfg_.sim_h;
  base.dt = cfg_.sim_dt;
  base.T = cfg_.sim_T;
  auto run = [&](const DecayConfig& c) {
    const auto prof = simulation_profile(p, dc, c.L, c.h);
    return run_decay_experiment(p, dc, prof, pert, c);
  };
  const auto d0 = run(base);
  DecayConfig fine = base;
  fine.h *= 0.5;
  fine.dt *= 0.5;
  const auto d1 = run(fine);
  DecayConfig wide = base;
  wide.L = 1.5 * base.L;
  const auto d2 = run(wide);
  DecayConfig lin = base;
  lin.linear = true;
  const auto d3 = run(lin);
  const double drift_h = std::abs(d1.exponent - d0.exponent);
  const double drift_L = std::abs(d2.exponent - d0.exponent);
  const double lin_diff = std::abs(d3.exponent - d0.exponent);
  r.pass = std::abs(d0.exponent + 1.5) <= 0.15 && drift_h < 0.02 && drift_L < 0.02 &&
           lin_diff <= 0.05;
  r.data = {{"exponent", d0.exponent},       {"ci", {d0.ci_low, d0.ci_high}},
            {"exponent_refined", d1.exponent}, {"exponent_wide", d2.exponent},
            {"exponent_linear", d3.exponent},  {"drift_h", drift_h},
            {"drift_L", drift_L},              {"linear_diff", lin_diff},
            {"N0", d0.N0},                     {"window", {d0.window_lo, d0.window_hi}}};
  r.summary = fmt::format(
      "slope {:.4f} [{:.4f}, {:.4f}], dt/h drift {:.2e}, L drift {:.2e}, linear diff {:.2e}",
      d0.exponent, d0.ci_low, d0.ci_high, drift_h, drift_L, lin_diff);
  return r;
}

CriterionResult VerifySession::invariant_region() {
  CriterionResult r;
  r.id = 9;
  r.name = "invariant region";
  std::mt19937_64 rng(20240521);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double excess = 0.0;
  int runs = 0;
  std::vector<NamedParameters> sets = {{"reference", impl_->p}};
  for (const auto& s : alternate_parameter_sets()) sets.push_back(s);
  for (const auto& set : sets) {
    const auto dc = make_constants(set.params);
    const double dt = std::min(0.05, 0.25 * std::min(1.0, 1.0 / set.params.r));
    const Stepper st(set.params, dc, 20.0, 0.1, dt);
    for (int trial = 0; trial < 4; ++trial) {
      SimState s = make_state(20.0, 0.1, dt);
      for (size_t i = 1; i + 1 < s.x.size(); ++i) {
        s.u[i] = unit(rng);
        s.v[i] = unit(rng);
      }
      s.u.front() = 1.0;
      s.v.back() = 1.0;
      for (int k = 0; k < 1000; ++k) {
        st.advance(s);
        for (size_t i = 0; i < s.x.size(); ++i)
          excess = std::max({excess, -s.u[i], s.u[i] - 1.0, -s.v[i], s.v[i] - 1.0});
      }
      ++runs;
    }
  }
  r.pass = excess <= 1e-12;
  r.data = {{"max_excess", excess}, {"runs", runs}, {"steps", 1000}};
  r.summary = fmt::format("max excursion outside [0,1]^2: {:.2e} over {} runs", excess, runs);
  return r;
}

CriterionResult VerifySession::run(int id) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = front_correctness(); break;
      case 2: r = eigen_identities(); break;
      case 3: r = wronskian_laws(); break;
      case 4: r = spectral_certificate(); break;
      case 5: r = theta_kappa(); break;
      case 6: r = green_function(); break;
      case 7: r = temporal_kernel(); break;
      case 8: r = nonlinear_decay(); break;
      case 9: r = invariant_region(); break;
      default: throw Error(ErrorKind::ConfigInvalid, fmt::format("no criterion {}", id));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid && (id < 1 || id > 9)) throw;
    r.id = id;
    r.name = fmt::format("criterion {}", id);
    r.pass = false;
    r.summary = e.what();
    r.data = {{"error", to_string(e.kind())}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(
    const RunConfig& cfg, const std::vector<int>& ids,
    const std::function<void(const CriterionResult&)>& on_result) {
  VerifySession s(cfg);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(s.run(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

json verdict_json(const std::vector<CriterionResult>& results) {
  static const std::pair<const char*, std::vector<int>> groups[] = {
      {"front", {1}},          {"spectrum", {2, 3}},         {"evans_winding", {4}},
      {"green_bounds", {5, 6}}, {"temporal_slope", {7}},      {"nonlinear_slope", {8, 9}}};
  json v = json::object();
  for (const auto& [key, ids] : groups) {
    bool seen = false, ok = true;
    for (const auto& r : results)
      if (std::find(ids.begin(), ids.end(), r.id) != ids.end()) {
        seen = true;
        ok = ok && r.pass;
      }
    v[key] = seen ? (ok ? "PASS" : "FAIL") : "SKIPPED";
  }
  json details = json::array();
  for (const auto& r : results)
    details.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"summary", r.summary},
                       {"data", r.data}});
  v["criteria"] = details;
  return v;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

}  // namespace pf
