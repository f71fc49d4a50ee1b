// pulledfront: front, spectrum, evans, green, simulate and verify_all on one config.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pulledfront/error.hpp"
#include "pulledfront/evans.hpp"
#include "pulledfront/front.hpp"
#include "pulledfront/greens.hpp"
#include "pulledfront/io.hpp"
#include "pulledfront/simulate.hpp"
#include "pulledfront/verify.hpp"

namespace fs = std::filesystem;
using namespace pf;

namespace {

constexpr int kExitPass = 0, kExitInternal = 1, kExitConfig = 2, kExitFail = 3, kExitUsage = 64;

struct Flags {
  std::string config;
  std::string out;
  std::string profile;
  std::string lambda;
  bool quiet = false;
};

struct Context {
  RunConfig cfg;
  DerivedConstants dc;
  std::string cfg_hash;
};

bool is_config_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::SchemaVersionUnknown:
    case ErrorKind::ViolatesMonotone:
    case ErrorKind::ViolatesLinear:
    case ErrorKind::NonPositive:
    case ErrorKind::NotNegative:
    case ErrorKind::HashMismatch:
      return true;
    default:
      return false;
  }
}

std::pair<double, double> parse_lambda(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw Error(ErrorKind::ConfigInvalid, "--lambda expects RE,IM");
  return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
}

Context make_context(const Flags& f) {
  Context ctx;
  ctx.cfg = load_config(f.config);
  if (!f.out.empty()) ctx.cfg.out_dir = f.out;
  if (!f.profile.empty()) ctx.cfg.profile_path = f.profile;
  if (!f.lambda.empty()) ctx.cfg.lambda = parse_lambda(f.lambda);
  if (f.quiet) ctx.cfg.quiet = true;
  ctx.dc = make_constants(ctx.cfg.params, ctx.cfg.delta);
  ctx.cfg_hash = config_hash(ctx.cfg);
  fs::create_directories(ctx.cfg.out_dir);
  return ctx;
}

FrontProfile obtain_profile(const Context& ctx) {
  if (!ctx.cfg.profile_path.empty()) {
    auto lp = load_profile(ctx.cfg.profile_path, &ctx.cfg.params);
    for (const auto& w : lp.warnings) fmt::print(stderr, "warning: {}\n", w);
    return lp.profile;
  }
  return solve_front(ctx.cfg.params, ctx.dc, ctx.cfg.front_L, ctx.cfg.front_n, ctx.cfg.front_tol);
}

json report_header(const Context& ctx, const std::string& command, const std::string& prof_hash) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"config_hash", ctx.cfg_hash},
          {"profile_hash", prof_hash},
          {"params", to_json(ctx.cfg.params)},
          {"constants", to_json(ctx.dc)}};
}

int finish(const Context& ctx, json report, bool pass, const std::string& line) {
  report["pass"] = pass;
  const std::string name = report["command"].get<std::string>() + "_report.json";
  write_file((fs::path(ctx.cfg.out_dir) / name).string(), exact_numbers(report).dump(2) + "\n");
  if (!ctx.cfg.quiet) fmt::print("{} {}\n", pass ? "PASS" : "FAIL", line);
  return pass ? kExitPass : kExitFail;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

int cmd_front(const Context& ctx) {
  const auto& p = ctx.cfg.params;
  const auto f = solve_front(p, ctx.dc, ctx.cfg.front_L, ctx.cfg.front_n, ctx.cfg.front_tol);
  const auto relaxed = relax_to_front(p, ctx.dc, ctx.cfg.front_L, ctx.cfg.front_n, ctx.cfg.relax_T);
  double diff = 0.0;
  for (size_t i = 0; i < f.U.size(); ++i)
    diff = std::max({diff, std::abs(f.U[i] - relaxed.U[i]), std::abs(f.W[i] - relaxed.W[i])});
  const auto fit = front_decay_rate_plus(f);
  save_profile(f, (fs::path(ctx.cfg.out_dir) / "profile.json").string());
  const std::string ph = profile_hash(f);
  json rep = report_header(ctx, "front", ph);
  const double g_err = std::abs(fit.gamma_fit - ctx.dc.gamma_star) / ctx.dc.gamma_star;
  const double r_err = std::abs(fit.ratio - fit.ratio_expected) / std::abs(fit.ratio_expected);
  rep["result"] = {{"solver_residual", f.solver_residual},
                   {"boundary_residual", f.boundary_residual},
                   {"truncation_residual", f.truncation_residual},
                   {"iterations", f.iterations},
                   {"beta_plus", f.beta_plus},
                   {"case_minus", to_string(f.case_minus)},
                   {"relaxation_sup_diff", diff},
                   {"gamma_fit", fit.gamma_fit},
                   {"gamma_rel_err", g_err},
                   {"ratio", fit.ratio},
                   {"ratio_expected", fit.ratio_expected}};
  const bool pass = f.solver_residual < 1e-8 && diff <= 1e-4 && g_err <= 0.02 && r_err <= 0.05;
  return finish(ctx, rep, pass,
                fmt::format("front: residual {:.2e}, relaxation diff {:.2e}, gamma_fit {:.5f}",
                            f.solver_residual, diff, fit.gamma_fit));
}

int cmd_spectrum(const Context& ctx) {
  const auto f = obtain_profile(ctx);
  const auto F = build_coefficient_field(f, ctx.dc);
  const auto s = discrete_spectrum_oracle(F, ctx.cfg.spectrum_L, ctx.cfg.spectrum_n);
  json rep = report_header(ctx, "spectrum", profile_hash(f));
  json pts = json::array(), ess = json::array();
  for (cplx l : s.point) pts.push_back(cplx_json(l));
  for (cplx l : s.essential) ess.push_back(cplx_json(l));
  double max_re = s.max_real();
  for (cplx l : s.essential) max_re = std::max(max_re, l.real());
  rep["result"] = {{"L", s.L}, {"n", s.n}, {"point", pts}, {"essential", ess},
                   {"max_real", max_re}};
  return finish(ctx, rep, max_re < 0.0,
                fmt::format("spectrum: {} point, {} essential, max Re {:.3e}", s.point.size(),
                            s.essential.size(), max_re));
}

int cmd_evans(const Context& ctx) {
  const auto f = obtain_profile(ctx);
  const auto F = build_coefficient_field(f, ctx.dc);
  json rep = report_header(ctx, "evans", profile_hash(f));
  if (ctx.cfg.lambda) {
    const cplx lam(ctx.cfg.lambda->first, ctx.cfg.lambda->second);
    const auto sp = SpectralPoint::from_lambda(lam);
    const auto a = evans(F, sp), b = evans(F, sp, EvansMethod::TwoForm);
    const double rel = relative_difference(a, b);
    rep["result"] = {{"lambda", cplx_json(lam)},   {"W", cplx_json(a.W())},
                     {"W_two_form", cplx_json(b.W())}, {"method_rel_diff", rel},
                     {"normalized", a.normalized}};
    return finish(ctx, rep, rel < 1e-6,
                  fmt::format("evans: W({}, {}) = {:.10g} {:+.10g}i, methods agree to {:.2e}",
                              lam.real(), lam.imag(), a.W().real(), a.W().imag(), rel));
  }
  const auto w = winding_number(F, default_contour(ctx.dc));
  const auto z = evans_at_zero(F);
  rep["result"] = {{"winding", w.winding},
                   {"total_phase", w.total_phase},
                   {"samples", w.lambda.size()},
                   {"max_phase_step", w.max_phase_step},
                   {"min_normalized", w.min_normalized},
                   {"W0_direct", cplx_json(z.direct)},
                   {"W0_extrapolated", cplx_json(z.extrapolated)},
                   {"W0_normalized", z.normalized_direct}};
  return finish(ctx, rep, w.winding == 0 && z.normalized_direct > 1e-2,
                fmt::format("evans: winding {}, |W0| normalized {:.3f}", w.winding,
                            z.normalized_direct));
}

int cmd_green(const Context& ctx) {
  const auto f = obtain_profile(ctx);
  const auto F = build_coefficient_field(f, ctx.dc);
  json rep = report_header(ctx, "green", profile_hash(f));
  if (ctx.cfg.lambda) {
    const cplx lam(ctx.cfg.lambda->first, ctx.cfg.lambda->second);
    const auto sp = SpectralPoint::from_lambda(lam);
    const auto gc = green_context(F, sp, -10.0, 10.0);
    json rows = json::array();
    double jump = 0.0;
    for (double y : {-2.0, 0.0, 2.0}) {
      const auto j = jump_identities(gc, y);
      jump = std::max({jump, j.continuity, j.jump11, j.jump22, j.cross});
      for (int x = -10; x <= 10; ++x) {
        const Mat2c G = pointwise_green(gc, x, y);
        rows.push_back({{"x", x}, {"y", y}, {"G11", cplx_json(G(0, 0))}, {"G12", cplx_json(G(0, 1))},
                        {"G21", cplx_json(G(1, 0))}, {"G22", cplx_json(G(1, 1))}});
      }
    }
    rep["result"] = {{"lambda", cplx_json(lam)}, {"max_jump_err", jump}, {"samples", rows}};
    return finish(ctx, rep, jump <= 1e-8,
                  fmt::format("green: {} samples at lambda = ({}, {}), jump err {:.2e}",
                              rows.size(), lam.real(), lam.imag(), jump));
  }
  std::vector<double> xs, ys = {-5, -2, 0, 2, 5};
  for (int x = -20; x <= 20; ++x) xs.push_back(x);
  std::vector<cplx> lams;
  for (double m : {1e-2, 1e-3, 1e-4})
    for (double a : {0.0, std::numbers::pi / 4, -std::numbers::pi / 4}) lams.push_back(std::polar(m, a));
  const auto hs = h_bound_scan(F, lams, xs, ys);
  json lj = json::array();
  for (cplx l : hs.lambda) lj.push_back(cplx_json(l));
  rep["result"] = {{"lambda", lj}, {"sup", hs.sup}, {"variation", hs.variation}};
  return finish(ctx, rep, hs.pass, fmt::format("green: h-scan variation {:.3f}", hs.variation));
}

int cmd_simulate(const Context& ctx) {
  const auto& c = ctx.cfg;
  const auto prof = simulation_profile(c.params, ctx.dc, c.sim_L, c.sim_h);
  PerturbationConfig pert;
  pert.eps = c.sim_eps;
  pert.xc = c.sim_xc;
  DecayConfig dcfg;
  dcfg.L = c.sim_L;
  dcfg.h = c.sim_h;
  dcfg.dt = c.sim_dt;
  dcfg.T = c.sim_T;
  const auto d = run_decay_experiment(c.params, ctx.dc, prof, pert, dcfg);
  std::string csv = "t,theta_p,theta_q\n";
  for (size_t i = 0; i < d.times.size(); ++i)
    csv += fmt::format("{},{},{}\n", format_real(d.times[i]), format_real(d.theta_p[i]),
                       format_real(d.theta_q[i]));
  write_file((fs::path(c.out_dir) / "timeseries.csv").string(), csv);
  json rep = report_header(ctx, "simulate", profile_hash(prof));
  rep["result"] = {{"grid", {{"L", dcfg.L}, {"h", dcfg.h}, {"dt", dcfg.dt}, {"T", dcfg.T}}},
                   {"eps", pert.eps},
                   {"xc", pert.xc},
                   {"N0", d.N0},
                   {"window", {d.window_lo, d.window_hi}},
                   {"exponent", d.exponent},
                   {"ci", {d.ci_low, d.ci_high}},
                   {"exponent_q", d.exponent_q},
                   {"compact_sup_final", d.compact_sup_final}};
  return finish(ctx, rep, std::abs(d.exponent + 1.5) <= 0.15,
                fmt::format("simulate: exponent {:.4f} [{:.4f}, {:.4f}]", d.exponent, d.ci_low,
                            d.ci_high));
}

int cmd_verify_all(const Context& ctx) {
  const bool quiet = ctx.cfg.quiet;
  const auto results = run_acceptance(ctx.cfg, {1, 2, 3, 4, 5, 6, 7, 8, 9},
                                      [quiet](const CriterionResult& r) {
                                        if (!quiet)
                                          fmt::print("{} C{} {}: {}\n", r.pass ? "PASS" : "FAIL",
                                                     r.id, r.name, r.summary);
                                        std::fflush(stdout);
                                      });
  json rep = report_header(ctx, "verify_all", "");
  rep["verdict"] = verdict_json(results);
  return finish(ctx, rep, all_pass(results), "verify_all");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical pulled front of the Lotka-Volterra competition system"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "config file (JSON or key=value)")->required();
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--profile", flags.profile, "front profile JSON to reuse");
    sub->add_option("--lambda", flags.lambda, "single spectral point RE,IM");
    sub->add_flag("--quiet", flags.quiet, "no summary lines");
  };
  using Cmd = int (*)(const Context&);
  const std::pair<const char*, Cmd> cmds[] = {
      {"front", cmd_front}, {"spectrum", cmd_spectrum}, {"evans", cmd_evans},
      {"green", cmd_green}, {"simulate", cmd_simulate}, {"verify_all", cmd_verify_all}};
  std::vector<std::pair<CLI::App*, Cmd>> subs;
  for (const auto& [name, fn] : cmds) {
    auto* sub = app.add_subcommand(name);
    add_common(sub);
    subs.emplace_back(sub, fn);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (!fs::exists(flags.config)) {
    fmt::print(stderr, "usage: config '{}' not found\n", flags.config);
    return kExitUsage;
  }
  try {
    const Context ctx = make_context(flags);
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) return fn(ctx);
    return kExitUsage;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return is_config_error(e.kind()) ? kExitConfig : kExitFail;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
}
