#include "pulledfront/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pulledfront/error.hpp"
#include "tridiag.hpp"

namespace pf {

namespace {

int node_count(double L, double h) {
  if (!(L > 0.0) || !(h > 0.0)) throw Error(ErrorKind::ConfigInvalid, "need L > 0 and h > 0");
  const double n = 2.0 * L / h;
  const long k = std::lround(n);
  if (std::abs(n - k) > 1e-9 * n || k < 4)
    throw Error(ErrorKind::ConfigInvalid, fmt::format("2L/h = {} is not an integer >= 4", n));
  if (k % 2) throw Error(ErrorKind::ConfigInvalid, "2L/h must be even so that x = 0 is a node");
  return static_cast<int>(k);
}

// I - dt (D d_xx + a(x) d_x) on interior nodes; a sampled per node.
detail::Tridiagonal implicit_matrix(double D, const std::vector<double>& adv, double h, double dt) {
  const int m = static_cast<int>(adv.size());
  std::vector<double> lo(m - 1), di(m), up(m - 1);
  for (int i = 0; i < m; ++i) {
    di[i] = 1.0 + 2.0 * dt * D / (h * h);
    if (i > 0) lo[i - 1] = -dt * (D / (h * h) - adv[i] / (2.0 * h));
    if (i + 1 < m) up[i] = -dt * (D / (h * h) + adv[i] / (2.0 * h));
  }
  return detail::Tridiagonal(std::move(lo), std::move(di), std::move(up));
}

void check_grid(const FrontProfile& prof, double L, int n) {
  if (prof.n != n || std::abs(prof.L - L) > 1e-12 * L)
    throw Error(ErrorKind::ConfigInvalid,
                fmt::format("profile grid (L={}, n={}) does not match simulation grid (L={}, n={})",
                            prof.L, prof.n, L, n));
}

bool all_finite(const std::vector<double>& a) {
  return std::all_of(a.begin(), a.end(), [](double z) { return std::isfinite(z); });
}

std::vector<double> fit_targets(double lo, double hi, int samples) {
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k)
    t[k] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (samples - 1));
  return t;
}

double theta_of(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s = std::max(s, std::abs(f[i]) / (1.0 + std::abs(x[i])));
  return s;
}

}  // namespace

SimState make_state(double L, double h, double dt) {
  const int n = node_count(L, h);
  SimState s;
  s.L = L;
  s.h = 2.0 * L / n;
  s.dt = dt;
  s.x.resize(n + 1);
  for (int i = 0; i <= n; ++i) s.x[i] = -L + i * s.h;
  s.u.assign(n + 1, 0.0);
  s.v.assign(n + 1, 0.0);
  return s;
}

void check_step_limits(const ModelParameters& p, const DerivedConstants& dc, double h,
                       double dt) {
  const double dt_max = 0.25 * std::min(1.0, 1.0 / p.r);
  if (!(dt > 0.0) || dt > dt_max)
    throw Error(ErrorKind::CFLViolated, fmt::format("dt = {} exceeds {}", dt, dt_max));
  const double h_max = 2.0 * std::min(1.0, p.sigma) / dc.c_star;
  if (!(h > 0.0) || h > h_max)
    throw Error(ErrorKind::CFLViolated, fmt::format("h = {} exceeds {}", h, h_max));
}

Stepper::Stepper(const ModelParameters& p, const DerivedConstants& dc, double L, double h,
                 double dt)
    : p_(p), dc_(dc), dt_(dt) {
  const int n = node_count(L, h);
  const double hh = 2.0 * L / n;
  check_step_limits(p, dc, hh, dt);
  std::vector<double> adv(n - 1, dc.c_star);
  impl_u_ = std::make_unique<detail::Tridiagonal>(implicit_matrix(1.0, adv, hh, dt));
  impl_v_ = std::make_unique<detail::Tridiagonal>(implicit_matrix(p.sigma, adv, hh, dt));
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;

void Stepper::advance(SimState& s) const {
  const int n = static_cast<int>(s.x.size()) - 1;
  if (impl_u_->size() != n - 1) throw Error(ErrorKind::ConfigInvalid, "state/stepper grid mismatch");
  if (!all_finite(s.u) || !all_finite(s.v))
    throw Error(ErrorKind::NaNDetected, fmt::format("non-finite state at t = {}", s.t));
  const double h = s.h, dt = dt_, c = dc_.c_star, sg = p_.sigma;
  std::vector<double> ru(n - 1), rv(n - 1);
  for (int i = 1; i < n; ++i) {
    const double u = s.u[i], v = s.v[i];
    ru[i - 1] = u + dt * u * (1.0 - u - p_.a * v);
    rv[i - 1] = v + dt * p_.r * v * (1.0 - p_.b * u - v);
  }
  // Dirichlet data (1, 0) at -L, (0, 1) at +L
  ru.front() += dt * (1.0 / (h * h) - c / (2.0 * h)) * 1.0;
  rv.back() += dt * (sg / (h * h) + c / (2.0 * h)) * 1.0;
  impl_u_->solve_in_place(ru);
  impl_v_->solve_in_place(rv);
  s.u.front() = 1.0;
  s.v.front() = 0.0;
  s.u.back() = 0.0;
  s.v.back() = 1.0;
  std::copy(ru.begin(), ru.end(), s.u.begin() + 1);
  std::copy(rv.begin(), rv.end(), s.v.begin() + 1);
  if (!all_finite(ru) || !all_finite(rv))
    throw Error(ErrorKind::NaNDetected, fmt::format("non-finite state at t = {}", s.t + dt));
  s.t += dt;
  s.dt = dt;
}

SimState step(const SimState& s, const ModelParameters& p, const DerivedConstants& dc) {
  Stepper st(p, dc, s.L, s.h, s.dt);
  SimState out = s;
  st.advance(out);
  return out;
}

WeightedPerturbation weighted_perturbation(const SimState& s, const FrontProfile& profile,
                                           const WeightFunction& w) {
  check_grid(profile, s.L, static_cast<int>(s.x.size()) - 1);
  WeightedPerturbation out;
  const size_t N = s.x.size();
  out.p.resize(N);
  out.q.resize(N);
  for (size_t i = 0; i < N; ++i) {
    const double om = w.value(s.x[i]);
    out.p[i] = (s.u[i] - profile.U[i]) / om;
    out.q[i] = ((s.v[i] - 1.0) - profile.W[i]) / om;
  }
  out.theta_p = theta_of(s.x, out.p);
  out.theta_q = theta_of(s.x, out.q);
  return out;
}

FrontProfile simulation_profile(const ModelParameters& p, const DerivedConstants& dc, double L,
                                double h) {
  return solve_front(p, dc, L, node_count(L, h), 1e-10);
}

double perturbation_size(const std::vector<double>& x, const std::vector<double>& p0,
                         const std::vector<double>& q0) {
  double sup = 0.0, l1 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sup = std::max({sup, std::abs(p0[i]), std::abs(q0[i])});
    if (i + 1 < x.size()) {
      const double h = x[i + 1] - x[i];
      auto g = [&](size_t j) { return (1.0 + std::abs(x[j])) * (std::abs(p0[j]) + std::abs(q0[j])); };
      l1 += 0.5 * h * (g(i) + g(i + 1));
    }
  }
  return sup + l1;
}

SlopeFit fit_log_log(const std::vector<double>& t, const std::vector<double>& y) {
  const size_t n = t.size();
  if (n < 3 || y.size() != n) throw Error(ErrorKind::WindowTooShort, "fewer than 3 samples to fit");
  double mx = 0, my = 0;
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(t[i] > 0.0) || !(y[i] > 0.0))
      throw Error(ErrorKind::WindowTooShort, "non-positive sample in fit window");
    lx[i] = std::log(t[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::WindowTooShort, "degenerate fit window");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (size_t i = 0; i < n; ++i) {
    const double e = ly[i] - f.intercept - f.slope * lx[i];
    rss += e * e;
  }
  f.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
  return f;
}

DecayDiagnostics run_decay_experiment(const ModelParameters& p, const DerivedConstants& dc,
                                      const FrontProfile& profile, const PerturbationConfig& pert,
                                      const DecayConfig& cfg) {
  const int n = node_count(cfg.L, cfg.h);
  check_grid(profile, cfg.L, n);
  const double h = 2.0 * cfg.L / n, dt = cfg.dt;
  check_step_limits(p, dc, h, dt);
  const double t_lo = cfg.fit_lo, t_hi = cfg.fit_hi_fraction * cfg.T;
  if (!(t_hi > t_lo) || cfg.samples < 3)
    throw Error(ErrorKind::WindowTooShort,
                fmt::format("fit window [{}, {}] is empty", t_lo, t_hi));
  if (!(pert.eps > 0.0))
    throw Error(ErrorKind::WindowTooShort, "zero perturbation carries no decay to fit");

  const WeightFunction w(dc.delta, dc.gamma_star);
  const auto& x = profile.x;
  const int N = n + 1;
  std::vector<double> om(N), p0(N), q0(N);
  for (int i = 0; i < N; ++i) {
    om[i] = w.value(x[i]);
    p0[i] = pert.eps * std::exp(-(x[i] - pert.xc) * (x[i] - pert.xc));
    q0[i] = p0[i];
  }
  p0.front() = p0.back() = q0.front() = q0.back() = 0.0;

  DecayDiagnostics out;
  out.N0 = perturbation_size(x, p0, q0);
  out.window_lo = t_lo;
  out.window_hi = t_hi;
  if (out.N0 > cfg.N0_limit)
    throw Error(ErrorKind::PerturbationTooLarge,
                fmt::format("N0 = {} exceeds {}", out.N0, cfg.N0_limit));

  // deviation (du, dv) = (u - U*, v - V*)
  std::vector<double> du(N), dv(N);
  for (int i = 0; i < N; ++i) {
    du[i] = om[i] * p0[i];
    dv[i] = om[i] * q0[i];
  }
  std::vector<double> adv(n - 1, dc.c_star);
  const auto Au = implicit_matrix(1.0, adv, h, dt);
  const auto Av = implicit_matrix(p.sigma, adv, h, dt);

  auto record = [&](double t, std::vector<double>& ts, std::vector<double>& tp,
                    std::vector<double>& tq) {
    double sp = 0, sq = 0;
    for (int i = 0; i < N; ++i) {
      const double s = 1.0 + std::abs(x[i]);
      sp = std::max(sp, std::abs(du[i] / om[i]) / s);
      sq = std::max(sq, std::abs(dv[i] / om[i]) / s);
    }
    ts.push_back(t);
    tp.push_back(sp);
    tq.push_back(sq);
  };

  const auto targets = fit_targets(t_lo, t_hi, cfg.samples);
  size_t next_target = 0;
  const long steps = std::lround(cfg.T / dt);
  const long rec_every = std::max(1L, std::lround(cfg.record_every / dt));
  record(0.0, out.times, out.theta_p, out.theta_q);
  const double theta0 = std::max(out.theta_p[0], out.theta_q[0]);

  const double a = p.a, r = p.r, b = p.b;
  std::vector<double> ru(n - 1), rv(n - 1);
  for (long k = 1; k <= steps; ++k) {
    for (int i = 1; i < n; ++i) {
      const double U = profile.U[i], V = 1.0 + profile.W[i];
      const double pu = du[i], pv = dv[i];
      double fu = pu * (1.0 - 2.0 * U - a * V) - a * U * pv;
      double fv = -r * b * V * pu + r * pv * (-1.0 - b * U - 2.0 * profile.W[i]);
      if (!cfg.linear) {
        fu -= pu * (pu + a * pv);
        fv -= r * pv * (b * pu + pv);
      }
      ru[i - 1] = pu + dt * fu;
      rv[i - 1] = pv + dt * fv;
    }
    Au.solve_in_place(ru);
    Av.solve_in_place(rv);
    std::copy(ru.begin(), ru.end(), du.begin() + 1);
    std::copy(rv.begin(), rv.end(), dv.begin() + 1);
    if (!all_finite(ru) || !all_finite(rv))
      throw Error(ErrorKind::NaNDetected, fmt::format("non-finite deviation at t = {}", k * dt));
    const double t = k * dt;
    if (k % rec_every == 0) {
      record(t, out.times, out.theta_p, out.theta_q);
      if (std::max(out.theta_p.back(), out.theta_q.back()) > 10.0 * theta0)
        throw Error(ErrorKind::PerturbationTooLarge,
                    fmt::format("weighted perturbation grew tenfold by t = {}", t));
    }
    while (next_target < targets.size() && t + 0.5 * dt >= targets[next_target]) {
      record(t, out.fit_times, out.fit_theta_p, out.fit_theta_q);
      ++next_target;
    }
  }
  if (out.fit_times.size() < 3)
    throw Error(ErrorKind::WindowTooShort, "run ended before the fit window filled");

  const auto fp = fit_log_log(out.fit_times, out.fit_theta_p);
  out.exponent = fp.slope;
  out.ci_low = fp.slope - 1.96 * fp.stderr_slope;
  out.ci_high = fp.slope + 1.96 * fp.stderr_slope;
  out.exponent_q = fit_log_log(out.fit_times, out.fit_theta_q).slope;
  for (int i = 0; i < N; ++i)
    if (std::abs(x[i]) <= 20.0) out.compact_sup_final = std::max(out.compact_sup_final, std::abs(du[i]));
  return out;
}

LinearEvolution linear_evolution(const ModelParameters& p, const DerivedConstants& dc,
                                 const FrontProfile& profile, const std::vector<double>& p0,
                                 const std::vector<double>& q0, double T, double dt,
                                 const std::vector<double>& snapshots, double fit_lo,
                                 double fit_hi_fraction) {
  const int n = profile.n, N = n + 1;
  if (static_cast<int>(p0.size()) != N || static_cast<int>(q0.size()) != N)
    throw Error(ErrorKind::ConfigInvalid, "initial data does not match the profile grid");
  const double h = profile.h;
  check_step_limits(p, dc, h, dt);
  const WeightFunction w(dc.delta, dc.gamma_star);
  const auto& x = profile.x;
  const double c = dc.c_star, s = p.sigma;

  std::vector<double> au(n - 1), av(n - 1), zu(N), zv(N);
  for (int i = 0; i < N; ++i) {
    const double l1 = w.dlog(x[i]), l2 = w.d2ratio(x[i]);
    const double U = profile.U[i], Wm = profile.W[i];
    zu[i] = l2 + c * l1 + 1.0 - 2.0 * U - p.a * (1.0 + Wm);
    zv[i] = s * l2 + c * l1 + p.r * (-1.0 - p.b * U - 2.0 * Wm);
    if (i > 0 && i < n) {
      au[i - 1] = c + 2.0 * l1;
      av[i - 1] = c + 2.0 * s * l1;
    }
  }
  for (int i = 0; i < n - 1; ++i)
    if (h * std::abs(au[i]) > 2.0 || h * std::abs(av[i]) > 2.0 * s)
      throw Error(ErrorKind::CFLViolated, "cell Peclet number of the weighted drift exceeds 1");
  const auto Ap = implicit_matrix(1.0, au, h, dt);
  const auto Aq = implicit_matrix(s, av, h, dt);

  LinearEvolution out;
  std::vector<double> P = p0, Q = q0;
  P.front() = P.back() = Q.front() = Q.back() = 0.0;
  const double t_hi = fit_hi_fraction * T;
  std::vector<double> targets;
  if (t_hi > fit_lo && fit_lo > 0.0) targets = fit_targets(fit_lo, t_hi, 48);
  size_t next_target = 0, next_snap = 0;
  std::vector<double> snaps = snapshots;
  std::sort(snaps.begin(), snaps.end());

  auto push_theta = [&](double t) {
    out.times.push_back(t);
    out.theta_p.push_back(theta_of(x, P));
    out.theta_q.push_back(theta_of(x, Q));
  };
  push_theta(0.0);
  while (next_snap < snaps.size() && snaps[next_snap] <= 0.5 * dt) {
    out.snapshot_times.push_back(0.0);
    out.snapshot_p.push_back(P);
    out.snapshot_q.push_back(Q);
    ++next_snap;
  }

  const long steps = std::lround(T / dt);
  const long rec_every = std::max(1L, std::lround(1.0 / dt));
  std::vector<double> rp(n - 1), rq(n - 1);
  for (long k = 1; k <= steps; ++k) {
    for (int i = 1; i < n; ++i) {
      const double U = profile.U[i], V = 1.0 + profile.W[i];
      rp[i - 1] = P[i] + dt * (zu[i] * P[i] - p.a * U * Q[i]);
      rq[i - 1] = Q[i] + dt * (zv[i] * Q[i] - p.r * p.b * V * P[i]);
    }
    Ap.solve_in_place(rp);
    Aq.solve_in_place(rq);
    std::copy(rp.begin(), rp.end(), P.begin() + 1);
    std::copy(rq.begin(), rq.end(), Q.begin() + 1);
    if (!all_finite(rp) || !all_finite(rq))
      throw Error(ErrorKind::NaNDetected, fmt::format("non-finite linear state at t = {}", k * dt));
    const double t = k * dt;
    if (k % rec_every == 0) push_theta(t);
    while (next_target < targets.size() && t + 0.5 * dt >= targets[next_target]) {
      out.fit_times.push_back(t);
      out.fit_theta_p.push_back(theta_of(x, P));
      ++next_target;
    }
    while (next_snap < snaps.size() && t + 0.5 * dt >= snaps[next_snap]) {
      out.snapshot_times.push_back(t);
      out.snapshot_p.push_back(P);
      out.snapshot_q.push_back(Q);
      ++next_snap;
    }
  }
  if (out.fit_times.size() >= 3) out.exponent = fit_log_log(out.fit_times, out.fit_theta_p).slope;
  return out;
}

}  // namespace pf
