#include "pulledfront/front.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pulledfront/error.hpp"
#include "pulledfront/io.hpp"
#include "tridiag.hpp"

namespace pf {

const char* to_string(MinusInfinityCase c) {
  switch (c) {
    case MinusInfinityCase::UFaster: return "UFaster";
    case MinusInfinityCase::VFaster: return "VFaster";
    case MinusInfinityCase::Resonant: return "Resonant";
  }
  return "?";
}

MinusInfinityCase minus_infinity_case_from_string(const std::string& s) {
  if (s == "UFaster") return MinusInfinityCase::UFaster;
  if (s == "VFaster") return MinusInfinityCase::VFaster;
  if (s == "Resonant") return MinusInfinityCase::Resonant;
  throw Error(ErrorKind::SchemaVersionUnknown, "unknown case label '" + s + "'");
}

MinusInfinityPrediction minus_infinity_case(const ModelParameters& p, const DerivedConstants& dc) {
  const double g = dc.gamma_star, c = dc.c_star;
  MinusInfinityPrediction out;
  out.mu_u = -g + std::sqrt(g * g + 1.0);
  out.mu_v = (-g + std::sqrt(g * g + p.sigma * p.r * (p.b - 1.0))) / p.sigma;
  const double scale = std::max(out.mu_u, out.mu_v);
  if (std::abs(out.mu_u - out.mu_v) <= 1e-12 * scale) {
    // 1-U solves w'' + c w' - w = -a V with forcing at its own rate
    out.kind = MinusInfinityCase::Resonant;
    out.rate_one_minus_u = out.rate_v = out.mu_v;
    out.ratio = p.a / (2.0 * out.mu_v + c);
    out.secular = true;
  } else if (out.mu_u > out.mu_v) {
    out.kind = MinusInfinityCase::VFaster;
    out.rate_one_minus_u = out.rate_v = out.mu_v;
    const double du = out.mu_v * out.mu_v + c * out.mu_v - 1.0;
    out.ratio = -p.a / du;
  } else {
    out.kind = MinusInfinityCase::UFaster;
    out.rate_one_minus_u = out.mu_u;
    out.rate_v = out.mu_v;
    out.ratio = std::nan("");
  }
  return out;
}

ProfileSample FrontProfile::sample(double xi) const {
  const int N = n + 1;
  const double x0 = x.front();
  if (xi <= x0) return {1.0, -1.0, 0.0, 0.0};
  if (xi >= x.back()) return {0.0, 0.0, 0.0, 0.0};
  int i = std::clamp(static_cast<int>(std::floor((xi - x0) / h)), 0, N - 2);
  const double t = (xi - x[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
  const double d01 = -d00, d11 = 3 * t * t - 2 * t;
  auto value = [&](const std::vector<double>& f, const std::vector<double>& df) {
    return h00 * f[i] + h10 * h * df[i] + h01 * f[i + 1] + h11 * h * df[i + 1];
  };
  auto slope = [&](const std::vector<double>& f, const std::vector<double>& df) {
    return (d00 * f[i] + d01 * f[i + 1]) / h + d10 * df[i] + d11 * df[i + 1];
  };
  return {value(U, dU), value(W, dV), slope(U, dU), slope(W, dV)};
}

namespace {

std::vector<double> central_derivative(const std::vector<double>& f, double h) {
  const int N = static_cast<int>(f.size());
  std::vector<double> d(N);
  for (int i = 1; i < N - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
  d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  d[N - 1] = (f[N - 3] - 4 * f[N - 2] + 3 * f[N - 1]) / (2 * h);
  return d;
}

double boundary_residual_of(const FrontProfile& f) {
  const auto& p = f.params;
  const int N = f.n + 1;
  const double w = 1.0 - f.U[0], V0 = f.V[0];
  const double UL = f.U[N - 1], WL = f.W[N - 1];
  return std::max({std::abs(w * (w - p.a * V0)), std::abs(p.r * V0 * (p.b * w - V0)),
                   std::abs(UL * (UL + p.a * WL)), std::abs(p.r * WL * (p.b * UL + WL))});
}

}  // namespace

void finalize_profile(FrontProfile& f) {
  const int N = f.n + 1;
  const int i0 = f.center();
  f.x.resize(N);
  for (int i = 0; i < N; ++i) f.x[i] = (i - i0) * f.h;
  f.V.resize(N);
  for (int i = 0; i < N; ++i) f.V[i] = 1.0 + f.W[i];
  f.dU = central_derivative(f.U, f.h);
  f.dV = central_derivative(f.W, f.h);
  f.case_minus = minus_infinity_case(f.params, f.dc).kind;
  f.truncation_residual = truncation_residual(f);
  f.boundary_residual = boundary_residual_of(f);
}

double interior_residual(const FrontProfile& f, double speed) {
  const auto& p = f.params;
  const double c = f.dc.c_star + speed, h = f.h;
  double worst = 0.0;
  for (int k = 1; k < f.n; ++k) {
    const double U = f.U[k], W = f.W[k], V = 1.0 + W;
    const double Uxx = (f.U[k + 1] - 2 * U + f.U[k - 1]) / (h * h);
    const double Ux = (f.U[k + 1] - f.U[k - 1]) / (2 * h);
    const double Wxx = (f.W[k + 1] - 2 * W + f.W[k - 1]) / (h * h);
    const double Wx = (f.W[k + 1] - f.W[k - 1]) / (2 * h);
    worst = std::max(worst, std::abs(Uxx + c * Ux + U * (1 - U - p.a * V)));
    worst = std::max(worst, std::abs(p.sigma * Wxx + c * Wx + p.r * V * (-p.b * U - W)));
  }
  return worst;
}

double truncation_residual(const FrontProfile& f) {
  const auto& p = f.params;
  const double c = f.dc.c_star, h = f.h;
  double worst = 0.0;
  auto d2 = [&](const std::vector<double>& g, int k) {
    return (-g[k + 2] + 16 * g[k + 1] - 30 * g[k] + 16 * g[k - 1] - g[k - 2]) / (12 * h * h);
  };
  auto d1 = [&](const std::vector<double>& g, int k) {
    return (-g[k + 2] + 8 * g[k + 1] - 8 * g[k - 1] + g[k - 2]) / (12 * h);
  };
  for (int k = 2; k < f.n - 1; ++k) {
    const double U = f.U[k], W = f.W[k], V = 1.0 + W;
    worst = std::max(worst, std::abs(d2(f.U, k) + c * d1(f.U, k) + U * (1 - U - p.a * V)));
    worst = std::max(worst,
                     std::abs(p.sigma * d2(f.W, k) + c * d1(f.W, k) + p.r * V * (-p.b * U - W)));
  }
  return worst;
}

void check_monotone(const FrontProfile& f) {
  // derivatives below roundoff in the saturated tails carry no sign
  const double tol = 1e-13 / f.h;
  for (int k = 1; k < f.n; ++k) {
    if (!(f.dU[k] < tol && f.dV[k] > -tol))
      throw Error(ErrorKind::NotMonotone, fmt::format("derivative sign fails at xi={}", f.x[k]));
    if (!(f.U[k] > -1e-12 && f.U[k] < 1.0 + 1e-12 && f.W[k] < 1e-12 && f.W[k] > -1.0 - 1e-12))
      throw Error(ErrorKind::NotMonotone, fmt::format("range fails at xi={}", f.x[k]));
  }
}

FrontProfile solve_front(const ModelParameters& p, const DerivedConstants& dc, double L, int n,
                         double tol, const FrontSolveOptions& opts) {
  if (!(L > 0.0) || n < 8 || n % 2 != 0 || !(tol > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "need L > 0, even n >= 8, tol > 0");
  const double c = dc.c_star, g = dc.gamma_star, s = p.sigma, a = p.a, r = p.r, b = p.b;
  FrontProfile f;
  f.params = p;
  f.dc = dc;
  f.L = L;
  f.n = n;
  f.h = 2.0 * L / n;
  const int N = n + 1, i0 = n / 2;
  const double h = f.h;
  f.U.resize(N);
  f.W.resize(N);
  for (int i = 0; i < N; ++i) {
    const double xi = (i - i0) * h;
    f.U[i] = 0.5 * (1.0 - std::tanh(0.5 * g * (xi - opts.guess_shift)));
    f.W[i] = -f.U[i];
  }

  // Left: Y = (1-U, -U', V, V') must lie in the unstable subspace of the
  // linearization at (1,0), i.e. the kernel of (A - u1)(A - u2). The rows of
  // that product span the annihilator even when the roots of the w and V
  // equations coincide.
  const double mu_wu = 0.5 * (-c + std::sqrt(c * c + 4.0));
  const double mu_vu = (-c + std::sqrt(c * c + 4.0 * s * r * (b - 1.0))) / (2.0 * s);
  Eigen::Matrix4d A1;
  A1 << 0, 1, 0, 0, 1, -c, -a, 0, 0, 0, 0, 1, 0, 0, r * (b - 1.0) / s, -c / s;
  const Eigen::Matrix4d I4 = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d P1 = (A1 - mu_wu * I4) * (A1 - mu_vu * I4);
  const Eigen::ColPivHouseholderQR<Eigen::Matrix4d> qr(P1.transpose());
  const Eigen::Matrix4d Qrow = qr.householderQ();
  double left[2][4];
  for (int q = 0; q < 2; ++q)
    for (int j = 0; j < 4; ++j) left[q][j] = Qrow(j, q);
  // Right: Y = (U, U', W, W') annihilated by the left eigenvector of the
  // unstable V root at (0,1).
  const double mu_r = (-c + std::sqrt(c * c + 4.0 * s * r)) / (2.0 * s);
  const double l2r = (r * b / s) / (mu_r * mu_r + c * mu_r + 1.0 - a);
  const double right[4] = {(mu_r + c) * l2r, l2r, mu_r + c / s, 1.0};

  const double ds[3] = {-3.0 / (2 * h), 4.0 / (2 * h), -1.0 / (2 * h)};
  const double de[3] = {1.0 / (2 * h), -4.0 / (2 * h), 3.0 / (2 * h)};
  auto iu = [](int i) { return 2 * i; };
  auto iw = [](int i) { return 2 * i + 1; };

  const int M = 2 * N;
  Eigen::VectorXd F(M), d(M);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(10 * M);
  Eigen::SparseMatrix<double> J(M, M);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;

  auto assemble = [&](bool jac) {
    trip.clear();
    const auto& U = f.U;
    const auto& W = f.W;
    for (int k = 1; k < N - 1; ++k) {
      const double V = 1.0 + W[k];
      const double Uxx = (U[k + 1] - 2 * U[k] + U[k - 1]) / (h * h);
      const double Ux = (U[k + 1] - U[k - 1]) / (2 * h);
      const double Wxx = (W[k + 1] - 2 * W[k] + W[k - 1]) / (h * h);
      const double Wx = (W[k + 1] - W[k - 1]) / (2 * h);
      F(iu(k)) = Uxx + c * Ux + U[k] * (1 - U[k] - a * V);
      F(iw(k)) = s * Wxx + c * Wx + r * V * (-b * U[k] - W[k]);
      if (!jac) continue;
      trip.emplace_back(iu(k), iu(k - 1), 1 / (h * h) - c / (2 * h));
      trip.emplace_back(iu(k), iu(k + 1), 1 / (h * h) + c / (2 * h));
      trip.emplace_back(iu(k), iu(k), -2 / (h * h) + 1 - 2 * U[k] - a * V);
      trip.emplace_back(iu(k), iw(k), -a * U[k]);
      trip.emplace_back(iw(k), iw(k - 1), s / (h * h) - c / (2 * h));
      trip.emplace_back(iw(k), iw(k + 1), s / (h * h) + c / (2 * h));
      trip.emplace_back(iw(k), iw(k), -2 * s / (h * h) + r * (-b * U[k] - 1 - 2 * W[k]));
      trip.emplace_back(iw(k), iu(k), -r * b * V);
    }
    double Ud = 0, Wd = 0;
    for (int j = 0; j < 3; ++j) {
      Ud += ds[j] * U[j];
      Wd += ds[j] * W[j];
    }
    const double Y[4] = {1.0 - U[0], -Ud, 1.0 + W[0], Wd};
    for (int q = 0; q < 2; ++q) {
      const double* l = left[q];
      const int row = q == 0 ? iu(0) : iw(0);
      F(row) = l[0] * Y[0] + l[1] * Y[1] + l[2] * Y[2] + l[3] * Y[3];
      if (!jac) continue;
      trip.emplace_back(row, iu(0), -l[0]);
      trip.emplace_back(row, iw(0), l[2]);
      for (int j = 0; j < 3; ++j) {
        trip.emplace_back(row, iu(j), -l[1] * ds[j]);
        trip.emplace_back(row, iw(j), l[3] * ds[j]);
      }
    }
    double Ue = 0, We = 0;
    for (int j = 0; j < 3; ++j) {
      Ue += de[j] * U[N - 3 + j];
      We += de[j] * W[N - 3 + j];
    }
    const int rrow = iw(N - 1);
    F(rrow) = right[0] * U[N - 1] + right[1] * Ue + right[2] * W[N - 1] + right[3] * We;
    if (jac) {
      trip.emplace_back(rrow, iu(N - 1), right[0]);
      trip.emplace_back(rrow, iw(N - 1), right[2]);
      for (int j = 0; j < 3; ++j) {
        trip.emplace_back(rrow, iu(N - 3 + j), right[1] * de[j]);
        trip.emplace_back(rrow, iw(N - 3 + j), right[3] * de[j]);
      }
    }
    // translation: U(0) = 1/2 takes the U row of the last node
    const int prow = iu(N - 1);
    F(prow) = U[i0] - 0.5;
    if (jac) trip.emplace_back(prow, iu(i0), 1.0);
  };

  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    assemble(true);
    if (!F.allFinite()) throw Error(ErrorKind::NoConvergence, "non-finite residual");
    J.setFromTriplets(trip.begin(), trip.end());
    if (it == 0) lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "singular Jacobian");
    d = lu.solve(-F);
    for (int i = 0; i < N; ++i) {
      f.U[i] += d(iu(i));
      f.W[i] += d(iw(i));
    }
    f.iterations = it + 1;
    if (!d.allFinite()) throw Error(ErrorKind::NoConvergence, "non-finite Newton step");
    if (d.lpNorm<Eigen::Infinity>() < 1e-12) {
      converged = true;
      break;
    }
  }
  assemble(false);
  f.solver_residual = F.lpNorm<Eigen::Infinity>();
  if (!converged || !(f.solver_residual < tol))
    throw Error(ErrorKind::NoConvergence,
                fmt::format("Newton stalled after {} iterations, residual {:.3e}", f.iterations,
                            f.solver_residual));
  finalize_profile(f);
  if (opts.check_truncation && f.boundary_residual > f.truncation_residual)
    throw Error(ErrorKind::TruncationDominant,
                fmt::format("boundary residual {:.3e} exceeds truncation residual {:.3e}",
                            f.boundary_residual, f.truncation_residual));
  check_monotone(f);
  try {
    f.beta_plus = front_decay_rate_plus(f).beta_fit;
  } catch (const Error&) {
    f.beta_plus = std::nan("");
  }
  return f;
}

FrontProfile relax_to_front(const ModelParameters& p, const DerivedConstants& dc, double L, int n,
                            double T, const RelaxOptions& opts) {
  if (!(L > 40.0) || n < 8 || n % 2 != 0 || !(T > 0.0) || !(opts.dt > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "need L > 40, even n >= 8, T > 0, dt > 0");
  const double c = dc.c_star, g = dc.gamma_star, s = p.sigma, a = p.a, r = p.r, b = p.b;
  const double dt = opts.dt;
  FrontProfile f;
  f.params = p;
  f.dc = dc;
  f.L = L;
  f.n = n;
  f.h = 2.0 * L / n;
  const int N = n + 1, i0 = n / 2;
  const double h = f.h;
  std::vector<double> x(N);
  for (int i = 0; i < N; ++i) x[i] = (i - i0) * h;
  std::vector<double> U(N), W(N);
  if (opts.initial_U && opts.initial_W) {
    if (static_cast<int>(opts.initial_U->size()) != N || static_cast<int>(opts.initial_W->size()) != N)
      throw Error(ErrorKind::ConfigInvalid, "initial data size mismatch");
    U = *opts.initial_U;
    W = *opts.initial_W;
  } else {
    for (int i = 0; i < N; ++i) {
      U[i] = 0.5 * (1.0 - std::tanh(0.5 * g * x[i]));
      W[i] = -U[i];
    }
  }
  const double U_left = U[0], W_left = W[0], W_right = W[N - 1];
  // slope of U e^{g x} over the far field sets the weighted Neumann data at +L
  const int j1 = static_cast<int>(std::lower_bound(x.begin(), x.end(), x.back() - 30.0) - x.begin());
  const int j2 = static_cast<int>(std::lower_bound(x.begin(), x.end(), x.back() - 10.0) - x.begin());
  const double xL = x.back();

  auto implicit = [&](const std::vector<double>& rhs0, double D, double cc, double left_value,
                      const double* robin, double right_value) {
    const double lo = -dt * (D / (h * h) - cc / (2 * h));
    const double di = 1 + 2 * dt * D / (h * h);
    const double up = -dt * (D / (h * h) + cc / (2 * h));
    std::vector<double> dl(N - 1, lo), dd(N, di), du(N - 1, up), rhs = rhs0;
    dd[0] = 1.0;
    du[0] = 0.0;
    rhs[0] = left_value;
    if (robin) {
      // X' + g X = q through the ghost X_N = X_{N-2} + 2h(q - g X_{N-1})
      dl[N - 2] = lo + up;
      dd[N - 1] = di - up * 2 * h * robin[0];
      rhs[N - 1] -= up * 2 * h * robin[1];
    } else {
      dd[N - 1] = 1.0;
      dl[N - 2] = 0.0;
      rhs[N - 1] = right_value;
    }
    detail::Tridiagonal tri(std::move(dl), std::move(dd), std::move(du));
    tri.solve_in_place(rhs);
    return rhs;
  };

  std::vector<double> rU(N), rW(N);
  double shift = 0.0, rate = 0.0, next_record = 0.0;
  const long steps = std::lround(T / dt);
  for (long k = 0; k < steps; ++k) {
    for (int i = 0; i < N; ++i) {
      const double V = 1.0 + W[i];
      rU[i] = U[i] + dt * U[i] * (1 - U[i] - a * V);
      rW[i] = W[i] + dt * r * V * (-b * U[i] - W[i]);
    }
    const double A = (U[j2] * std::exp(g * x[j2]) - U[j1] * std::exp(g * x[j1])) / (x[j2] - x[j1]);
    const double robin[2] = {g, A * std::exp(-g * xL)};
    auto advance_U = [&](double sv) { return implicit(rU, 1.0, c + sv, U_left, robin, 0.0); };
    const double trial = 1e-3;
    const auto U1 = advance_U(shift);
    const auto U2 = advance_U(shift + trial);
    const double denom = U2[i0] - U1[i0];
    if (!(std::abs(denom) > 1e-14))
      throw Error(ErrorKind::NotSettled, "translation pinning degenerate: no front to pin");
    shift += trial * (0.5 - U1[i0]) / denom;
    auto Un = advance_U(shift);
    auto Wn = implicit(rW, s, c + shift, W_left, nullptr, W_right);
    rate = 0.0;
    for (int i = 0; i < N; ++i) {
      if (!std::isfinite(Un[i]) || !std::isfinite(Wn[i]) || std::abs(Un[i]) > 10 ||
          std::abs(Wn[i]) > 10)
        throw Error(ErrorKind::Blowup, fmt::format("relaxation blew up at t={}", (k + 1) * dt));
      rate = std::max(rate, std::abs(Un[i] - U[i]) / dt);
    }
    U = std::move(Un);
    W = std::move(Wn);
    const double t = (k + 1) * dt;
    if (opts.rate_log && opts.record_every > 0 && t >= next_record) {
      opts.rate_log->emplace_back(t, rate);
      next_record += opts.record_every;
    }
  }
  f.U = std::move(U);
  f.W = std::move(W);
  f.speed_correction = shift;
  f.settle_rate = rate;
  f.iterations = static_cast<int>(steps);
  finalize_profile(f);
  f.solver_residual = interior_residual(f, shift);
  if (!(rate <= opts.settle_tol))
    throw Error(ErrorKind::NotSettled,
                fmt::format("max |dU/dt| = {:.3e} above {:.1e} at T={}", rate, opts.settle_tol, T));
  try {
    f.beta_plus = front_decay_rate_plus(f).beta_fit;
  } catch (const Error&) {
    f.beta_plus = std::nan("");
  }
  return f;
}

PlusDecayFit fit_plus_decay(const std::vector<double>& x, const std::vector<double>& U,
                            const std::vector<double>& W, const ModelParameters& p,
                            const DerivedConstants& dc, double lo, double hi) {
  PlusDecayFit out;
  out.window_lo = lo;
  out.window_hi = hi;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    if (!(U[i] > 0.0) || !(x[i] > 0.0))
      throw Error(ErrorKind::WindowTooNoisy, "U not positive inside the fit window");
    xs.push_back(x[i]);
    ys.push_back(std::log(U[i]));
  }
  if (xs.size() < 3) throw Error(ErrorKind::WindowTooNoisy, "fit window has fewer than 3 nodes");
  auto line_fit = [&](bool with_log_xi, double& gamma, double& logbeta) {
    const size_t m = xs.size();
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd y(m);
    for (size_t i = 0; i < m; ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = -xs[i];
      y(i) = ys[i] - (with_log_xi ? std::log(xs[i]) : 0.0);
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    logbeta = coef(0);
    gamma = coef(1);
    return std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(m));
  };
  double logbeta = 0, logbeta_pure = 0;
  out.rms = line_fit(true, out.gamma_fit, logbeta);
  out.rms_pure = line_fit(false, out.gamma_pure, logbeta_pure);
  out.beta_fit = std::exp(logbeta);
  out.log_xi_misfit = out.rms_pure < out.rms;
  if (std::min(out.rms, out.rms_pure) > 0.05)
    throw Error(ErrorKind::WindowTooNoisy, fmt::format("fit rms {:.3e}", out.rms));
  // component ratio at the node nearest the window start
  size_t best = 0;
  for (size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - lo) < std::abs(x[best] - lo)) best = i;
  out.ratio = W[best] / U[best];
  out.ratio_expected =
      p.r * p.b / ((p.sigma - 2.0) * dc.gamma_star * dc.gamma_star - p.r);
  return out;
}

PlusDecayFit front_decay_rate_plus(const FrontProfile& f) {
  return fit_plus_decay(f.x, f.U, f.W, f.params, f.dc, 0.5 * f.x.back(), f.x.back() - 5.0);
}

namespace {

json array_json(const std::vector<double>& v) {
  json a = json::array();
  for (double d : v) a.push_back(format_real(d));
  return a;
}

std::vector<double> array_from(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(parse_real(e.get<std::string>()));
  return v;
}

json profile_body(const FrontProfile& f) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "front_profile";
  j["params"] = exact_numbers(to_json(f.params));
  j["dc"] = exact_numbers(to_json(f.dc));
  j["L"] = format_real(f.L);
  j["n"] = f.n;
  j["h"] = format_real(f.h);
  j["beta_plus"] = format_real(f.beta_plus);
  j["case_minus"] = to_string(f.case_minus);
  j["solver_residual"] = format_real(f.solver_residual);
  j["truncation_residual"] = format_real(f.truncation_residual);
  j["boundary_residual"] = format_real(f.boundary_residual);
  j["iterations"] = f.iterations;
  j["speed_correction"] = format_real(f.speed_correction);
  j["settle_rate"] = format_real(f.settle_rate);
  j["arrays"] = {{"x", array_json(f.x)},   {"U", array_json(f.U)},   {"V", array_json(f.V)},
                 {"W", array_json(f.W)},   {"dU", array_json(f.dU)}, {"dV", array_json(f.dV)}};
  return j;
}

}  // namespace

std::string profile_hash(const FrontProfile& f) { return sha256_hex(profile_body(f).dump()); }

std::string save_profile_string(const FrontProfile& f) {
  json j = profile_body(f);
  j["hash"] = sha256_hex(j.dump());
  return j.dump();
}

void save_profile(const FrontProfile& f, const std::string& path) {
  write_file(path, save_profile_string(f));
}

LoadedProfile load_profile_string(const std::string& text, const ModelParameters* expected) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw Error(ErrorKind::SchemaVersionUnknown, "profile container unreadable");
  }
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw Error(ErrorKind::SchemaVersionUnknown, "profile schema_version missing or unsupported");
  if (!j.contains("hash") || !j["hash"].is_string())
    throw Error(ErrorKind::HashMismatch, "profile has no content hash");
  const std::string stored = j["hash"].get<std::string>();
  j.erase("hash");
  const std::string actual = sha256_hex(j.dump());
  if (stored != actual) throw Error(ErrorKind::HashMismatch, "profile content hash mismatch");

  LoadedProfile out;
  out.hash = stored;
  FrontProfile& f = out.profile;
  try {
    f.params = params_from_json(j.at("params"));
    f.dc = constants_from_json(j.at("dc"));
    f.L = parse_real(j.at("L").get<std::string>());
    f.n = j.at("n").get<int>();
    f.h = parse_real(j.at("h").get<std::string>());
    f.beta_plus = parse_real(j.at("beta_plus").get<std::string>());
    f.case_minus = minus_infinity_case_from_string(j.at("case_minus").get<std::string>());
    f.solver_residual = parse_real(j.at("solver_residual").get<std::string>());
    f.truncation_residual = parse_real(j.at("truncation_residual").get<std::string>());
    f.boundary_residual = parse_real(j.at("boundary_residual").get<std::string>());
    f.iterations = j.at("iterations").get<int>();
    f.speed_correction = parse_real(j.at("speed_correction").get<std::string>());
    f.settle_rate = parse_real(j.at("settle_rate").get<std::string>());
    const json& arr = j.at("arrays");
    f.x = array_from(arr.at("x"));
    f.U = array_from(arr.at("U"));
    f.V = array_from(arr.at("V"));
    f.W = array_from(arr.at("W"));
    f.dU = array_from(arr.at("dU"));
    f.dV = array_from(arr.at("dV"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaVersionUnknown, std::string("profile field missing: ") + e.what());
  }
  const size_t N = static_cast<size_t>(f.n) + 1;
  for (const auto* v : {&f.x, &f.U, &f.V, &f.W, &f.dU, &f.dV})
    if (v->size() != N) throw Error(ErrorKind::SchemaVersionUnknown, "profile array length mismatch");
  if (expected) {
    const ModelParameters& e = *expected;
    if (e.a != f.params.a || e.b != f.params.b || e.sigma != f.params.sigma || e.r != f.params.r)
      out.warnings.push_back(fmt::format(
          "config parameters (a={}, b={}, sigma={}, r={}) differ from the profile's "
          "(a={}, b={}, sigma={}, r={}); using the profile's",
          e.a, e.b, e.sigma, e.r, f.params.a, f.params.b, f.params.sigma, f.params.r));
  }
  return out;
}

LoadedProfile load_profile(const std::string& path, const ModelParameters* expected) {
  return load_profile_string(read_file(path), expected);
}

}  // namespace pf
