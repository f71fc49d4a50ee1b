#include "pulledfront/evans.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "discrete.hpp"
#include "pulledfront/error.hpp"
#include "pulledfront/io.hpp"

// arpack.hpp pulls in <complex.h>, whose I macro clashes with C++ names
#include <arpack/arpack.hpp>
#undef I

namespace pf {

const char* to_string(EvansMethod m) {
  return m == EvansMethod::DirectBasis ? "DirectBasis" : "TwoForm";
}

EvansSample evans(const CoefficientField& field, const SpectralPoint& sp, EvansMethod method) {
  EvansSample out;
  out.lambda = sp;
  out.method = method;
  cplx det, ls;
  if (method == EvansMethod::DirectBasis) {
    TrackOptions opts;
    opts.x_far = 0.0;
    const BasisTrack tp = plus_track(field, sp, opts);
    const BasisTrack tm = minus_track(field, sp, opts);
    const int kp = tp.exact_node(0.0), km = tm.exact_node(0.0);
    Mat4 M;
    M.leftCols(2) = tp.Z[kp];
    M.rightCols(2) = tm.Z[km];
    det = M.determinant();
    ls = tp.logscale[kp][0] + tp.logscale[kp][1] + tm.logscale[km][0] + tm.logscale[km][1];
  } else {
    const TwoFormTrack ap = two_form_system(field, sp, +1);
    const TwoFormTrack am = two_form_system(field, sp, -1);
    det = wedge_pair(ap.xi.front(), am.xi.back());
    ls = ap.logscale.front() + am.logscale.back();
  }
  out.normalized = std::abs(det);
  out.log_scale = ls.real();
  out.value = det * std::exp(cplx(0.0, ls.imag()));
  return out;
}

double relative_difference(const EvansSample& a, const EvansSample& b) {
  const cplx ratio = a.value / b.value * std::exp(a.log_scale - b.log_scale);
  return std::abs(ratio - 1.0);
}

namespace {

// Value at 0 of the interpolating polynomial through (t_i, f_i).
cplx neville_at_zero(const std::vector<cplx>& t, std::vector<cplx> f) {
  const size_t n = t.size();
  for (size_t m = 1; m < n; ++m)
    for (size_t i = 0; i + m < n; ++i)
      f[i] = (t[i + m] * f[i] - t[i] * f[i + 1]) / (t[i + m] - t[i]);
  return f[0];
}

// Evaluates f over the points with up to thread_budget() workers.
template <class T, class F>
std::vector<T> parallel_map(const std::vector<cplx>& pts, F&& f) {
  std::vector<T> out(pts.size());
  const unsigned nt = std::min<unsigned>(thread_budget(), static_cast<unsigned>(pts.size()));
  if (nt <= 1) {
    for (size_t i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
    return out;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nt; ++w)
    pool.emplace_back([&]() {
      for (size_t i = next++; i < pts.size(); i = next++) {
        try {
          out[i] = f(pts[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace

EvansAtZero evans_at_zero(const CoefficientField& field, const std::vector<double>& mus) {
  EvansAtZero z;
  for (double m : mus) {
    z.mu.emplace_back(m, 0.0);
    const EvansSample s = evans(field, SpectralPoint::from_mu(m));
    z.W.push_back(s.W());
    z.scale = std::max(z.scale, std::abs(s.W()));
  }
  z.extrapolated = neville_at_zero(z.mu, z.W);
  const EvansSample s0 = evans(field, SpectralPoint{0.0, 0.0});
  z.direct = s0.W();
  z.normalized_direct = s0.normalized;
  return z;
}

MuCircleFit mu_circle_fit(const CoefficientField& field, double radius, int degree, int samples) {
  MuCircleFit fit;
  fit.radius = radius;
  fit.degree = degree;
  std::vector<cplx> mus(samples);
  for (int j = 0; j < samples; ++j)
    mus[j] = std::polar(radius, 2.0 * M_PI * (j + 0.5) / samples);
  const auto W = parallel_map<cplx>(mus, [&](cplx m) {
    return evans(field, SpectralPoint::from_mu(m)).W();
  });
  Eigen::MatrixXcd V(samples, degree + 1);
  Eigen::VectorXcd y(samples);
  for (int j = 0; j < samples; ++j) {
    // scaled monomials keep the least-squares system well conditioned
    for (int d = 0; d <= degree; ++d) V(j, d) = std::pow(mus[j] / radius, d);
    y(j) = W[j];
  }
  const Eigen::VectorXcd c = V.colPivHouseholderQr().solve(y);
  const Eigen::VectorXcd r = V * c - y;
  fit.residual = r.cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff();
  for (int d = 0; d <= degree; ++d) fit.coefficients.push_back(c(d) / std::pow(radius, d));
  return fit;
}

ContourConfig default_contour(const DerivedConstants& dc) {
  ContourConfig cfg;
  cfg.M_l = dc.M_l;
  cfg.delta0 = dc.delta0;
  cfg.delta1 = dc.delta1;
  cfg.rho = dc.M_s / 10.0;
  return cfg;
}

std::vector<ContourPiece> contour_pieces(const ContourConfig& cfg) {
  const double d0 = cfg.delta0, d1 = cfg.delta1, R = cfg.M_l, rho = cfg.rho;
  if (!(R > d0 + (1.0 + d1) * rho) || !(rho > 0.0) || !(d0 > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "contour needs M_l > delta0 + (1 + delta1) rho > 0");
  // sector line -d0 - d1 s + i s meets |lambda| = R at s = s_top
  const double qa = 1.0 + d1 * d1, qb = 2.0 * d0 * d1, qc = d0 * d0 - R * R;
  const double s_top = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  const double phi = std::arg(cplx(-d0 - d1 * s_top, s_top));
  auto lerp = [](cplx a, cplx b) {
    return [a, b](double s) { return a + s * (b - a); };
  };
  std::vector<ContourPiece> pieces;
  pieces.push_back({[=](double s) { return std::polar(R, -phi + 2.0 * phi * s); }});
  pieces.push_back({lerp(cplx(-d0 - d1 * s_top, s_top), cplx(-d0 - d1 * rho, rho))});
  pieces.push_back({lerp(cplx(-d0 - d1 * rho, rho), cplx(0.0, rho))});
  pieces.push_back({[=](double s) { return std::polar(rho, M_PI / 2.0 - M_PI * s); }});
  pieces.push_back({lerp(cplx(0.0, -rho), cplx(-d0 - d1 * rho, -rho))});
  pieces.push_back({lerp(cplx(-d0 - d1 * rho, -rho), cplx(-d0 - d1 * s_top, -s_top))});
  return pieces;
}

namespace {

struct Evaluated {
  cplx value;
  double normalized = 0.0;
};

struct Node {
  double s;
  cplx lambda;
  Evaluated v;
};

WindingResult count_winding(const std::function<Evaluated(cplx)>& eval, const ContourConfig& cfg) {
  const auto pieces = contour_pieces(cfg);
  std::vector<std::vector<Node>> nodes(pieces.size());
  // pending evaluations: (piece, s)
  std::vector<std::pair<size_t, double>> todo;
  for (size_t p = 0; p < pieces.size(); ++p) {
    const int m = p == 0 ? cfg.arc_points : cfg.line_points;
    for (int j = 0; j <= m; ++j) todo.emplace_back(p, static_cast<double>(j) / m);
  }
  auto step_of = [](const Node& a, const Node& b) { return std::arg(b.v.value / a.v.value); };
  for (int round = 0;; ++round) {
    std::vector<cplx> pts;
    for (const auto& [p, s] : todo) pts.push_back(pieces[p].at(s));
    const auto vals = parallel_map<Evaluated>(pts, eval);
    for (size_t i = 0; i < todo.size(); ++i) {
      if (!(vals[i].normalized >= cfg.near_zero_floor) || !std::isfinite(std::abs(vals[i].value)))
        throw Error(ErrorKind::NearZeroOnContour,
                    fmt::format("normalized |W| = {:.3e} at lambda = {}{:+}i", vals[i].normalized,
                                pts[i].real(), pts[i].imag()));
      nodes[todo[i].first].push_back({todo[i].second, pts[i], vals[i]});
    }
    for (auto& piece : nodes)
      std::sort(piece.begin(), piece.end(), [](const Node& a, const Node& b) { return a.s < b.s; });
    todo.clear();
    for (size_t p = 0; p < nodes.size(); ++p)
      for (size_t j = 0; j + 1 < nodes[p].size(); ++j)
        if (std::abs(step_of(nodes[p][j], nodes[p][j + 1])) >= cfg.max_phase_step)
          todo.emplace_back(p, 0.5 * (nodes[p][j].s + nodes[p][j + 1].s));
    if (todo.empty()) break;
    if (round >= cfg.max_refinements)
      throw Error(ErrorKind::PhaseJump,
                  fmt::format("{} contour intervals still turn by more than {:.3f} rad",
                              todo.size(), cfg.max_phase_step));
  }
  WindingResult res;
  res.min_normalized = std::numeric_limits<double>::infinity();
  const Node* prev = nullptr;
  for (const auto& piece : nodes)
    for (const auto& n : piece) {
      if (prev) {
        const double d = step_of(*prev, n);
        res.total_phase += d;
        res.max_phase_step = std::max(res.max_phase_step, std::abs(d));
      }
      res.lambda.push_back(n.lambda);
      res.value.push_back(n.v.value);
      res.min_normalized = std::min(res.min_normalized, n.v.normalized);
      prev = &n;
    }
  // the contour closes: last node of the final piece equals the first node
  res.winding = static_cast<int>(std::lround(res.total_phase / (2.0 * M_PI)));
  return res;
}

}  // namespace

WindingResult winding_number(const CoefficientField& field, const ContourConfig& cfg,
                             const std::function<cplx(cplx)>& factor) {
  return count_winding(
      [&](cplx lam) {
        const EvansSample s = evans(field, SpectralPoint::from_lambda(lam));
        cplx w = s.W();
        if (factor) w *= factor(lam);
        return Evaluated{w, s.normalized};
      },
      cfg);
}

WindingResult winding_of(const std::function<cplx(cplx)>& f, const ContourConfig& cfg) {
  return count_winding(
      [&](cplx lam) {
        const cplx v = f(lam);
        return Evaluated{v, std::abs(v)};
      },
      cfg);
}

double DiscreteSpectrum::distance_from_origin() const {
  double d = std::numeric_limits<double>::infinity();
  for (cplx l : point) d = std::min(d, std::abs(l));
  return d;
}

double DiscreteSpectrum::max_real() const {
  double m = -std::numeric_limits<double>::infinity();
  for (cplx l : point) m = std::max(m, l.real());
  return m;
}

namespace {

// Eigenvalues of M nearest to `shift` by shift-invert Arnoldi.
std::vector<cplx> arnoldi_near(const Eigen::SparseMatrix<cplx>& M, cplx shift, int nev,
                               double tol) {
  const int n = static_cast<int>(M.rows());
  Eigen::SparseMatrix<cplx> I(n, n);
  I.setIdentity();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(M - shift * I);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::SolveFailed, "shifted operator factorization failed");

  nev = std::min(nev, n - 2);
  const int ncv = std::min(n, std::max(2 * nev + 1, 40));
  const int lworkl = 3 * ncv * ncv + 5 * ncv;
  std::vector<cplx> resid(n), v(static_cast<size_t>(n) * ncv), workd(3 * n), workl(lworkl),
      workev(2 * ncv), d(nev + 1);
  std::vector<double> rwork(ncv);
  a_int iparam[11] = {}, ipntr[14] = {};
  iparam[0] = 1;      // exact shifts
  iparam[2] = 3000;   // max iterations
  iparam[6] = 1;      // mode: OP = (M - s)^{-1} supplied by the caller
  a_int ido = 0, info = 0;
  while (true) {
    arpack::naupd(ido, arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, tol,
                  resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(),
                  lworkl, rwork.data(), info);
    if (ido == -1 || ido == 1) {
      Eigen::Map<Eigen::VectorXcd> in(workd.data() + ipntr[0] - 1, n);
      Eigen::Map<Eigen::VectorXcd> out(workd.data() + ipntr[1] - 1, n);
      out = lu.solve(Eigen::VectorXcd(in));
    } else {
      break;
    }
  }
  if (info < 0) throw Error(ErrorKind::SolveFailed, fmt::format("znaupd info = {}", info));
  std::vector<a_int> select(ncv);
  std::vector<cplx> z(1);
  arpack::neupd(false, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), 1, shift,
                workev.data(), arpack::bmat::identity, n, arpack::which::largest_magnitude, nev,
                tol, resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(),
                lworkl, rwork.data(), info);
  if (info != 0) throw Error(ErrorKind::SolveFailed, fmt::format("zneupd info = {}", info));
  std::vector<cplx> out;
  for (int i = 0; i < iparam[4]; ++i)
    if (std::abs(d[i]) > 0.0) out.push_back(shift + 1.0 / d[i]);
  return out;
}

}  // namespace

DiscreteSpectrum discrete_spectrum_oracle(const CoefficientField& field, double L, int n,
                                          const SpectrumOptions& opts) {
  const auto op = detail::weighted_operator(field, L, n);
  DiscreteSpectrum out;
  out.L = L;
  out.n = n;
  out.window = -std::abs(field.constants().iota) / 2.0;
  out.shifts = opts.shifts;
  std::vector<cplx> all;
  for (cplx s : opts.shifts) {
    for (cplx l : arnoldi_near(op.M, s, opts.nev, opts.tol)) {
      const bool seen = std::any_of(all.begin(), all.end(), [&](cplx m) {
        return std::abs(m - l) < 1e-8 * (1.0 + std::abs(l));
      });
      if (!seen) all.push_back(l);
    }
  }
  std::sort(all.begin(), all.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  for (cplx l : all) {
    if (l.real() < out.window) continue;
    const bool on_axis = l.real() < 0.0 && std::abs(l.imag()) <= opts.real_axis_tol * std::max(1.0, std::abs(l));
    (on_axis ? out.essential : out.point).push_back(l);
  }
  return out;
}

}  // namespace pf
