#include "pulledfront/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "discrete.hpp"
#include "pulledfront/error.hpp"

namespace pf {

GreenContext green_context(const CoefficientField& field, const SpectralPoint& sp, double lo,
                           double hi) {
  GreenContext ctx;
  ctx.field = &field;
  ctx.sp = sp;
  TrackOptions po, mo;
  po.x_far = -(lo - 1.0);
  mo.x_far = hi + 1.0;
  ctx.plus = plus_track(field, sp, po);
  ctx.minus = minus_track(field, sp, mo);
  return ctx;
}

namespace {

// Solution with coordinates `coef` relative to the columns of node k, moved
// to x. Long moves go through the track's transfer matrices in the direction
// they are stable in; short ones are integrated directly.
Vec4 carry(const CoefficientField& field, const BasisTrack& t, int k, const Eigen::Vector2cd& coef,
           double x) {
  const int kx = t.node_index(x);
  const bool along = t.side > 0 ? kx >= k : kx <= k;
  if (!along || std::abs(x - t.x[k]) <= 1.0) {
    MatZ v = t.Z[k] * coef;
    return flow_block(field, t.sp, t.x[k], x, v).col(0);
  }
  const Eigen::VectorXcd b = t.transport(coef, k, kx);
  MatZ v = t.Z[kx] * b;
  return flow_block(field, t.sp, t.x[kx], x, v).col(0);
}

}  // namespace

Mat42 green_state(const GreenContext& ctx, double x, double y, int side) {
  const auto& field = *ctx.field;
  int kp = 0, km = 0;
  const MatZ Zp = track_at(field, ctx.plus, y, kp);
  const MatZ Zm = track_at(field, ctx.minus, y, km);
  Mat4 M;
  M.leftCols(2) = Zp;
  M.rightCols(2) = Zm;
  const double vol = std::abs(M.determinant()) /
                     (M.col(0).norm() * M.col(1).norm() * M.col(2).norm() * M.col(3).norm());
  if (!(vol > 1e-12))
    throw Error(ErrorKind::SingularBasis,
                fmt::format("bounded solutions nearly dependent at y = {} (volume {:.2e})", y, vol));
  Eigen::Matrix<cplx, 4, 2> rhs = Eigen::Matrix<cplx, 4, 2>::Zero();
  rhs(1, 0) = -1.0;
  rhs(3, 1) = -1.0 / field.params().sigma;
  const Eigen::Matrix<cplx, 4, 2> C = M.partialPivLu().solve(rhs);
  // Zp, Zm are the node columns flowed to y, so C is also in node coordinates
  // (after undoing the flow from the node to y).
  Mat42 out;
  for (int j = 0; j < 2; ++j) {
    if (side > 0) {
      const Eigen::Vector2cd a = C.col(j).head<2>();
      const Vec4 at_y = Zp * a;
      out.col(j) = std::abs(x - y) <= 1.0
                       ? Vec4(flow_block(field, ctx.sp, y, x, MatZ(at_y)).col(0))
                       : carry(field, ctx.plus, kp, a, x);
    } else {
      const Eigen::Vector2cd b = -C.col(j).tail<2>();
      const Vec4 at_y = Zm * b;
      out.col(j) = std::abs(x - y) <= 1.0
                       ? Vec4(flow_block(field, ctx.sp, y, x, MatZ(at_y)).col(0))
                       : carry(field, ctx.minus, km, b, x);
    }
  }
  return out;
}

Mat2c pointwise_green(const GreenContext& ctx, double x, double y) {
  const Mat42 s = green_state(ctx, x, y, x >= y ? +1 : -1);
  Mat2c G;
  G.row(0) = s.row(0);
  G.row(1) = s.row(2);
  return G;
}

Mat2c pointwise_green(const CoefficientField& field, const SpectralPoint& sp, double x, double y) {
  const GreenContext ctx = green_context(field, sp, std::min(x, y), std::max(x, y));
  return pointwise_green(ctx, x, y);
}

JumpCheck jump_identities(const GreenContext& ctx, double y) {
  const Mat42 D = green_state(ctx, y, y, +1) - green_state(ctx, y, y, -1);
  JumpCheck j;
  j.continuity = std::max(D.row(0).cwiseAbs().maxCoeff(), D.row(2).cwiseAbs().maxCoeff());
  j.jump11 = std::abs(D(1, 0) + 1.0);
  j.jump22 = std::abs(D(3, 1) + 1.0 / ctx.field->params().sigma);
  j.cross = std::max(std::abs(D(3, 0)), std::abs(D(1, 1)));
  return j;
}

DiscreteGreen discrete_green_oracle(const CoefficientField& field, const SpectralPoint& sp,
                                    double y, double L, int n) {
  const auto op = detail::weighted_operator(field, L, n);
  const int N = op.size();
  Eigen::SparseMatrix<cplx> I(N, N);
  I.setIdentity();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(op.M - sp.lambda * I);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::SolveFailed, "discrete resolvent factorization failed");
  const int iy = op.nearest(y);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(N, 2);
  rhs(2 * iy, 0) = -1.0 / op.h;
  rhs(2 * iy + 1, 1) = -1.0 / op.h;
  const Eigen::MatrixXcd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite())
    throw Error(ErrorKind::SolveFailed, "discrete resolvent solve failed");
  DiscreteGreen g;
  g.sp = sp;
  g.y = op.x[iy];
  g.h = op.h;
  g.x = op.x;
  g.G.resize(op.x.size());
  for (size_t i = 0; i < op.x.size(); ++i) {
    g.G[i](0, 0) = sol(2 * i, 0);
    g.G[i](1, 0) = sol(2 * i + 1, 0);
    g.G[i](0, 1) = sol(2 * i, 1);
    g.G[i](1, 1) = sol(2 * i + 1, 1);
  }
  return g;
}

HBoundScan h_bound_scan(const CoefficientField& field, const std::vector<cplx>& lambdas,
                        const std::vector<double>& xs, const std::vector<double>& ys, bool naive) {
  HBoundScan scan;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : xs) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : ys) lo = std::min(lo, v), hi = std::max(hi, v);
  for (cplx lam : lambdas) {
    const SpectralPoint sp = SpectralPoint::from_lambda(lam);
    double sup = 0.0;
    if (!naive) {
      const GreenContext ctx = green_context(field, sp, lo, hi);
      for (double y : ys)
        for (double x : xs) {
          const Mat2c G = pointwise_green(ctx, x, y);
          sup = std::max(sup, G.cwiseAbs().maxCoeff() * std::exp(sp.mu.real() * std::abs(x - y)));
        }
    } else {
      // phi_1^+ and psi_1^+ share a group so neither absorbs the other
      const auto& p = field.params();
      const auto& dc = field.constants();
      const auto e = asymptotic_eigendata(sp, p, dc);
      std::vector<TrackColumn> cols = {
          {e.e_u_minus, -sp.mu, left_plus_u(sp, -sp.mu), 1},
          {e.e_v_minus, e.nu_v_minus, left_plus_v(sp, e.nu_v_minus, p, dc), 0},
          {e.e_u_plus, sp.mu, left_plus_u(sp, sp.mu), 1},
          {e.e_v_plus, e.nu_v_plus, left_plus_v(sp, e.nu_v_plus, p, dc), 2}};
      const BasisTrack full = integrate_track(field, sp, +1, field.X_plus, lo - 1.0, cols,
                                              default_spacing(field, sp));
      TrackOptions mo;
      mo.x_far = hi + 1.0;
      const BasisTrack minus = minus_track(field, sp, mo);
      for (double y : ys) {
        int kf = 0, km = 0;
        const MatZ F = track_at(field, full, y, kf);
        const MatZ Mm = track_at(field, minus, y, km);
        const Vec4 target = Mm.col(0) / Mm.col(0).norm();
        const Mat4 B = F;
        const Vec4 c = B.partialPivLu().solve(target);
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += std::abs(c(j)) * B.col(j).norm();
        sup = std::max(sup, s);
      }
    }
    scan.lambda.push_back(lam);
    scan.sup.push_back(sup);
  }
  const auto [mn, mx] = std::minmax_element(scan.sup.begin(), scan.sup.end());
  scan.variation = *mx / *mn;
  scan.pass = scan.variation < 10.0;
  return scan;
}

TemporalContour temporal_contour(const DerivedConstants& dc, double t, double dist,
                                 const TemporalConfig& cfg) {
  if (!(t > 0.0)) throw Error(ErrorKind::ConfigInvalid, "t must be positive");
  TemporalContour c;
  // the parabola degenerates onto the cut when x = y; use unit distance there
  c.rho = std::max(dist, 1.0) / (cfg.L * t);
  c.theta = dc.theta;
  c.delta0 = dc.delta0;
  const double cot = std::cos(c.theta) / std::sin(c.theta);
  const double csc = 1.0 / std::sin(c.theta);
  c.k_star = -c.rho * cot + std::sqrt(c.rho * c.rho * csc * csc + c.delta0);
  c.ell_star = 2.0 * c.rho * c.k_star / std::sin(c.theta);
  c.ell_max = (c.delta0 + std::log(cfg.integrand_floor) / t) / std::cos(c.theta);
  c.ell_max = std::max(c.ell_max, 2.0 * c.ell_star);
  return c;
}

namespace {

using GL = boost::math::quadrature::gauss<double, 20>;

struct Rule {
  std::array<double, 20> x{}, w{}, bary{};
};

const Rule& rule() {
  static const Rule r = [] {
    Rule q;
    const auto& a = GL::abscissa();
    const auto& wt = GL::weights();
    // boost stores the non-negative half
    for (int i = 0; i < 10; ++i) {
      q.x[9 - i] = -a[i];
      q.w[9 - i] = wt[i];
      q.x[10 + i] = a[i];
      q.w[10 + i] = wt[i];
    }
    for (int i = 0; i < 20; ++i)
      q.bary[i] = ((i % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - q.x[i] * q.x[i]) * q.w[i]);
    return q;
  }();
  return r;
}

struct Segment {
  std::function<SpectralPoint(double)> point;
  std::function<cplx(double)> dlambda;  // d lambda / ds
  double s0, s1;
};

// int_{s0}^{s1} e^{lambda(s) t} f(lambda(s)) lambda'(s) ds with P panels.
Mat2c integrate_segment(const Segment& seg, const std::function<Mat2c(const SpectralPoint&)>& f,
                        const ModelParameters& p, const DerivedConstants& dc, double t, int P,
                        int fine, int& evals) {
  const Rule& q = rule();
  Mat2c total = Mat2c::Zero();
  const double len = (seg.s1 - seg.s0) / P;
  for (int k = 0; k < P; ++k) {
    const double a = seg.s0 + k * len;
    std::array<Mat2c, 20> g;
    for (int i = 0; i < 20; ++i) {
      const double s = a + 0.5 * len * (q.x[i] + 1.0);
      const SpectralPoint sp = seg.point(s);
      if (!right_of_borders(sp.lambda, p, dc))
        throw Error(ErrorKind::ContourCrossesSpectrum,
                    fmt::format("contour point {}{:+}i is not right of the essential spectrum",
                                sp.lambda.real(), sp.lambda.imag()));
      g[i] = f(sp) * seg.dlambda(s);
      ++evals;
    }
    // enough sub-panels that e^{lambda t} turns or decays by at most ~3 per sub-panel
    const cplx la = seg.point(a).lambda, lb = seg.point(a + len).lambda;
    const double span = (std::abs(lb.imag() - la.imag()) + std::abs(lb.real() - la.real())) * t;
    const int nsub = std::max(fine, static_cast<int>(std::ceil(span / 3.0)));
    const double sub = len / nsub;
    for (int m = 0; m < nsub; ++m) {
      for (int i = 0; i < 20; ++i) {
        const double s = a + m * sub + 0.5 * sub * (q.x[i] + 1.0);
        const double u = 2.0 * (s - a) / len - 1.0;  // panel coordinate
        Mat2c num = Mat2c::Zero();
        double den = 0.0;
        int exact = -1;
        for (int j = 0; j < 20; ++j) {
          const double d = u - q.x[j];
          if (d == 0.0) {
            exact = j;
            break;
          }
          num += (q.bary[j] / d) * g[j];
          den += q.bary[j] / d;
        }
        const Mat2c h = exact >= 0 ? g[exact] : Mat2c(num / den);
        total += (0.5 * sub * q.w[i]) * std::exp(seg.point(s).lambda * t) * h;
      }
    }
  }
  return total;
}

}  // namespace

ContourIntegral contour_inverse_laplace(const std::function<Mat2c(const SpectralPoint&)>& f,
                                        const ModelParameters& p, const DerivedConstants& dc,
                                        double t, double dist, const TemporalConfig& cfg) {
  const TemporalContour c = temporal_contour(dc, t, dist, cfg);
  const cplx up = std::polar(1.0, c.theta), down = std::polar(1.0, -c.theta);
  std::vector<Segment> segs;
  // rays in log(ell): G varies on the scale of |lambda| near the inner end
  const double lr = std::log(c.ell_max / c.ell_star);
  auto ell = [=](double u) { return c.ell_star * std::exp(u * lr); };
  // lower ray inward, parabola upward, upper ray outward
  segs.push_back({[=](double u) { return SpectralPoint::from_lambda(-c.delta0 + ell(-u) * down); },
                  [=](double u) { return -down * ell(-u) * lr; }, -1.0, 0.0});
  segs.push_back({[=](double k) { return SpectralPoint::from_mu(cplx(c.rho, k)); },
                  [=](double k) { return 2.0 * cplx(0.0, 1.0) * cplx(c.rho, k); }, -c.k_star,
                  c.k_star});
  segs.push_back({[=](double u) { return SpectralPoint::from_lambda(-c.delta0 + ell(u) * up); },
                  [=](double u) { return up * ell(u) * lr; }, 0.0, 1.0});
  ContourIntegral out;
  out.value = Mat2c::Zero();
  for (const auto& seg : segs) {
    int P = cfg.start_panels;
    Mat2c prev = integrate_segment(seg, f, p, dc, t, P, cfg.fine_order, out.evaluations);
    while (true) {
      P *= 2;
      if (P > cfg.max_panels)
        throw Error(ErrorKind::QuadratureNotConverged,
                    fmt::format("no convergence with {} panels at t = {}", P / 2, t));
      const Mat2c next = integrate_segment(seg, f, p, dc, t, P, cfg.fine_order, out.evaluations);
      const double change = (next - prev).cwiseAbs().maxCoeff() / (2.0 * M_PI);
      prev = next;
      if (change < cfg.tol / 3.0) {
        out.change = std::max(out.change, change);
        break;
      }
    }
    out.value += prev;
    out.panels = std::max(out.panels, P);
  }
  out.value /= cplx(0.0, 2.0 * M_PI);
  return out;
}

TemporalGreen temporal_green(const CoefficientField& field, double t, double x, double y,
                             const TemporalConfig& cfg) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  auto f = [&](const SpectralPoint& sp) {
    const GreenContext ctx = green_context(field, sp, lo, hi);
    return pointwise_green(ctx, x, y);
  };
  const ContourIntegral I =
      contour_inverse_laplace(f, field.params(), field.constants(), t, std::abs(x - y), cfg);
  TemporalGreen g;
  g.value = I.value.real();
  g.imag = I.value.imag();
  g.evaluations = I.evaluations;
  g.panels = I.panels;
  return g;
}

double scalar_heat_kernel(const ModelParameters& p, const DerivedConstants& dc, double t,
                          double dist, const TemporalConfig& cfg) {
  auto f = [&](const SpectralPoint& sp) {
    Mat2c m = Mat2c::Zero();
    m(0, 0) = std::exp(-sp.mu * dist) / (2.0 * sp.mu);
    return m;
  };
  return contour_inverse_laplace(f, p, dc, t, dist, cfg).value(0, 0).real();
}

}  // namespace pf
