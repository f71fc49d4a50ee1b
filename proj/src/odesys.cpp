#include "pulledfront/odesys.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "pulledfront/error.hpp"

namespace pf {

namespace odeint = boost::numeric::odeint;

CoefficientField::CoefficientField(const ModelParameters& p, const DerivedConstants& dc)
    : params_(p), dc_(dc), weight_(dc.delta, dc.gamma_star) {}

CoefficientField::CoefficientField(const FrontProfile& profile, const DerivedConstants& dc)
    : params_(profile.params), dc_(dc), weight_(dc.delta, dc.gamma_star), profile_(profile) {}

CoefficientField CoefficientField::frozen(const ModelParameters& p, const DerivedConstants& dc) {
  CoefficientField f(p, dc);
  f.frozen_ = true;
  f.X_plus = 1.0;
  f.X_minus = -1.0;
  return f;
}

void CoefficientField::profile_at(double x, double& U, double& W) const {
  if (frozen_) {
    U = x >= 0.0 ? 0.0 : 1.0;
    W = x >= 0.0 ? 0.0 : -1.0;
    return;
  }
  const ProfileSample s = profile_.sample(x);
  U = s.U;
  W = s.W;
}

double CoefficientField::zeta_u(double x) const {
  double U, W;
  profile_at(x, U, W);
  const double c = dc_.c_star;
  return 1.0 + c * weight_.dlog(x) + weight_.d2ratio(x) - 2.0 * U - params_.a * (1.0 + W);
}

double CoefficientField::zeta_v(double x) const {
  double U, W;
  profile_at(x, U, W);
  const auto& p = params_;
  return p.r * (1.0 - p.b * U - 2.0 * (1.0 + W)) + dc_.c_star * weight_.dlog(x) +
         p.sigma * weight_.d2ratio(x);
}

Mat4r CoefficientField::base(double x) const {
  const auto& p = params_;
  const double s = p.sigma, c = dc_.c_star;
  if (frozen_) {
    const SpectralPoint zero{0.0, 0.0};
    return (x >= 0.0 ? A_plus(zero) : A_minus(zero)).real();
  }
  double U, W;
  profile_at(x, U, W);
  const double dl = weight_.dlog(x), d2 = weight_.d2ratio(x);
  const double zu = 1.0 + c * dl + d2 - 2.0 * U - p.a * (1.0 + W);
  const double zv = p.r * (1.0 - p.b * U - 2.0 * (1.0 + W)) + c * dl + s * d2;
  Mat4r A = Mat4r::Zero();
  A(0, 1) = 1.0;
  A(1, 0) = -zu;
  A(1, 1) = -(c + 2.0 * dl);
  A(1, 2) = p.a * U;
  A(2, 3) = 1.0;
  A(3, 0) = p.r * p.b * (1.0 + W) / s;
  A(3, 2) = -zv / s;
  A(3, 3) = -(c + 2.0 * s * dl) / s;
  return A;
}

Mat4 CoefficientField::A(double x, const SpectralPoint& sp) const {
  Mat4 M = base(x).cast<cplx>();
  M(1, 0) += sp.lambda;
  M(3, 2) += sp.lambda / params_.sigma;
  return M;
}

Mat4r CoefficientField::B_plus(double x) const {
  return base(x) - A_plus(SpectralPoint{0.0, 0.0}).real();
}

Mat4r CoefficientField::B_minus(double x) const {
  return base(x) - A_minus(SpectralPoint{0.0, 0.0}).real();
}

namespace {

double op_norm(const Mat4r& B) { return B.cwiseAbs().rowwise().sum().maxCoeff(); }

double slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

CoefficientField build_coefficient_field(const FrontProfile& profile, const DerivedConstants& dc) {
  CoefficientField f(profile, dc);
  const double L = profile.x.back();
  const double step = 0.25;
  f.X_plus = L - 2.0;
  for (double x = L - 2.0; x >= 1.0; x -= step) {
    if (op_norm(f.B_plus(x)) >= 1e-12) break;
    f.X_plus = x;
  }
  f.X_minus = -L + 2.0;
  for (double x = -L + 2.0; x <= -1.0; x += step) {
    if (op_norm(f.B_minus(x)) >= 1e-12) break;
    f.X_minus = x;
  }
  f.B_plus_at_X = op_norm(f.B_plus(f.X_plus));
  f.B_minus_at_X = op_norm(f.B_minus(f.X_minus));

  std::vector<double> xs, ys;
  for (double x = 5.0; x <= std::min(40.0, f.X_plus); x += step) {
    const double nb = op_norm(f.B_plus(x));
    if (nb <= 0.0) continue;
    xs.push_back(x);
    ys.push_back(std::log(nb));
  }
  f.alpha_meas_plus = xs.size() > 2 ? -slope_fit(xs, ys) : std::numeric_limits<double>::infinity();
  xs.clear();
  ys.clear();
  for (double x = std::max(-40.0, f.X_minus); x <= -5.0; x += step) {
    const double nb = op_norm(f.B_minus(x));
    if (nb <= 0.0) continue;
    xs.push_back(x);
    ys.push_back(std::log(nb));
  }
  f.alpha_meas_minus = xs.size() > 2 ? slope_fit(xs, ys) : std::numeric_limits<double>::infinity();

  for (double x = 1.0; x <= L; x += step)
    f.C_plus = std::max(f.C_plus, op_norm(f.B_plus(x)) * std::exp(dc.alpha * x));
  for (double x = -1.0; x >= -L; x -= step)
    f.C_minus = std::max(f.C_minus, op_norm(f.B_minus(x)) * std::exp(-dc.alpha * x));

  if (std::min(f.alpha_meas_plus, f.alpha_meas_minus) < dc.alpha)
    throw Error(ErrorKind::DecayTooSlow,
                fmt::format("remainder decay rates ({:.4f}, {:.4f}) below alpha = {:.4f}",
                            f.alpha_meas_plus, f.alpha_meas_minus, dc.alpha));
  return f;
}

namespace {

template <int NC>
using RealState = std::array<double, 2 * NC>;

// Integrates y' = F(x) y for a complex vector of NC entries stored as
// interleaved real/imaginary parts.
template <int NC, class Apply>
void integrate_complex(RealState<NC>& y, double x0, double x1, Apply&& apply) {
  if (x0 == x1) return;
  auto rhs = [&](const RealState<NC>& s, RealState<NC>& ds, double x) {
    apply(x, reinterpret_cast<const cplx*>(s.data()), reinterpret_cast<cplx*>(ds.data()));
  };
  auto stepper = odeint::make_controlled(1e-12, 1e-10, odeint::runge_kutta_dopri5<RealState<NC>>());
  size_t steps = 0;
  auto counter = [&](const RealState<NC>&, double) {
    if (++steps > 2000000) throw Error(ErrorKind::Stiff, "step budget exhausted");
  };
  const double dx = (x1 > x0 ? 1.0 : -1.0) * std::min(0.05, std::abs(x1 - x0));
  try {
    odeint::integrate_adaptive(stepper, rhs, y, x0, x1, dx, counter);
  } catch (const odeint::step_adjustment_error& e) {
    throw Error(ErrorKind::Stiff, e.what());
  }
  for (double v : y)
    if (!std::isfinite(v)) throw Error(ErrorKind::Stiff, "non-finite state during integration");
}

void integrate_block(const CoefficientField& field, const SpectralPoint& sp, double x0, double x1,
                     MatZ& M) {
  const int m = static_cast<int>(M.cols());
  auto run = [&](auto tag) {
    constexpr int NC = decltype(tag)::value;
    RealState<NC> y{};
    auto* yc = reinterpret_cast<cplx*>(y.data());
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < 4; ++i) yc[4 * j + i] = M(i, j);
    integrate_complex<NC>(y, x0, x1, [&](double x, const cplx* in, cplx* out) {
      const Mat4 A = field.A(x, sp);
      for (int j = 0; j < m; ++j) {
        Eigen::Map<const Vec4> v(in + 4 * j);
        Eigen::Map<Vec4> dv(out + 4 * j);
        dv.noalias() = A * v;
      }
    });
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < 4; ++i) M(i, j) = yc[4 * j + i];
  };
  switch (m) {
    case 1: run(std::integral_constant<int, 4>{}); break;
    case 2: run(std::integral_constant<int, 8>{}); break;
    case 3: run(std::integral_constant<int, 12>{}); break;
    case 4: run(std::integral_constant<int, 16>{}); break;
    default: throw Error(ErrorKind::ConfigInvalid, "block width must be 1..4");
  }
}

cplx dot(const Vec4& ell, const Vec4& v) { return (ell.transpose() * v)(0, 0); }

}  // namespace

MatZ flow_block(const CoefficientField& field, const SpectralPoint& sp, double x0, double x1,
                const MatZ& M) {
  MatZ out = M;
  integrate_block(field, sp, x0, x1, out);
  return out;
}

Vec4 left_plus_u(const SpectralPoint& sp, cplx rate) {
  (void)sp;
  Vec4 l;
  l << rate, 1.0, 0.0, 0.0;
  return l;
}

Vec4 left_plus_v(const SpectralPoint& sp, cplx nu, const ModelParameters& p,
                 const DerivedConstants& dc) {
  const double m = dc.c_star * (p.sigma - 1.0) / p.sigma;
  const cplx l2 = (p.r * p.b / p.sigma) / (nu * nu - sp.lambda);
  Vec4 l;
  l << nu * l2, l2, nu - m, 1.0;
  return l;
}

Vec4 left_minus_u(const SpectralPoint& sp, cplx mu, const ModelParameters& p,
                  const DerivedConstants& dc) {
  const double c = dc.c_star, d = dc.delta, s = p.sigma;
  const cplx dv = s * mu * mu + (c + 2.0 * s * d) * mu + p.r * (1.0 - p.b) + c * d + s * d * d -
                  sp.lambda;
  const cplx l4 = p.a * s / dv;
  Vec4 l;
  l << mu + c + 2.0 * d, 1.0, (mu + (c + 2.0 * s * d) / s) * l4, l4;
  return l;
}

Vec4 left_minus_v(cplx mu, const ModelParameters& p, const DerivedConstants& dc) {
  const double c = dc.c_star, d = dc.delta, s = p.sigma;
  Vec4 l;
  l << 0.0, 0.0, mu + (c + 2.0 * s * d) / s, 1.0;
  return l;
}

Vec4 regular_eps_v(const AsymptoticEigenData& e, const ModelParameters& p) {
  Vec4 v;
  v << 0.0, p.a / (e.mu_v_plus - e.mu_u_minus), 1.0, e.mu_v_plus;
  return v;
}

int BasisTrack::node_index(double xq) const {
  auto it = std::lower_bound(x.begin(), x.end(), xq);
  if (it == x.begin()) return 0;
  if (it == x.end()) return static_cast<int>(x.size()) - 1;
  const int k = static_cast<int>(it - x.begin());
  return (xq - x[k - 1] <= x[k] - xq) ? k - 1 : k;
}

int BasisTrack::exact_node(double xq) const {
  const int k = node_index(xq);
  if (std::abs(x[k] - xq) > 1e-12)
    throw Error(ErrorKind::ConfigInvalid, fmt::format("x = {} is not a track node", xq));
  return k;
}

Eigen::VectorXcd BasisTrack::transport(const Eigen::VectorXcd& b, int k, int k2) const {
  Eigen::VectorXcd out = b;
  if (side > 0) {
    if (k2 < k) throw Error(ErrorKind::ConfigInvalid, "plus-side coordinates move forward only");
    for (int j = k; j < k2; ++j) out = S[j] * out;
  } else {
    if (k2 > k) throw Error(ErrorKind::ConfigInvalid, "minus-side coordinates move backward only");
    for (int j = k - 1; j >= k2; --j) out = S[j] * out;
  }
  return out;
}

void assign_groups(std::vector<TrackColumn>& cols, int side, double tie_gap) {
  // backward integration (side +1) is dominated by the most negative rate
  std::vector<int> order(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) order[i] = static_cast<int>(i);
  auto key = [&](int i) { return side > 0 ? cols[i].rate.real() : -cols[i].rate.real(); };
  std::sort(order.begin(), order.end(), [&](int i, int j) { return key(i) < key(j); });
  int g = 0;
  for (size_t q = 0; q < order.size(); ++q) {
    if (q > 0 && key(order[q]) - key(order[q - 1]) >= tie_gap) ++g;
    cols[order[q]].group = g;
  }
}

double default_spacing(const CoefficientField& field, const SpectralPoint& sp) {
  const auto e = asymptotic_eigendata(sp, field.params(), field.constants());
  const cplx plus[4] = {sp.mu, -sp.mu, e.nu_v_plus, e.nu_v_minus};
  const cplx minus[4] = {e.mu_u_plus, e.mu_u_minus, e.mu_v_plus, e.mu_v_minus};
  double spread = 0.0;
  for (const cplx* set : {plus, minus}) {
    double lo = set[0].real(), hi = lo;
    for (int i = 1; i < 4; ++i) {
      lo = std::min(lo, set[i].real());
      hi = std::max(hi, set[i].real());
    }
    spread = std::max(spread, hi - lo);
  }
  double h = 1.0;
  while (h * spread > 4.0 && h > 1.0 / 64.0) h *= 0.5;
  return h;
}

BasisTrack integrate_track(const CoefficientField& field, const SpectralPoint& sp, int side,
                           double X, double x_end, const std::vector<TrackColumn>& cols,
                           double spacing) {
  BasisTrack t;
  t.sp = sp;
  t.side = side;
  t.X = X;
  const int m = static_cast<int>(cols.size());
  for (const auto& c : cols) {
    t.rate.push_back(c.rate);
    t.group.push_back(c.group);
  }
  // nodes: integer multiples of the spacing between x_end and X, plus X itself
  std::vector<double> nodes;
  if (side > 0) {
    const long j_hi = static_cast<long>(std::floor(X / spacing - 1e-9));
    const long j_lo = static_cast<long>(std::ceil(x_end / spacing - 1e-9));
    for (long j = j_lo; j <= j_hi; ++j) nodes.push_back(j * spacing);
    nodes.push_back(X);
  } else {
    const long j_lo = static_cast<long>(std::ceil(X / spacing + 1e-9));
    const long j_hi = static_cast<long>(std::floor(x_end / spacing + 1e-9));
    nodes.push_back(X);
    for (long j = j_lo; j <= j_hi; ++j) nodes.push_back(j * spacing);
  }
  const int K = static_cast<int>(nodes.size());
  t.x = nodes;
  t.Z.assign(K, MatZ(4, m));
  t.S.assign(K > 0 ? K - 1 : 0, Eigen::MatrixXcd());
  t.logscale.assign(K, std::vector<cplx>(m));

  const int start = side > 0 ? K - 1 : 0;
  for (int j = 0; j < m; ++j) {
    const double nv = cols[j].v.norm();
    t.Z[start].col(j) = cols[j].v / nv;
    t.logscale[start][j] = cols[j].rate * X + std::log(nv);
  }
  int groups = 0;
  for (int j = 0; j < m; ++j) groups = std::max(groups, cols[j].group + 1);

  auto rebase = [&](const MatZ& P, MatZ& Znew, Eigen::MatrixXcd& S, std::vector<cplx>& dlog) {
    S = Eigen::MatrixXcd::Zero(m, m);
    dlog.assign(m, 0.0);
    std::vector<int> done;
    for (int g = 0; g < groups; ++g) {
      std::vector<int> members;
      for (int j = 0; j < m; ++j)
        if (cols[j].group == g) members.push_back(j);
      const int nd = static_cast<int>(done.size());
      Eigen::MatrixXcd G(nd, nd);
      for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) G(a, b) = dot(cols[done[a]].ell, Znew.col(done[b]));
      // rank-revealing: the Gram matrix is nearly singular when two tied
      // columns coincide (lambda -> 0)
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> lu;
      if (nd > 0) lu.compute(G);
      for (int j : members) {
        Vec4 q = P.col(j);
        Eigen::VectorXcd sc = Eigen::VectorXcd::Unit(m, j);
        if (nd > 0) {
          Eigen::VectorXcd rhs(nd);
          for (int a = 0; a < nd; ++a) rhs(a) = dot(cols[done[a]].ell, q);
          const Eigen::VectorXcd k = lu.solve(rhs);
          for (int b = 0; b < nd; ++b) {
            q -= k(b) * Znew.col(done[b]);
            sc -= k(b) * S.col(done[b]);
          }
        }
        const double n = q.norm();
        if (!(n > 0.0) || !std::isfinite(n))
          throw Error(ErrorKind::SingularBasis, "solution column collapsed during re-basing");
        Znew.col(j) = q / n;
        S.col(j) = sc / n;
        dlog[j] = std::log(n);
        t.max_growth = std::max(t.max_growth, n);
      }
      for (int j : members) done.push_back(j);
    }
  };

  std::vector<cplx> dlog;
  if (side > 0) {
    for (int k = K - 1; k > 0; --k) {
      MatZ P = t.Z[k];
      integrate_block(field, sp, t.x[k], t.x[k - 1], P);
      rebase(P, t.Z[k - 1], t.S[k - 1], dlog);
      for (int j = 0; j < m; ++j) t.logscale[k - 1][j] = t.logscale[k][j] + dlog[j];
    }
  } else {
    for (int k = 0; k + 1 < K; ++k) {
      MatZ P = t.Z[k];
      integrate_block(field, sp, t.x[k], t.x[k + 1], P);
      rebase(P, t.Z[k + 1], t.S[k], dlog);
      for (int j = 0; j < m; ++j) t.logscale[k + 1][j] = t.logscale[k][j] + dlog[j];
    }
  }
  return t;
}

namespace {

void check_ordering(const AsymptoticEigenData& e, const TrackOptions& opts) {
  if (opts.require_ordering && !e.ordering)
    throw Error(ErrorKind::OrderingViolated,
                fmt::format("eigenvalue ordering fails at lambda = {}{:+}i", e.sp.lambda.real(),
                            e.sp.lambda.imag()));
}

double spacing_for(const CoefficientField& field, const SpectralPoint& sp,
                   const TrackOptions& opts) {
  return opts.spacing > 0.0 ? opts.spacing : default_spacing(field, sp);
}

std::vector<TrackColumn> plus_columns(const CoefficientField& field, const AsymptoticEigenData& e,
                                      bool with_psi) {
  const auto& p = field.params();
  const auto& dc = field.constants();
  const SpectralPoint& sp = e.sp;
  std::vector<TrackColumn> cols;
  cols.push_back({e.e_u_minus, -sp.mu, left_plus_u(sp, -sp.mu), 0});
  cols.push_back({e.e_v_minus, e.nu_v_minus, left_plus_v(sp, e.nu_v_minus, p, dc), 0});
  if (with_psi) {
    cols.push_back({e.e_u_plus, sp.mu, left_plus_u(sp, sp.mu), 0});
    cols.push_back({e.e_v_plus, e.nu_v_plus, left_plus_v(sp, e.nu_v_plus, p, dc), 0});
  }
  return cols;
}

}  // namespace

BasisTrack plus_track(const CoefficientField& field, const SpectralPoint& sp,
                      const TrackOptions& opts) {
  const auto e = asymptotic_eigendata(sp, field.params(), field.constants());
  check_ordering(e, opts);
  auto cols = plus_columns(field, e, false);
  assign_groups(cols, +1);
  return integrate_track(field, sp, +1, field.X_plus, -opts.x_far, cols,
                         spacing_for(field, sp, opts));
}

BasisTrack full_plus_track(const CoefficientField& field, const SpectralPoint& sp,
                           const TrackOptions& opts) {
  const auto e = asymptotic_eigendata(sp, field.params(), field.constants());
  check_ordering(e, opts);
  auto cols = plus_columns(field, e, true);
  assign_groups(cols, +1);
  return integrate_track(field, sp, +1, field.X_plus, -opts.x_far, cols,
                         spacing_for(field, sp, opts));
}

BasisTrack minus_track(const CoefficientField& field, const SpectralPoint& sp,
                       const TrackOptions& opts) {
  const auto& p = field.params();
  const auto& dc = field.constants();
  const auto e = asymptotic_eigendata(sp, p, dc);
  check_ordering(e, opts);
  std::vector<TrackColumn> cols;
  cols.push_back({e.eps_u_plus, e.mu_u_plus, left_minus_u(sp, e.mu_u_plus, p, dc), 0});
  cols.push_back({regular_eps_v(e, p), e.mu_v_plus, left_minus_v(e.mu_v_plus, p, dc), 0});
  assign_groups(cols, -1);
  return integrate_track(field, sp, -1, field.X_minus, opts.x_far, cols,
                         spacing_for(field, sp, opts));
}

MatZ track_at(const CoefficientField& field, const BasisTrack& t, double xq, int& k) {
  k = t.node_index(xq);
  if (std::abs(t.x[k] - xq) < 1e-14) return t.Z[k];
  return flow_block(field, t.sp, t.x[k], xq, t.Z[k]);
}

namespace {

double sup_weighted(const BasisTrack& t, int j, const Vec4& ref, cplx rate, double alpha,
                    double x_lo, double x_hi) {
  double worst = 0.0;
  for (size_t k = 0; k < t.x.size(); ++k) {
    const double x = t.x[k];
    if (x < x_lo || x > x_hi) continue;
    const Vec4 theta = std::exp(-rate * x) * t.column(static_cast<int>(k), j) - ref;
    worst = std::max(worst, theta.norm() * std::exp(alpha * std::abs(x)));
  }
  return worst;
}

}  // namespace

SolutionBasis bounded_basis_plus(const CoefficientField& field, const SpectralPoint& sp,
                                 std::optional<double> X_plus) {
  CoefficientField f = field;
  if (X_plus) f.X_plus = *X_plus;
  const auto e = asymptotic_eigendata(sp, f.params(), f.constants());
  if (!(e.gap_minus > 0.0)) throw Error(ErrorKind::OrderingViolated, "no gap below -Re sqrt(lambda)");
  TrackOptions opts;
  opts.x_far = 0.0;
  const BasisTrack t = full_plus_track(f, sp, opts);
  const int k0 = t.exact_node(0.0);
  SolutionBasis b;
  b.sp = sp;
  b.phi1_plus = t.column(k0, 0);
  b.phi2_plus = t.column(k0, 1);
  b.psi1_plus = t.column(k0, 2);
  b.psi2_plus = t.column(k0, 3);
  const double alpha = f.constants().alpha;
  b.theta1_plus = sup_weighted(t, 0, e.e_u_minus, -sp.mu, alpha, 0.0, f.X_plus);
  b.theta2_plus = sup_weighted(t, 1, e.e_v_minus, e.nu_v_minus, alpha, 0.0, f.X_plus);
  b.kappa1_plus = sup_weighted(t, 2, e.e_u_plus, sp.mu, alpha, 0.0, f.X_plus);
  b.independence_plus = std::abs(t.Z[k0].determinant());
  return b;
}

SolutionBasis bounded_basis_minus(const CoefficientField& field, const SpectralPoint& sp,
                                  std::optional<double> X_minus) {
  CoefficientField f = field;
  if (X_minus) f.X_minus = *X_minus;
  const auto e = asymptotic_eigendata(sp, f.params(), f.constants());
  TrackOptions opts;
  opts.x_far = 0.0;
  const BasisTrack t = minus_track(f, sp, opts);
  const int k0 = t.exact_node(0.0);
  SolutionBasis b;
  b.sp = sp;
  b.phi1_minus = t.column(k0, 0);
  b.phi2_minus = t.column(k0, 1);
  const double alpha = f.constants().alpha;
  b.theta1_minus = sup_weighted(t, 0, e.eps_u_plus, e.mu_u_plus, alpha, f.X_minus, 0.0);
  b.theta2_minus = sup_weighted(t, 1, regular_eps_v(e, f.params()), e.mu_v_plus, alpha, f.X_minus, 0.0);
  const Vec4 a = t.Z[k0].col(0), c = t.Z[k0].col(1);
  b.independence_minus = wedge(a, c).norm();
  return b;
}

DifferenceProfile theta_kappa_difference(const CoefficientField& field, const SpectralPoint& sp,
                                         double x_lo, double x_hi) {
  const auto& p = field.params();
  const auto& dc = field.constants();
  const auto e = asymptotic_eigendata(sp, p, dc);
  std::vector<TrackColumn> cols;
  cols.push_back({e.e_u_minus, -sp.mu, left_plus_u(sp, -sp.mu), 1});
  cols.push_back({e.e_v_minus, e.nu_v_minus, left_plus_v(sp, e.nu_v_minus, p, dc), 0});
  cols.push_back({e.e_u_plus, sp.mu, left_plus_u(sp, sp.mu), 1});
  const BasisTrack t = integrate_track(field, sp, +1, field.X_plus, std::min(0.0, x_lo), cols,
                                       default_spacing(field, sp));
  DifferenceProfile out;
  for (size_t k = 0; k < t.x.size(); ++k) {
    const double x = t.x[k];
    if (x < x_lo || x > x_hi) continue;
    const Vec4 th = std::exp(sp.mu * x) * t.column(static_cast<int>(k), 0) - e.e_u_minus;
    const Vec4 ka = std::exp(-sp.mu * x) * t.column(static_cast<int>(k), 2) - e.e_u_plus;
    const double nrm = (th - ka).norm();
    out.x.push_back(x);
    out.norm.push_back(nrm);
    if (x >= 1.0)
      out.sup_ratio = std::max(
          out.sup_ratio, nrm / (std::sqrt(std::abs(sp.lambda)) * x * std::exp(-dc.alpha * x)));
  }
  return out;
}

namespace {

constexpr int kPair[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

// index and sign of e_i ^ e_j in the ordered basis; sign 0 when i == j
std::pair<int, int> pair_index(int i, int j) {
  if (i == j) return {0, 0};
  const int sgn = i < j ? 1 : -1;
  const int a = std::min(i, j), b = std::max(i, j);
  for (int k = 0; k < 6; ++k)
    if (kPair[k][0] == a && kPair[k][1] == b) return {k, sgn};
  return {0, 0};
}

}  // namespace

Vec6 wedge(const Vec4& u, const Vec4& v) {
  Vec6 w;
  for (int k = 0; k < 6; ++k) {
    const int i = kPair[k][0], j = kPair[k][1];
    w(k) = u(i) * v(j) - u(j) * v(i);
  }
  return w;
}

cplx wedge_pair(const Vec6& a, const Vec6& b) {
  return a(0) * b(5) - a(1) * b(4) + a(2) * b(3) + a(3) * b(2) - a(4) * b(1) + a(5) * b(0);
}

Mat6 compound(const Mat4& A) {
  Mat6 C = Mat6::Zero();
  for (int col = 0; col < 6; ++col) {
    const int k = kPair[col][0], l = kPair[col][1];
    for (int i = 0; i < 4; ++i) {
      // A e_k ^ e_l
      auto [r1, s1] = pair_index(i, l);
      if (s1 != 0) C(r1, col) += static_cast<double>(s1) * A(i, k);
      // e_k ^ A e_l
      auto [r2, s2] = pair_index(k, i);
      if (s2 != 0) C(r2, col) += static_cast<double>(s2) * A(i, l);
    }
  }
  return C;
}

TwoFormTrack two_form_system(const CoefficientField& field, const SpectralPoint& sp, int side,
                             double x_end) {
  const auto& p = field.params();
  const auto e = asymptotic_eigendata(sp, p, field.constants());
  TwoFormTrack t;
  t.sp = sp;
  const double h = default_spacing(field, sp);
  const double X = side > 0 ? field.X_plus : field.X_minus;
  Vec6 xi;
  cplx rate;
  if (side > 0) {
    xi = wedge(e.e_u_minus, e.e_v_minus);
    rate = -sp.mu + e.nu_v_minus;
  } else {
    xi = wedge(e.eps_u_plus, regular_eps_v(e, p));
    rate = e.mu_u_plus + e.mu_v_plus;
  }
  std::vector<double> nodes;
  if (side > 0) {
    nodes.push_back(X);
    for (long j = static_cast<long>(std::floor(X / h - 1e-9)); j * h >= x_end - 1e-12; --j)
      nodes.push_back(j * h);
  } else {
    nodes.push_back(X);
    for (long j = static_cast<long>(std::ceil(X / h + 1e-9)); j * h <= x_end + 1e-12; ++j)
      nodes.push_back(j * h);
  }
  double nrm = xi.norm();
  cplx logscale = rate * X + std::log(nrm);
  xi /= nrm;
  t.x.push_back(nodes[0]);
  t.xi.push_back(xi);
  t.logscale.push_back(logscale);
  t.min_norm_before = std::numeric_limits<double>::infinity();
  for (size_t q = 1; q < nodes.size(); ++q) {
    RealState<6> y{};
    auto* yc = reinterpret_cast<cplx*>(y.data());
    for (int i = 0; i < 6; ++i) yc[i] = xi(i);
    integrate_complex<6>(y, nodes[q - 1], nodes[q], [&](double x, const cplx* in, cplx* out) {
      const Mat6 C = compound(field.A(x, sp));
      Eigen::Map<const Vec6> v(in);
      Eigen::Map<Vec6> dv(out);
      dv.noalias() = C * v;
    });
    for (int i = 0; i < 6; ++i) xi(i) = yc[i];
    nrm = xi.norm();
    t.min_norm_before = std::min(t.min_norm_before, nrm);
    t.max_norm_before = std::max(t.max_norm_before, nrm);
    xi /= nrm;
    logscale += std::log(nrm);
    t.x.push_back(nodes[q]);
    t.xi.push_back(xi);
    t.logscale.push_back(logscale);
  }
  if (side > 0) {
    std::reverse(t.x.begin(), t.x.end());
    std::reverse(t.xi.begin(), t.xi.end());
    std::reverse(t.logscale.begin(), t.logscale.end());
  }
  return t;
}

cplx wronskian(const BasisTrack& plus, const BasisTrack& minus, int kp, int km) {
  Mat4 M;
  M.leftCols(2) = plus.Z[kp].leftCols(2);
  M.rightCols(2) = minus.Z[km].leftCols(2);
  const cplx ls = plus.logscale[kp][0] + plus.logscale[kp][1] + minus.logscale[km][0] +
                  minus.logscale[km][1];
  return M.determinant() * std::exp(ls);
}

}  // namespace pf
