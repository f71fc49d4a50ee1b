#include "pulledfront/model.hpp"

#include <cmath>
#include <numbers>

#include "pulledfront/error.hpp"

namespace pf {

SpectralPoint SpectralPoint::from_lambda(cplx lambda) {
  if (lambda.imag() == 0.0 && lambda.real() < 0.0)
    throw Error(ErrorKind::BranchCut, "lambda on the negative real axis");
  return {lambda, std::sqrt(lambda)};
}

bool DerivedConstants::complete() const {
  for (double v : {delta, alpha, iota, M_s, M_l, delta0, delta1, theta, eta_plus, eta_minus})
    if (!std::isfinite(v)) return false;
  return true;
}

DerivedConstants validate_parameters(double a, double b, double sigma, double r) {
  for (double v : {a, b, sigma, r})
    if (!std::isfinite(v)) throw Error(ErrorKind::ConfigInvalid, "non-finite parameter");
  if (!(a > 0.0 && a < 1.0 && b > 1.0))
    throw Error(ErrorKind::ViolatesMonotone, "need 0 < a < 1 < b");
  if (!(sigma > 0.0 && sigma < 2.0)) throw Error(ErrorKind::NonPositive, "need 0 < sigma < 2");
  if (!(r > 0.0)) throw Error(ErrorKind::NonPositive, "need r > 0");
  const double M = std::max(1.0, 2.0 * (1.0 - a));
  if ((a * b - M) * r > M * (2.0 - sigma) * (1.0 - a))
    throw Error(ErrorKind::ViolatesLinear, "(ab-M)r <= M(2-sigma)(1-a) fails");
  DerivedConstants dc;
  dc.c_star = 2.0 * std::sqrt(1.0 - a);
  dc.gamma_star = 0.5 * dc.c_star;
  return dc;
}

DeltaRange admissible_delta_range(const DerivedConstants& dc, const ModelParameters& p) {
  const double g = dc.gamma_star;
  const double d1 = -g + std::sqrt(g * g + 1.0);
  const double d2 = (-g + std::sqrt(g * g + p.sigma * p.r * (p.b - 1.0))) / p.sigma;
  return {0.0, std::min(d1, d2)};
}

double iota(const ModelParameters& p, const DerivedConstants& dc, double delta) {
  const double c = dc.c_star, g = dc.gamma_star;
  const double v = std::max({-1.0 + c * delta + delta * delta,
                             p.r * (1.0 - p.b) + c * delta + p.sigma * delta * delta,
                             -p.r + (p.sigma - 2.0) * g * g});
  if (v >= -1e-12) throw Error(ErrorKind::NotNegative, "iota >= 0, delta not admissible");
  return v;
}

double sector_slope_limit(const ModelParameters& p, const DerivedConstants& dc) {
  const double c = dc.c_star, g = dc.gamma_star, d = dc.delta;
  struct Parabola {
    double vertex, speed;
  };
  const Parabola curves[3] = {
      {-1.0 + c * d + d * d, c + 2.0 * d},
      {p.r * (1.0 - p.b) + c * d + p.sigma * d * d, c + 2.0 * p.sigma * d},
      {-p.r + (p.sigma - 2.0) * g * g, c * (1.0 - p.sigma)},
  };
  // Re(border) = vertex - q (y/s)^2 with q in {1, sigma}
  const double q[3] = {1.0, p.sigma, p.sigma};
  double limit = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double room = -curves[k].vertex - dc.delta0;
    if (room <= 0.0) return 0.0;
    const double s = std::abs(curves[k].speed);
    if (s > 0.0) limit = std::min(limit, 2.0 * std::sqrt(q[k] * room) / s);
  }
  return limit;
}

DerivedConstants with_delta(const ModelParameters& p, DerivedConstants dc,
                            std::optional<double> delta) {
  const DeltaRange range = admissible_delta_range(dc, p);
  dc.delta = delta ? *delta : range.midpoint();
  dc.iota = iota(p, dc, dc.delta);
  dc.alpha = 0.9 * std::min(dc.delta, dc.gamma_star);
  dc.M_l = 100.0 * (1.0 + p.r + dc.gamma_star * dc.gamma_star);
  dc.delta0 = 0.5 * std::abs(dc.iota);
  const double default_slope = std::tan(0.75 * std::numbers::pi - 0.5 * std::numbers::pi);
  dc.delta1 = std::min(default_slope, 0.5 * sector_slope_limit(p, dc));
  dc.theta = 0.5 * std::numbers::pi + std::atan(dc.delta1);
  const SmallLambdaRadius s = compute_M_s(p, dc);
  dc.M_s = s.M_s;
  dc.eta_plus = s.eta_plus;
  dc.eta_minus = s.eta_minus;
  return dc;
}

WeightFunction::WeightFunction(double delta, double gamma_star) : delta_(delta), gamma_(gamma_star) {
  Eigen::Matrix<double, 6, 6> M;
  Eigen::Matrix<double, 6, 1> rhs;
  int row = 0;
  auto add = [&](double x, int order, double value) {
    for (int k = 1; k <= 6; ++k) {
      double entry = 0.0;
      if (order == 0) entry = std::pow(x, k);
      if (order == 1) entry = k * std::pow(x, k - 1);
      if (order == 2) entry = k >= 2 ? k * (k - 1) * std::pow(x, k - 2) : 0.0;
      M(row, k - 1) = entry;
    }
    rhs(row++) = value;
  };
  add(1.0, 0, -gamma_);
  add(1.0, 1, -gamma_);
  add(1.0, 2, 0.0);
  add(-1.0, 0, -delta_);
  add(-1.0, 1, delta_);
  add(-1.0, 2, 0.0);
  const Eigen::Matrix<double, 6, 1> c = M.fullPivLu().solve(rhs);
  coef_[0] = 0.0;
  for (int k = 1; k <= 6; ++k) coef_[k] = c(k - 1);
}

double WeightFunction::log_value(double x) const {
  if (x >= 1.0) return -gamma_ * x;
  if (x <= -1.0) return delta_ * x;
  double s = 0.0;
  for (int k = 6; k >= 1; --k) s = (s + coef_[k]) * x;
  return s;
}

double WeightFunction::value(double x) const { return std::exp(log_value(x)); }

double WeightFunction::dlog(double x) const {
  if (x >= 1.0) return -gamma_;
  if (x <= -1.0) return delta_;
  double s = 0.0;
  for (int k = 6; k >= 1; --k) s = s * x + k * coef_[k];
  return s;
}

double WeightFunction::d2ratio(double x) const {
  if (x >= 1.0) return gamma_ * gamma_;
  if (x <= -1.0) return delta_ * delta_;
  double s = 0.0;
  for (int k = 6; k >= 2; --k) s = s * x + k * (k - 1) * coef_[k];
  const double d = dlog(x);
  return s + d * d;
}

double WeightFunction::derivative(double x) const { return value(x) * dlog(x); }

double WeightFunction::second_derivative(double x) const { return value(x) * d2ratio(x); }

std::array<BorderCurve, 4> fredholm_borders(const ModelParameters& p, const DerivedConstants& dc,
                                            const std::vector<double>& ell_grid) {
  const double c = dc.c_star, g = dc.gamma_star, d = dc.delta, s = p.sigma, r = p.r;
  std::array<BorderCurve, 4> out;
  out[0].name = "Gamma_u^-";
  out[1].name = "Gamma_v^-";
  out[2].name = "Gamma_u^+";
  out[3].name = "Gamma_v^+";
  for (auto& curve : out) {
    curve.ell = ell_grid;
    curve.max_re = -std::numeric_limits<double>::infinity();
  }
  const cplx I(0.0, 1.0);
  for (double l : ell_grid) {
    const cplx pts[4] = {
        -l * l - 1.0 + c * d + d * d + I * (c + 2.0 * d) * l,
        -s * l * l + r * (1.0 - p.b) + c * d + s * d * d + I * (c + 2.0 * s * d) * l,
        cplx(-l * l, 0.0),
        -s * l * l - r + (s - 2.0) * g * g + I * c * (1.0 - s) * l,
    };
    for (int k = 0; k < 4; ++k) {
      out[k].points.push_back(pts[k]);
      out[k].max_re = std::max(out[k].max_re, pts[k].real());
    }
  }
  return out;
}

bool right_of_borders(cplx lambda, const ModelParameters& p, const DerivedConstants& dc) {
  const double c = dc.c_star, g = dc.gamma_star, d = dc.delta, s = p.sigma;
  const double re = lambda.real(), im = lambda.imag();
  if (im == 0.0 && re <= 0.0) return false;
  struct Parabola {
    double vertex, speed, q;
  };
  const Parabola curves[3] = {
      {-1.0 + c * d + d * d, c + 2.0 * d, 1.0},
      {p.r * (1.0 - p.b) + c * d + s * d * d, c + 2.0 * s * d, s},
      {-p.r + (s - 2.0) * g * g, c * (1.0 - s), s},
  };
  for (const auto& cv : curves) {
    if (cv.speed != 0.0) {
      const double l = im / cv.speed;
      if (re <= cv.vertex - cv.q * l * l) return false;
    } else if (im == 0.0 && re <= cv.vertex) {
      return false;
    }
  }
  return true;
}

bool sector_contains(cplx lambda, double delta0, double delta1) {
  return lambda.real() >= -delta0 - delta1 * std::abs(lambda.imag());
}

Mat4 asymptotic_matrix_plus(const SpectralPoint& sp, const ModelParameters& p,
                            const DerivedConstants& dc) {
  const double s = p.sigma, g = dc.gamma_star, c = dc.c_star;
  const cplx lam = sp.lambda;
  Mat4 A = Mat4::Zero();
  A(0, 1) = 1.0;
  A(1, 0) = lam;
  A(2, 3) = 1.0;
  A(3, 0) = p.r * p.b / s;
  A(3, 2) = (lam + p.r + (2.0 - s) * g * g) / s;
  A(3, 3) = c * (s - 1.0) / s;
  return A;
}

Mat4 asymptotic_matrix_minus(const SpectralPoint& sp, const ModelParameters& p,
                             const DerivedConstants& dc) {
  const double s = p.sigma, c = dc.c_star, d = dc.delta;
  const cplx lam = sp.lambda;
  Mat4 A = Mat4::Zero();
  A(0, 1) = 1.0;
  A(1, 0) = lam - (-1.0 + c * d + d * d);
  A(1, 1) = -(c + 2.0 * d);
  A(1, 2) = p.a;
  A(2, 3) = 1.0;
  A(3, 2) = (lam - (p.r * (1.0 - p.b) + c * d + s * d * d)) / s;
  A(3, 3) = -(c + 2.0 * s * d) / s;
  return A;
}

AsymptoticEigenData asymptotic_eigendata(const SpectralPoint& sp, const ModelParameters& p,
                                         const DerivedConstants& dc) {
  const double s = p.sigma, g = dc.gamma_star, c = dc.c_star, d = dc.delta, r = p.r;
  const cplx lam = sp.lambda, mu = sp.mu;
  AsymptoticEigenData e;
  e.sp = sp;

  const cplx root_v = std::sqrt(g * g + s * (r + lam));
  e.nu_v_plus = g * (1.0 - 1.0 / s) + root_v / s;
  e.nu_v_minus = g * (1.0 - 1.0 / s) - root_v / s;
  const cplx base = s * lam - lam - r - (2.0 - s) * g * g;
  e.y_v_plus = r * p.b / (base + mu * c * (1.0 - s));
  e.y_v_minus = r * p.b / (base - mu * c * (1.0 - s));
  e.e_u_plus << 1.0, mu, e.y_v_plus, mu * e.y_v_plus;
  e.e_u_minus << 1.0, -mu, e.y_v_minus, -mu * e.y_v_minus;
  e.e_v_plus << 0.0, 0.0, 1.0, e.nu_v_plus;
  e.e_v_minus << 0.0, 0.0, 1.0, e.nu_v_minus;

  const cplx root_u = std::sqrt(g * g + 1.0 + lam);
  const cplx root_w = std::sqrt(g * g + s * r * (p.b - 1.0) + s * lam);
  e.mu_u_plus = -d - g + root_u;
  e.mu_u_minus = -d - g - root_u;
  e.mu_v_plus = -d - g / s + root_w / s;
  e.mu_v_minus = -d - g / s - root_w / s;
  const double ku = -1.0 + c * d + d * d;
  auto xu = [&](cplx m) { return p.a / (m * m + m * (c + 2.0 * d) - lam + ku); };
  e.x_u_plus = xu(e.mu_v_plus);
  e.x_u_minus = xu(e.mu_v_minus);
  e.eps_u_plus << 1.0, e.mu_u_plus, 0.0, 0.0;
  e.eps_u_minus << 1.0, e.mu_u_minus, 0.0, 0.0;
  e.eps_v_plus << e.x_u_plus, e.mu_v_plus * e.x_u_plus, 1.0, e.mu_v_plus;
  e.eps_v_minus << e.x_u_minus, e.mu_v_minus * e.x_u_minus, 1.0, e.mu_v_minus;

  e.gap_minus = -mu.real() - e.nu_v_minus.real();
  e.gap_plus = e.nu_v_plus.real() - mu.real();
  if (std::isfinite(dc.eta_plus) && std::isfinite(dc.eta_minus)) {
    e.ordering = e.nu_v_minus.real() < -dc.eta_minus && -dc.eta_minus < -mu.real() &&
                 mu.real() >= 0.0 && mu.real() < dc.eta_plus && dc.eta_plus < e.nu_v_plus.real();
  } else {
    e.ordering = e.gap_minus > 0.0 && e.gap_plus > 0.0 && mu.real() >= 0.0;
  }
  return e;
}

std::pair<double, double> outer_rate_floor(const ModelParameters& p, const DerivedConstants& dc,
                                           double R) {
  constexpr int rays = 72, radii = 24;
  double plus = std::numeric_limits<double>::infinity();
  double minus = plus;
  DerivedConstants bare = dc;
  bare.eta_plus = bare.eta_minus = DerivedConstants::unset;
  for (int j = 0; j < rays; ++j) {
    const double phi = -std::numbers::pi + (j + 0.5) * 2.0 * std::numbers::pi / rays;
    for (int k = 1; k <= radii; ++k) {
      const cplx lam = std::polar(R * k / radii, phi);
      if (!right_of_borders(lam, p, dc)) continue;
      const auto e = asymptotic_eigendata(SpectralPoint::from_lambda(lam), p, bare);
      plus = std::min(plus, e.nu_v_plus.real());
      minus = std::min(minus, -e.nu_v_minus.real());
    }
  }
  return {plus, minus};
}

SmallLambdaRadius compute_M_s(const ModelParameters& p, const DerivedConstants& dc) {
  auto holds = [&](double R) {
    const auto [plus, minus] = outer_rate_floor(p, dc, R);
    return std::sqrt(R) < std::min(plus, minus);
  };
  double lo = 0.0, hi = dc.M_l;
  double star = hi;
  if (!holds(hi)) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid) ? lo : hi) = mid;
    }
    star = lo;
  }
  SmallLambdaRadius out;
  out.M_s = 0.9 * star;
  const auto [plus, minus] = outer_rate_floor(p, dc, out.M_s);
  out.eta_plus = 0.5 * (std::sqrt(out.M_s) + plus);
  out.eta_minus = 0.5 * (std::sqrt(out.M_s) + minus);
  return out;
}

}  // namespace pf
