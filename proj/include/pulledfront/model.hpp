#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pulledfront/types.hpp"

namespace pf {

struct ModelParameters {
  double a = 0.75;
  double b = 2.0;
  double sigma = 1.0;
  double r = 0.2;
};

struct DerivedConstants {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  double c_star = 0.0;
  double gamma_star = 0.0;
  double delta = unset;
  double alpha = unset;
  double iota = unset;
  double M_s = unset;
  double M_l = unset;
  double delta0 = unset;
  double delta1 = unset;
  double theta = unset;  // contour angle matching delta1
  double eta_plus = unset;
  double eta_minus = unset;

  bool complete() const;
};

DerivedConstants validate_parameters(double a, double b, double sigma, double r);
inline DerivedConstants validate_parameters(const ModelParameters& p) {
  return validate_parameters(p.a, p.b, p.sigma, p.r);
}

struct DeltaRange {
  double lower = 0.0;
  double upper = 0.0;
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double d) const { return d > lower && d < upper; }
};

DeltaRange admissible_delta_range(const DerivedConstants& dc, const ModelParameters& p);

// Throws NotNegative when the margin is not strictly negative.
double iota(const ModelParameters& p, const DerivedConstants& dc, double delta);

// Fills delta (default: midpoint of the admissible range) and everything
// that depends on it.
DerivedConstants with_delta(const ModelParameters& p, DerivedConstants dc,
                            std::optional<double> delta = std::nullopt);

inline DerivedConstants make_constants(const ModelParameters& p,
                                       std::optional<double> delta = std::nullopt) {
  return with_delta(p, validate_parameters(p), delta);
}

// omega = exp(l(x)) with l = -gamma x for x >= 1, l = delta x for x <= -1 and a
// degree-6 polynomial on [-1,1] matching l, l', l'' at both ends and l(0) = 0.
class WeightFunction {
 public:
  WeightFunction(double delta, double gamma_star);

  double log_value(double x) const;
  double value(double x) const;
  double dlog(double x) const;     // omega'/omega
  double d2ratio(double x) const;  // omega''/omega
  double derivative(double x) const;
  double second_derivative(double x) const;

  double delta() const { return delta_; }
  double gamma_star() const { return gamma_; }
  const std::array<double, 7>& blend() const { return coef_; }

 private:
  double delta_;
  double gamma_;
  std::array<double, 7> coef_{};
};

struct BorderCurve {
  std::string name;
  std::vector<double> ell;
  std::vector<cplx> points;
  double max_re = 0.0;
};

// Order: Gamma_u^-, Gamma_v^-, Gamma_u^+, Gamma_v^+.
std::array<BorderCurve, 4> fredholm_borders(const ModelParameters& p, const DerivedConstants& dc,
                                            const std::vector<double>& ell_grid);

// Strictly to the right of all four border curves (so also off (-inf,0]).
bool right_of_borders(cplx lambda, const ModelParameters& p, const DerivedConstants& dc);

bool sector_contains(cplx lambda, double delta0, double delta1);

// Largest sector slope for which the sector boundary stays right of the
// three parabolic borders.
double sector_slope_limit(const ModelParameters& p, const DerivedConstants& dc);

struct AsymptoticEigenData {
  SpectralPoint sp;
  // x -> +infinity
  cplx nu_v_plus, nu_v_minus;
  cplx y_v_plus, y_v_minus;
  Vec4 e_u_plus, e_u_minus, e_v_plus, e_v_minus;
  // x -> -infinity
  cplx mu_u_plus, mu_u_minus, mu_v_plus, mu_v_minus;
  cplx x_u_plus, x_u_minus;
  Vec4 eps_u_plus, eps_u_minus, eps_v_plus, eps_v_minus;
  // measured margins of the +infinity ordering
  double gap_minus = 0.0;  // -Re sqrt(lambda) - Re nu_v^-
  double gap_plus = 0.0;   // Re nu_v^+ - Re sqrt(lambda)
  bool ordering = false;
};

AsymptoticEigenData asymptotic_eigendata(const SpectralPoint& sp, const ModelParameters& p,
                                         const DerivedConstants& dc);

Mat4 asymptotic_matrix_plus(const SpectralPoint& sp, const ModelParameters& p,
                            const DerivedConstants& dc);
Mat4 asymptotic_matrix_minus(const SpectralPoint& sp, const ModelParameters& p,
                             const DerivedConstants& dc);

struct SmallLambdaRadius {
  double M_s = 0.0;
  double eta_plus = 0.0;
  double eta_minus = 0.0;
};

SmallLambdaRadius compute_M_s(const ModelParameters& p, const DerivedConstants& dc);

// Minimum over sampled lambda (|lambda| <= R, right of the borders) of
// Re nu_v^+ and of -Re nu_v^-.
std::pair<double, double> outer_rate_floor(const ModelParameters& p, const DerivedConstants& dc,
                                           double R);

}  // namespace pf
