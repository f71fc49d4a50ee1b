#pragma once

#include <functional>
#include <vector>

#include "pulledfront/odesys.hpp"

namespace pf {

using Mat2c = Eigen::Matrix2cd;
using Mat42 = Eigen::Matrix<cplx, 4, 2>;

// Bounded solutions from both ends on a common x-range, reused for many
// (x, y) pairs at one lambda.
struct GreenContext {
  const CoefficientField* field = nullptr;
  SpectralPoint sp;
  BasisTrack plus;   // phi_1^+, phi_2^+
  BasisTrack minus;  // phi_1^-, phi_2^-
};

// Tracks cover [lo - 1, hi + 1].
GreenContext green_context(const CoefficientField& field, const SpectralPoint& sp, double lo,
                           double hi);

// State (p, p', q, q') of the two columns of G(., y) evaluated at x, using the
// branch for x > y (side +1) or x < y (side -1) irrespective of the order of x
// and y. Throws SingularBasis when [phi^+ phi^-](y) is numerically singular.
Mat42 green_state(const GreenContext& ctx, double x, double y, int side);

// 2x2 matrix G(x, y) with rows (p, q) and columns (source in p, source in q).
Mat2c pointwise_green(const GreenContext& ctx, double x, double y);
Mat2c pointwise_green(const CoefficientField& field, const SpectralPoint& sp, double x, double y);

struct JumpCheck {
  double continuity = 0.0;   // max |G(y+) - G(y-)|
  double jump11 = 0.0;       // |d_x G^11 jump + 1|
  double jump22 = 0.0;       // |d_x G^22 jump + 1/sigma|
  double cross = 0.0;        // max jump of d_x G^21, d_x G^12
};

JumpCheck jump_identities(const GreenContext& ctx, double y);

// (L_h - lambda) G = -delta_h I on the finite-difference grid.
struct DiscreteGreen {
  SpectralPoint sp;
  double y = 0.0;  // node used for the source
  double h = 0.0;
  std::vector<double> x;
  std::vector<Mat2c> G;
};

DiscreteGreen discrete_green_oracle(const CoefficientField& field, const SpectralPoint& sp,
                                    double y, double L, int n);

struct HBoundScan {
  std::vector<cplx> lambda;
  std::vector<double> sup;  // per lambda
  double variation = 0.0;   // max / min over lambda
  bool pass = false;
};

// sup over the grid of |G(x, y)| e^{Re sqrt(lambda) |x - y|}. With naive = true
// the statistic instead splits phi^-(y) along phi_1^+, phi_2^+, psi_1^+, psi_2^+
// and sums the moduli of the four pieces, which loses the cancellation between
// phi_1^+ and psi_1^+ as lambda -> 0.
HBoundScan h_bound_scan(const CoefficientField& field, const std::vector<cplx>& lambdas,
                        const std::vector<double>& xs, const std::vector<double>& ys,
                        bool naive = false);

struct TemporalConfig {
  double L = 2.0;              // rho = |x - y| / (L t)
  double integrand_floor = 1e-12;
  double tol = 1e-10;
  int start_panels = 1;
  int max_panels = 256;
  // G is sampled at 20 Gauss-Legendre nodes per panel and interpolated onto
  // at least fine_order sub-panels of the same rule, where e^{lambda t} is
  // applied; more sub-panels are used where e^{lambda t} oscillates.
  int fine_order = 4;
};

struct TemporalContour {
  double rho = 0.0;
  double theta = 0.0;
  double delta0 = 0.0;
  double k_star = 0.0;
  double ell_star = 0.0;
  double ell_max = 0.0;
};

TemporalContour temporal_contour(const DerivedConstants& dc, double t, double dist,
                                 const TemporalConfig& cfg = {});

struct ContourIntegral {
  Mat2c value;       // (1/2 pi i) int e^{lambda t} f dlambda
  int evaluations = 0;
  int panels = 0;    // per segment at convergence
  double change = 0.0;
};

// Generic inverse Laplace transform along the parabola-plus-rays contour.
// f is called with points right of the borders only.
ContourIntegral contour_inverse_laplace(const std::function<Mat2c(const SpectralPoint&)>& f,
                                        const ModelParameters& p, const DerivedConstants& dc,
                                        double t, double dist, const TemporalConfig& cfg = {});

struct TemporalGreen {
  Eigen::Matrix2d value;
  Eigen::Matrix2d imag;  // should vanish by conjugate symmetry
  int evaluations = 0;
  int panels = 0;
};

TemporalGreen temporal_green(const CoefficientField& field, double t, double x, double y,
                             const TemporalConfig& cfg = {});

// Inverse transform of e^{-sqrt(lambda) d} / (2 sqrt(lambda)) on the same
// contour; the exact value is the heat kernel e^{-d^2/4t} / sqrt(4 pi t).
double scalar_heat_kernel(const ModelParameters& p, const DerivedConstants& dc, double t,
                          double dist, const TemporalConfig& cfg = {});

}  // namespace pf
