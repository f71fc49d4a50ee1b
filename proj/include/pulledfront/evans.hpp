#pragma once

#include <functional>
#include <vector>

#include "pulledfront/odesys.hpp"

namespace pf {

enum class EvansMethod { DirectBasis, TwoForm };

const char* to_string(EvansMethod m);

// W_lambda(0) = value * exp(log_scale). The columns carry the normalization
// phi ~ e^{rate x} v near the ends, so W is analytic in sqrt(lambda).
struct EvansSample {
  SpectralPoint lambda;
  cplx value;
  double log_scale = 0.0;
  EvansMethod method = EvansMethod::DirectBasis;
  double normalized = 0.0;  // |det| of the unit columns (|wedge| of unit 2-forms)

  cplx W() const { return value * std::exp(log_scale); }
};

EvansSample evans(const CoefficientField& field, const SpectralPoint& sp,
                  EvansMethod method = EvansMethod::DirectBasis);

// |a/b - 1| computed through the log scales.
double relative_difference(const EvansSample& a, const EvansSample& b);

struct EvansAtZero {
  std::vector<cplx> mu;
  std::vector<cplx> W;        // samples at real mu
  cplx extrapolated;          // polynomial (Richardson) limit in mu
  cplx direct;                // evaluated at mu = 0
  double normalized_direct = 0.0;
  double scale = 0.0;         // max |W| over the samples
};

EvansAtZero evans_at_zero(const CoefficientField& field,
                          const std::vector<double>& mus = {0.1, 0.05, 0.025});

// Samples on |mu| = radius fitted by a degree-`degree` polynomial in mu.
struct MuCircleFit {
  double radius = 0.0;
  int degree = 0;
  double residual = 0.0;  // max |fit - sample| / max |sample|
  std::vector<cplx> coefficients;
};

MuCircleFit mu_circle_fit(const CoefficientField& field, double radius = 0.005, int degree = 4,
                          int samples = 32);

// Boundary of the sector {Re lambda > -delta0 - delta1 |Im lambda|} cut at
// |lambda| = M_l, with the strip |Im lambda| < rho around the negative real
// axis and the disk |lambda| < rho removed. Traversed counterclockwise.
struct ContourConfig {
  double M_l = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double rho = 0.0;
  int arc_points = 96;
  int line_points = 24;
  double max_phase_step = 1.5707963267948966;
  double near_zero_floor = 1e-10;
  int max_refinements = 14;
};

ContourConfig default_contour(const DerivedConstants& dc);

struct ContourPiece {
  std::function<cplx(double)> at;  // s in [0, 1]
};

std::vector<ContourPiece> contour_pieces(const ContourConfig& cfg);

struct WindingResult {
  int winding = 0;
  double total_phase = 0.0;
  double max_phase_step = 0.0;
  double min_normalized = 0.0;
  std::vector<cplx> lambda;
  std::vector<cplx> value;  // Evans values times the optional factor
};

// factor, when given, multiplies every sample (used to inject known zeros).
WindingResult winding_number(const CoefficientField& field, const ContourConfig& cfg,
                             const std::function<cplx(cplx)>& factor = {});

// Same counting on a precomputed analytic function.
WindingResult winding_of(const std::function<cplx(cplx)>& f, const ContourConfig& cfg);

struct DiscreteSpectrum {
  double L = 0.0;
  int n = 0;
  double window = 0.0;           // eigenvalues with Re >= window are reported
  std::vector<cplx> point;       // off the negative real axis
  std::vector<cplx> essential;   // on the negative real axis: truncation of the absolute spectrum
  std::vector<cplx> shifts;
  double distance_from_origin() const;  // to the nearest point eigenvalue
  double max_real() const;              // over point eigenvalues (-inf if none)
};

struct SpectrumOptions {
  std::vector<cplx> shifts = {{0.1, 0.0}, {0.1, 1.0}, {0.1, -1.0}, {0.1, 3.0}, {0.1, -3.0}};
  int nev = 24;
  double tol = 1e-12;
  double real_axis_tol = 1e-7;
};

DiscreteSpectrum discrete_spectrum_oracle(const CoefficientField& field, double L, int n,
                                          const SpectrumOptions& opts = {});

}  // namespace pf
