#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pulledfront/model.hpp"

namespace pf {

// Classification at -infinity by the two linear rates mu_u and mu_v:
// UFaster when mu_u < mu_v, VFaster when mu_u > mu_v, Resonant on equality.
enum class MinusInfinityCase { UFaster, VFaster, Resonant };

const char* to_string(MinusInfinityCase c);
MinusInfinityCase minus_infinity_case_from_string(const std::string& s);

struct MinusInfinityPrediction {
  MinusInfinityCase kind = MinusInfinityCase::VFaster;
  double mu_u = 0.0;  // -gamma + sqrt(gamma^2 + 1)
  double mu_v = 0.0;  // (-gamma + sqrt(gamma^2 + sigma r (b-1))) / sigma
  double rate_one_minus_u = 0.0;
  double rate_v = 0.0;
  // Predicted limit of (1-U)/V as xi -> -infinity. NaN in the UFaster case
  // (the ratio diverges); in the resonant case the ratio grows like -xi and
  // this holds the coefficient of -xi.
  double ratio = 0.0;
  bool secular = false;
};

MinusInfinityPrediction minus_infinity_case(const ModelParameters& p, const DerivedConstants& dc);

struct ProfileSample {
  double U, W, dU, dW;
};

struct FrontProfile {
  ModelParameters params;
  DerivedConstants dc;
  double L = 0.0;
  int n = 0;  // number of intervals; node n/2 sits at xi = 0
  double h = 0.0;
  std::vector<double> x, U, V, W, dU, dV;  // W = V - 1, kept for precision near +L
  double beta_plus = 0.0;
  MinusInfinityCase case_minus = MinusInfinityCase::VFaster;

  double solver_residual = 0.0;      // discrete equations, max norm
  double truncation_residual = 0.0;  // fourth-order stencil residual
  double boundary_residual = 0.0;    // neglected nonlinear terms at +-L
  int iterations = 0;
  double speed_correction = 0.0;     // relaxation only
  double settle_rate = 0.0;          // relaxation only: final max |dU/dt|

  int center() const { return n / 2; }
  // Cubic Hermite interpolation; end states outside [-L, L].
  ProfileSample sample(double xi) const;
};

struct FrontSolveOptions {
  double guess_shift = 0.0;
  int max_iter = 40;
  bool check_truncation = true;
};

FrontProfile solve_front(const ModelParameters& p, const DerivedConstants& dc, double L, int n,
                         double tol, const FrontSolveOptions& opts = {});

struct RelaxOptions {
  double dt = 0.25;
  double settle_tol = 1e-6;
  std::optional<std::vector<double>> initial_U;
  std::optional<std::vector<double>> initial_W;
  // optional log of (t, max |U - U_prev| / dt) every record_every time units
  double record_every = 0.0;
  std::vector<std::pair<double, double>>* rate_log = nullptr;
};

FrontProfile relax_to_front(const ModelParameters& p, const DerivedConstants& dc, double L, int n,
                            double T, const RelaxOptions& opts = {});

struct PlusDecayFit {
  double gamma_fit = 0.0;   // model log U = log beta + log xi - gamma xi
  double beta_fit = 0.0;
  double rms = 0.0;
  double gamma_pure = 0.0;  // model log U = log beta - gamma xi
  double rms_pure = 0.0;
  bool log_xi_misfit = false;  // the pure exponential explains the window better
  double ratio = 0.0;          // (V - 1)/U at xi = L/2
  double ratio_expected = 0.0; // rb / ((sigma-2) gamma^2 - r)
  double window_lo = 0.0, window_hi = 0.0;
};

PlusDecayFit front_decay_rate_plus(const FrontProfile& profile);
PlusDecayFit fit_plus_decay(const std::vector<double>& x, const std::vector<double>& U,
                            const std::vector<double>& W, const ModelParameters& p,
                            const DerivedConstants& dc, double lo, double hi);

// Discrete derivatives and diagnostics shared by the two solvers.
void finalize_profile(FrontProfile& f);
double truncation_residual(const FrontProfile& f);
double interior_residual(const FrontProfile& f, double speed);
void check_monotone(const FrontProfile& f);

std::string save_profile_string(const FrontProfile& f);
void save_profile(const FrontProfile& f, const std::string& path);

struct LoadedProfile {
  FrontProfile profile;
  std::vector<std::string> warnings;
  std::string hash;
};

LoadedProfile load_profile_string(const std::string& text,
                                  const ModelParameters* expected = nullptr);
LoadedProfile load_profile(const std::string& path, const ModelParameters* expected = nullptr);
std::string profile_hash(const FrontProfile& f);

}  // namespace pf
