#pragma once

#include <memory>
#include <vector>

#include "pulledfront/front.hpp"
#include "pulledfront/model.hpp"

namespace pf {

namespace detail {
class Tridiagonal;
}

// Comoving system u_t = u_xx + c u_x + u(1-u-av), v_t = sigma v_xx + c v_x + r v(1-bu-v).
struct SimState {
  double t = 0.0;
  double L = 0.0, h = 0.0, dt = 0.0;
  std::vector<double> x, u, v;
};

// Grid on [-L, L] with spacing h; u = v = 0.
SimState make_state(double L, double h, double dt);

// Throws CFLViolated when dt > 0.25 min(1, 1/r) or the cell Peclet number
// h c / (2 min(1, sigma)) exceeds 1.
void check_step_limits(const ModelParameters& p, const DerivedConstants& dc, double h, double dt);

// IMEX stepper: diffusion and advection implicit (factored once), reaction
// explicit; Dirichlet (1, 0) at -L and (0, 1) at +L.
class Stepper {
 public:
  Stepper(const ModelParameters& p, const DerivedConstants& dc, double L, double h, double dt);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  void advance(SimState& s) const;  // throws NaNDetected

 private:
  ModelParameters p_;
  DerivedConstants dc_;
  double dt_;
  std::unique_ptr<detail::Tridiagonal> impl_u_, impl_v_;
};

SimState step(const SimState& s, const ModelParameters& p, const DerivedConstants& dc);

struct WeightedPerturbation {
  std::vector<double> p, q;
  double theta_p = 0.0;  // sup |p| / (1 + |x|)
  double theta_q = 0.0;
};

// profile must live on the state's grid.
WeightedPerturbation weighted_perturbation(const SimState& s, const FrontProfile& profile,
                                           const WeightFunction& w);

// Front on the simulation grid (solve_front with n = 2L/h).
FrontProfile simulation_profile(const ModelParameters& p, const DerivedConstants& dc, double L,
                                double h);

struct PerturbationConfig {
  double eps = 1e-2;
  double xc = 8.0;  // p0 = q0 = eps exp(-(x - xc)^2)
};

struct DecayConfig {
  double L = 400.0, h = 0.1, dt = 0.05, T = 200.0;
  double fit_lo = 20.0;
  double fit_hi_fraction = 0.9;
  int samples = 48;          // log-uniform sample times in the fit window
  double record_every = 1.0; // uniform series for output
  double N0_limit = 1.0;
  bool linear = false;       // drop the quadratic terms
};

struct DecayDiagnostics {
  std::vector<double> times, theta_p, theta_q;          // uniform series
  std::vector<double> fit_times, fit_theta_p, fit_theta_q;
  double exponent = 0.0;     // slope of log theta_p against log t
  double ci_low = 0.0, ci_high = 0.0;
  double exponent_q = 0.0;
  double N0 = 0.0;           // ||(p0,q0)||_inf + ||(1+|x|)(p0,q0)||_L1
  double compact_sup_final = 0.0;  // unweighted sup |u - U*| on |x| <= 20 at T
  double window_lo = 0.0, window_hi = 0.0;
};

double perturbation_size(const std::vector<double>& x, const std::vector<double>& p0,
                         const std::vector<double>& q0);

// Evolves the deviation (u - U*, v - V*) with zero Dirichlet data; profile
// must live on the cfg grid.
DecayDiagnostics run_decay_experiment(const ModelParameters& p, const DerivedConstants& dc,
                                      const FrontProfile& profile, const PerturbationConfig& pert,
                                      const DecayConfig& cfg);

struct LinearEvolution {
  std::vector<double> times, theta_p, theta_q;
  std::vector<double> fit_times, fit_theta_p;
  double exponent = 0.0;
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshot_p, snapshot_q;
};

// Weighted linear system p_t = p'' + (c + 2 w'/w) p' + zeta_u p - a U q,
// q_t = sigma q'' + (c + 2 sigma w'/w) q' + zeta_v q - r b V p with zero ends.
LinearEvolution linear_evolution(const ModelParameters& p, const DerivedConstants& dc,
                                 const FrontProfile& profile, const std::vector<double>& p0,
                                 const std::vector<double>& q0, double T, double dt,
                                 const std::vector<double>& snapshots = {},
                                 double fit_lo = 20.0, double fit_hi_fraction = 0.9);

struct SlopeFit {
  double slope = 0.0, intercept = 0.0, stderr_slope = 0.0;
};
SlopeFit fit_log_log(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace pf
