#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pulledfront/front.hpp"
#include "pulledfront/model.hpp"
#include "pulledfront/types.hpp"

namespace pf {

using Mat4r = Eigen::Matrix4d;

// P' = A(x, lambda) P for P = (p, p', q, q') in the weighted variables.
class CoefficientField {
 public:
  CoefficientField(const FrontProfile& profile, const DerivedConstants& dc);

  // Field with B = 0: A = A^+ for x >= 0 and A^- for x < 0.
  static CoefficientField frozen(const ModelParameters& p, const DerivedConstants& dc);

  Mat4 A(double x, const SpectralPoint& sp) const;
  Mat4 A_plus(const SpectralPoint& sp) const { return asymptotic_matrix_plus(sp, params_, dc_); }
  Mat4 A_minus(const SpectralPoint& sp) const { return asymptotic_matrix_minus(sp, params_, dc_); }
  // lambda-independent part of A; A = base(x) + lambda * E
  Mat4r base(double x) const;
  Mat4r B_plus(double x) const;
  Mat4r B_minus(double x) const;
  double zeta_u(double x) const;
  double zeta_v(double x) const;
  // U and W = V - 1 of the profile (end states when frozen)
  void profile_at(double x, double& U, double& W) const;

  const ModelParameters& params() const { return params_; }
  const DerivedConstants& constants() const { return dc_; }
  const WeightFunction& weight() const { return weight_; }
  const FrontProfile* profile() const { return frozen_ ? nullptr : &profile_; }
  bool is_frozen() const { return frozen_; }

  // Measured remainder decay: ||B^+(x)|| <= C_plus e^{-alpha x}, etc.
  double X_plus = 0.0;
  double X_minus = 0.0;
  double B_plus_at_X = 0.0;
  double B_minus_at_X = 0.0;
  double alpha_meas_plus = 0.0;
  double alpha_meas_minus = 0.0;
  double C_plus = 0.0;
  double C_minus = 0.0;

 private:
  CoefficientField(const ModelParameters& p, const DerivedConstants& dc);

  ModelParameters params_;
  DerivedConstants dc_;
  WeightFunction weight_;
  FrontProfile profile_;
  bool frozen_ = false;
};

// Throws DecayTooSlow when the measured decay of B^+- is slower than dc.alpha.
CoefficientField build_coefficient_field(const FrontProfile& profile, const DerivedConstants& dc);

using MatZ = Eigen::Matrix<cplx, 4, Eigen::Dynamic>;

// Solutions of P' = A P carried as a set of columns on a node grid. Between
// nodes the columns are integrated and then re-based in dominance order:
// each column is normalized after removing its components along the more
// dominant columns (measured by left eigenvectors of the asymptotic matrix).
// S[k] records the re-basing between nodes k and k+1 so that a fixed solution
// can be followed across nodes; logscale accumulates the removed magnitudes.
struct BasisTrack {
  SpectralPoint sp;
  int side = +1;  // +1: built backward from X_plus; -1: built forward from X_minus
  double X = 0.0;
  std::vector<double> x;  // ascending
  std::vector<MatZ> Z;
  std::vector<Eigen::MatrixXcd> S;
  std::vector<std::vector<cplx>> logscale;
  std::vector<cplx> rate;  // asymptotic exponents of the columns
  std::vector<int> group;  // dominance group per column (0 = most dominant)
  double max_growth = 0.0; // largest column growth over one interval

  int columns() const { return static_cast<int>(rate.size()); }
  int node_index(double xq) const;  // nearest node
  int exact_node(double xq) const;  // throws if xq is not a node
  // Column j at node k scaled back to its asymptotic normalization.
  Vec4 column(int k, int j) const { return std::exp(logscale[k][j]) * Z[k].col(j); }
  // Coordinates of a fixed solution carried from node k to node k2.
  Eigen::VectorXcd transport(const Eigen::VectorXcd& b, int k, int k2) const;
};

struct TrackColumn {
  Vec4 v;          // data at X
  cplx rate;       // solution ~ e^{rate x} v near X
  Vec4 ell;        // left eigenvector of A^{+-} for this rate
  int group = 0;
};

BasisTrack integrate_track(const CoefficientField& field, const SpectralPoint& sp, int side,
                           double X, double x_end, const std::vector<TrackColumn>& cols,
                           double spacing);

// Groups by real part of the rate in the direction of integration; rates
// closer than tie_gap share a group and are not re-based against each other.
void assign_groups(std::vector<TrackColumn>& cols, int side, double tie_gap = 0.05);

double default_spacing(const CoefficientField& field, const SpectralPoint& sp);

struct TrackOptions {
  double x_far = 20.0;   // how far past 0 the track is continued
  double spacing = 0.0;  // 0: chosen from the rates
  bool require_ordering = false;
};

// phi_1^+, phi_2^+ from X_plus.
BasisTrack plus_track(const CoefficientField& field, const SpectralPoint& sp,
                      const TrackOptions& opts = {});
// phi_1^-, phi_2^- from X_minus (phi_2 started from the resonance-regular vector).
BasisTrack minus_track(const CoefficientField& field, const SpectralPoint& sp,
                       const TrackOptions& opts = {});
// phi_1^+, phi_2^+, psi_1^+, psi_2^+ from X_plus.
BasisTrack full_plus_track(const CoefficientField& field, const SpectralPoint& sp,
                           const TrackOptions& opts = {});

// Flow of a 4xm block from x0 to x1 (either direction), no re-basing.
MatZ flow_block(const CoefficientField& field, const SpectralPoint& sp, double x0, double x1,
                const MatZ& M);

// Columns of the track's solutions evaluated at an arbitrary x, anchored at
// the nearest node (returned in k).
MatZ track_at(const CoefficientField& field, const BasisTrack& t, double xq, int& k);

// Left eigenvectors of the asymptotic matrices.
Vec4 left_plus_u(const SpectralPoint& sp, cplx rate);  // rate = +-sqrt(lambda)
Vec4 left_plus_v(const SpectralPoint& sp, cplx nu, const ModelParameters& p,
                 const DerivedConstants& dc);
Vec4 left_minus_u(const SpectralPoint& sp, cplx mu, const ModelParameters& p,
                  const DerivedConstants& dc);
Vec4 left_minus_v(cplx mu, const ModelParameters& p, const DerivedConstants& dc);
// eps_v^+ minus its eps_u^+ component; regular where mu_u^+ = mu_v^+.
Vec4 regular_eps_v(const AsymptoticEigenData& e, const ModelParameters& p);

struct SolutionBasis {
  SpectralPoint sp;
  Vec4 phi1_plus, phi2_plus, psi1_plus, psi2_plus;
  Vec4 phi1_minus, phi2_minus;
  // sup over the nodes of ||theta_j|| e^{alpha |x|} (and kappa_j)
  double theta1_plus = 0, theta2_plus = 0, kappa1_plus = 0;
  double theta1_minus = 0, theta2_minus = 0;
  double independence_plus = 0;   // |det| of the normalized 4x4 with the psi's
  double independence_minus = 0;  // normalized 2-plane volume
};

SolutionBasis bounded_basis_plus(const CoefficientField& field, const SpectralPoint& sp,
                                 std::optional<double> X_plus = std::nullopt);
SolutionBasis bounded_basis_minus(const CoefficientField& field, const SpectralPoint& sp,
                                  std::optional<double> X_minus = std::nullopt);

// theta_1^+ - kappa_1^+ on the nodes of [x_lo, x_hi], with phi_1 and psi_1
// re-based identically against phi_2 so that both are analytic in sqrt(lambda)
// and coincide at lambda = 0.
struct DifferenceProfile {
  std::vector<double> x;
  std::vector<double> norm;  // ||theta_1^+ - kappa_1^+||
  double sup_ratio = 0.0;    // sup norm / (sqrt|lambda| x e^{-alpha x})
};
DifferenceProfile theta_kappa_difference(const CoefficientField& field, const SpectralPoint& sp,
                                         double x_lo, double x_hi);

// Second exterior power: 2-forms in the basis (12,13,14,23,24,34).
Vec6 wedge(const Vec4& u, const Vec4& v);
cplx wedge_pair(const Vec6& xi, const Vec6& eta);  // u1^u2^v1^v2 = det[u1 u2 v1 v2]
Mat6 compound(const Mat4& A);

struct TwoFormTrack {
  SpectralPoint sp;
  std::vector<double> x;
  std::vector<Vec6> xi;
  std::vector<cplx> logscale;
  double min_norm_before = 0.0, max_norm_before = 0.0;  // before each renormalization
};

// Stable plane from +X (side +1) or unstable plane from -X (side -1).
TwoFormTrack two_form_system(const CoefficientField& field, const SpectralPoint& sp, int side,
                             double x_end = 0.0);

// Determinant of the four solutions at node x of the two tracks.
cplx wronskian(const BasisTrack& plus, const BasisTrack& minus, int kp, int km);

}  // namespace pf
