#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pf {

using cplx = std::complex<double>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec6 = Eigen::Matrix<cplx, 6, 1>;
using Mat6 = Eigen::Matrix<cplx, 6, 6>;

// A spectral parameter together with the square root used for it. The root
// is the principal one when built from lambda; building from mu allows
// continuation across the negative real axis.
struct SpectralPoint {
  cplx lambda;
  cplx mu;

  static SpectralPoint from_lambda(cplx lambda);
  static SpectralPoint from_mu(cplx mu) { return {mu * mu, mu}; }
  SpectralPoint conj() const { return {std::conj(lambda), std::conj(mu)}; }
};

}  // namespace pf
