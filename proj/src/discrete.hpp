#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "pulledfront/odesys.hpp"

namespace pf::detail {

// Centered second-order discretization of the weighted linearization on
// [-L, L] with homogeneous Dirichlet ends. Unknowns are interleaved
// (p_1, q_1, p_2, q_2, ...) over the interior nodes.
struct DiscreteOperator {
  double L = 0.0, h = 0.0;
  int n = 0;
  std::vector<double> x;  // interior nodes
  Eigen::SparseMatrix<cplx> M;

  int size() const { return static_cast<int>(M.rows()); }
  int nearest(double xq) const;
};

DiscreteOperator weighted_operator(const CoefficientField& field, double L, int n);

}  // namespace pf::detail
