#pragma once

#include <vector>

namespace pf::detail {

// Tridiagonal system factored once with LAPACK (dgttrf) and reused.
class Tridiagonal {
 public:
  Tridiagonal() = default;
  Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);

  void solve_in_place(std::vector<double>& rhs) const;
  int size() const { return static_cast<int>(d_.size()); }

 private:
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
};

}  // namespace pf::detail
