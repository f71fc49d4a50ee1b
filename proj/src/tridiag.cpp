#include "tridiag.hpp"

#include <lapacke.h>

#include "pulledfront/error.hpp"

namespace pf::detail {

Tridiagonal::Tridiagonal(std::vector<double> lower, std::vector<double> diag,
                         std::vector<double> upper)
    : dl_(std::move(lower)), d_(std::move(diag)), du_(std::move(upper)) {
  const int n = size();
  du2_.assign(n > 2 ? n - 2 : 1, 0.0);
  ipiv_.assign(n, 0);
  const int info = LAPACKE_dgttrf(n, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data());
  if (info != 0) throw Error(ErrorKind::SolveFailed, "tridiagonal factorization failed");
}

void Tridiagonal::solve_in_place(std::vector<double>& rhs) const {
  const int n = size();
  const int info = LAPACKE_dgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl_.data(), d_.data(), du_.data(),
                                  du2_.data(), ipiv_.data(), rhs.data(), n);
  if (info != 0) throw Error(ErrorKind::SolveFailed, "tridiagonal solve failed");
}

}  // namespace pf::detail
