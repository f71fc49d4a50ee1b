#include "discrete.hpp"

#include <algorithm>
#include <cmath>

#include "pulledfront/error.hpp"

namespace pf::detail {

int DiscreteOperator::nearest(double xq) const {
  const int k = static_cast<int>(std::lround((xq + L) / h)) - 1;
  return std::clamp(k, 0, static_cast<int>(x.size()) - 1);
}

DiscreteOperator weighted_operator(const CoefficientField& field, double L, int n) {
  if (!(L > 0.0) || n < 4) throw Error(ErrorKind::ConfigInvalid, "need L > 0 and n >= 4");
  const auto& p = field.params();
  const auto& dc = field.constants();
  const auto& w = field.weight();
  DiscreteOperator op;
  op.L = L;
  op.n = n;
  op.h = 2.0 * L / n;
  const double h = op.h, s = p.sigma, c = dc.c_star;
  const int m = n - 1;
  op.x.resize(m);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(8 * m);
  for (int i = 0; i < m; ++i) {
    const double x = -L + (i + 1) * h;
    op.x[i] = x;
    double U, W;
    field.profile_at(x, U, W);
    const double au = c + 2.0 * w.dlog(x), av = c + 2.0 * s * w.dlog(x);
    const int ip = 2 * i, iq = 2 * i + 1;
    trip.emplace_back(ip, ip, -2.0 / (h * h) + field.zeta_u(x));
    trip.emplace_back(ip, iq, -p.a * U);
    trip.emplace_back(iq, iq, -2.0 * s / (h * h) + field.zeta_v(x));
    trip.emplace_back(iq, ip, -p.r * p.b * (1.0 + W));
    if (i > 0) {
      trip.emplace_back(ip, ip - 2, 1.0 / (h * h) - au / (2.0 * h));
      trip.emplace_back(iq, iq - 2, s / (h * h) - av / (2.0 * h));
    }
    if (i + 1 < m) {
      trip.emplace_back(ip, ip + 2, 1.0 / (h * h) + au / (2.0 * h));
      trip.emplace_back(iq, iq + 2, s / (h * h) + av / (2.0 * h));
    }
  }
  op.M.resize(2 * m, 2 * m);
  op.M.setFromTriplets(trip.begin(), trip.end());
  op.M.makeCompressed();
  return op;
}

}  // namespace pf::detail
