#include <doctest.h>

#include <cmath>

#include "pulledfront/error.hpp"
#include "pulledfront/evans.hpp"

using namespace pf;

namespace {
const CoefficientField& field() {
  static const ModelParameters p;
  static const DerivedConstants dc = make_constants(p);
  static const FrontProfile prof = solve_front(p, dc, 80.0, 8000, 1e-10);
  static const CoefficientField F = build_coefficient_field(prof, dc);
  return F;
}
}  // namespace

TEST_SUITE("evans") {

TEST_CASE("conjugate symmetry") {
  const auto& F = field();
  const auto a = evans(F, SpectralPoint::from_lambda({0.3, 0.7}));
  const auto b = evans(F, SpectralPoint::from_lambda({0.3, -0.7}));
  CHECK(std::abs(a.W() - std::conj(b.W())) < 1e-9 * std::abs(a.W()));
}

TEST_CASE("limit at the origin") {
  const auto& F = field();
  const auto z = evans_at_zero(F);
  CHECK(z.normalized_direct > 1e-2);
  CHECK(std::abs(z.extrapolated - z.direct) < 0.1 * std::abs(z.direct));
  CHECK(std::abs(z.direct.imag()) < 1e-9 * std::abs(z.direct));
  const auto fit = mu_circle_fit(F);
  CHECK(fit.residual < 1e-6);
  CHECK(std::abs(fit.coefficients.front() - z.direct) < 1e-4 * std::abs(z.direct));
}

TEST_CASE("contour is closed and avoids the borders") {
  const auto& F = field();
  const auto cfg = default_contour(F.constants());
  const auto pieces = contour_pieces(cfg);
  REQUIRE(pieces.size() == 6);
  for (size_t k = 0; k < pieces.size(); ++k) {
    const cplx end = pieces[k].at(1.0), start = pieces[(k + 1) % pieces.size()].at(0.0);
    CHECK(std::abs(end - start) < 1e-12 * std::max(1.0, std::abs(end)));
    for (double s : {0.1, 0.5, 0.9})
      CHECK(right_of_borders(pieces[k].at(s), F.params(), F.constants()));
  }
}

TEST_CASE("argument principle on known functions") {
  const auto& F = field();
  const auto cfg = default_contour(F.constants());
  CHECK(winding_of([](cplx l) { return cplx(1.0) + 0.0 * l; }, cfg).winding == 0);
  CHECK(winding_of([](cplx l) { return l - 0.5; }, cfg).winding == 1);
  CHECK(winding_of([](cplx l) { return (l - 2.0) * (l - cplx(0.1, 3.0)) * (l - cplx(0.1, -3.0)); }, cfg)
            .winding == 3);
  // a zero left of the sector is outside
  CHECK(winding_of([](cplx l) { return l + 5.0; }, cfg).winding == 0);
}

TEST_CASE("discrete operator has no unstable eigenvalues") {
  const auto& F = field();
  const auto s = discrete_spectrum_oracle(F, 60.0, 2000);
  CHECK(s.max_real() < 0.0);
  for (cplx l : s.essential) CHECK(l.real() < 0.0);
}

}
