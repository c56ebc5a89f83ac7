#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gradbif/spectral.hpp"

using namespace gradbif;
using std::numbers::pi;

namespace {

// Exact eigenvalue of the 3-point Laplacian on (0, L) with n interior nodes.
double discrete_lambda1(double L, int n) {
  const double h = L / (n + 1);
  const double s = std::sin(pi * h / (2 * L));
  return 4 * s * s / (h * h);
}

}  // namespace

TEST_CASE("principal eigenvalue: analytic targets") {
  CHECK(std::abs(principal_eigenpair(DomainSpec::interval(0, 1, 256)).lambda1 / (pi * pi) - 1) < 1e-3);
  CHECK(std::abs(principal_eigenpair(DomainSpec::rectangle(0, 1, 0, 1, 64)).lambda1 / (2 * pi * pi) - 1) <
        5e-3);
  CHECK(std::abs(principal_eigenpair(DomainSpec::interval(0, 2, 256)).lambda1 / (pi * pi / 4) - 1) < 1e-3);
}

TEST_CASE("principal eigenvalue matches the discrete closed form") {
  for (int n : {7, 64, 255}) {
    const EigenPair e = principal_eigenpair(DomainSpec::interval(0, 1, n));
    CHECK(e.lambda1 == doctest::Approx(discrete_lambda1(1, n)).epsilon(1e-10));
  }
  const EigenPair r = principal_eigenpair(DomainSpec::rectangle(0, 1, 0, 2, 31));
  CHECK(r.lambda1 ==
        doctest::Approx(discrete_lambda1(1, 31) + discrete_lambda1(2, 31)).epsilon(1e-9));
}

TEST_CASE("eigenpair invariants") {
  for (const auto& d : {DomainSpec::interval(0, 1, 128), DomainSpec::rectangle(0, 1, 0, 1, 24)}) {
    const EigenPair e = principal_eigenpair(d);
    CHECK(e.phi1.min() > 0.0);
    CHECK(e.phi1.max() == 1.0);
    const ScalarField lap = neg_laplacian(e.phi1);
    double res = 0.0, num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < lap.size(); ++k) {
      res = std::max(res, std::abs(lap[k] - e.lambda1 * e.phi1[k]));
      num += e.phi1[k] * lap[k];
      den += e.phi1[k] * e.phi1[k];
    }
    CHECK(res == doctest::Approx(e.residual).epsilon(1e-6));
    CHECK(res <= 1e-9 * (e.lambda1 + 8.0 / (d.min_h() * d.min_h())));
    CHECK(num / den == doctest::Approx(e.lambda1).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue converges at second order") {
  const double e1 = principal_eigenpair(DomainSpec::interval(0, 1, 63)).lambda1 - pi * pi;
  const double e2 = principal_eigenpair(DomainSpec::interval(0, 1, 127)).lambda1 - pi * pi;
  const double e3 = principal_eigenpair(DomainSpec::interval(0, 1, 255)).lambda1 - pi * pi;
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("boundary bounds of phi1 on the interval") {
  BoundaryBounds prev{};
  for (int n : {127, 255, 511}) {
    const BoundaryBounds b = eigen_boundary_bounds(principal_eigenpair(DomainSpec::interval(0, 1, n)));
    CHECK(0.0 < b.c1);
    CHECK(b.c1 <= b.c2);
    CHECK(b.c1 == doctest::Approx(2.0).epsilon(0.01));
    CHECK(b.c2 == doctest::Approx(pi).epsilon(0.001));
    if (prev.c2 > 0.0) {
      CHECK(b.c1 == doctest::Approx(prev.c1).epsilon(0.05));
      CHECK(b.c2 == doctest::Approx(prev.c2).epsilon(0.05));
    }
    prev = b;
  }
}

TEST_CASE("boundary bounds on the square: C2 stabilizes, C1 shrinks at the corners") {
  const BoundaryBounds a = eigen_boundary_bounds(principal_eigenpair(DomainSpec::rectangle(0, 1, 0, 1, 31)));
  const BoundaryBounds b = eigen_boundary_bounds(principal_eigenpair(DomainSpec::rectangle(0, 1, 0, 1, 63)));
  CHECK(0.0 < b.c1);
  CHECK(b.c1 <= b.c2);
  CHECK(b.c2 == doctest::Approx(a.c2).epsilon(0.05));
  // corner-adjacent node: φ₁/dist ≈ π² h, halving with h
  CHECK(a.c1 / b.c1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("boundary_ratios of an explicit field") {
  const auto d = DomainSpec::interval(0, 1, 3);
  const BoundaryBounds b = boundary_ratios(ScalarField(d, {0.25, 1.0, 0.5}));
  CHECK(b.c1 == 1.0);
  CHECK(b.c2 == 2.0);
}
