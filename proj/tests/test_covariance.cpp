#include <catch2/catch.hpp>

#include <cmath>

#include "tnlab/covariance.hpp"

using namespace tnlab;

TEST_CASE("kraichnan kappa is 1/4 in d = 2 for every scale", "[covariance]") {
  for (double ell : {0.2, 0.05})
    for (double lambda : {0.5, 1.0, 2.0}) {
      auto spec = kraichnan_spec(2, ell, lambda);
      CHECK(kappa(spec) == Approx(0.25).epsilon(1e-7));
      CHECK(spectral_norm(spec, 1.0) == Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("zero density has zero kappa and zero norms", "[covariance]") {
  auto spec = zero_spec(2);
  CHECK(kappa(spec) == 0.0);
  for (double r : {1.0, 2.0, 17.0}) CHECK(spectral_norm(spec, r) == 0.0);
  CHECK(spectral_norm(spec, std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("band(1,2,1) kappa equals the annulus mass over 4", "[covariance]") {
  auto spec = band_spec(2, 1.0, 2.0, 1.0);
  // |g|_1 = pi (2^2 - 1^2) = 3 pi for the flat annulus.
  CHECK(spectral_norm(spec, 1.0) == Approx(3.0 * M_PI).epsilon(1e-9));
  CHECK(kappa(spec) == Approx(0.75 * M_PI).epsilon(1e-9));
  // Generic r: |g|_r = (pi (b^2 - a^2))^{1/r} for unit height.
  CHECK(spectral_norm(spec, 1.5) ==
        Approx(std::pow(3.0 * M_PI, 1.0 / 1.5)).epsilon(1e-9));
}

TEST_CASE("normalizing constant matches the closed form", "[covariance]") {
  // |g_ell|_1 = c * area(S^{d-1}) * (1 - 2^{-lambda}) / lambda = 1.
  for (double lambda : {0.5, 1.0, 3.0}) {
    auto spec = kraichnan_spec(2, 0.1, lambda);
    double closed = lambda / (2.0 * M_PI * (1.0 - std::pow(2.0, -lambda)));
    CHECK(spec.kraichnan_constant == Approx(closed).epsilon(1e-8));
  }
  auto spec1 = kraichnan_spec(1, 0.1, 1.0);
  CHECK(spec1.kraichnan_constant == Approx(1.0 / (2.0 * 0.5)).epsilon(1e-8));
}

TEST_CASE("kraichnan sup is c ell^d", "[covariance]") {
  for (double ell : {0.4, 0.1}) {
    auto spec = kraichnan_spec(2, ell, 1.0);
    double expected = spec.kraichnan_constant * ell * ell;
    CHECK(spectral_norm(spec, std::numeric_limits<double>::infinity()) ==
          Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("kraichnan L^r norms agree with the closed form", "[covariance]") {
  // |g_ell|_r^r = c^r ell^{-lambda r} * 2 pi * (1 - 2^{-m}) / m * ell^m,
  // m = r (d + lambda) - d, which collapses to C(r) * ell^{d(r-1)}.
  double ell = 0.2, lambda = 1.0, r = 3.0;
  auto spec = kraichnan_spec(2, ell, lambda);
  double m = r * (2.0 + lambda) - 2.0;
  double closed = std::pow(spec.kraichnan_constant, r) * 2.0 * M_PI *
                  (1.0 - std::pow(2.0, -m)) / m * std::pow(ell, m - lambda * r);
  CHECK(spectral_norm(spec, r) == Approx(std::pow(closed, 1.0 / r)).epsilon(1e-8));
}

TEST_CASE("kraichnan norm scaling exponent d(r-1)/r", "[covariance]") {
  const double r = 3.0;
  std::vector<double> ells = {0.4, 0.2, 0.1, 0.05};
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double ell : ells) {
    double x = std::log(ell);
    double y = std::log(spectral_norm(kraichnan_spec(2, ell, 1.0), r));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = ells.size();
  double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  double target = 2.0 * (r - 1.0) / r;  // 4/3
  CHECK(std::abs(slope - target) <= 0.01 * target);
}

TEST_CASE("mollified density never exceeds the base", "[covariance]") {
  auto base = band_spec(2, 1.0, 2.0, 1.0);
  auto soft = mollify(base, 4.0);
  for (double rho : {1.0, 1.3, 1.9, 2.0})
    CHECK(soft.density(rho) <= base.density(rho));
  CHECK(kappa(soft) <= kappa(base));
  CHECK(spectral_norm(soft, 1.0) < spectral_norm(base, 1.0));

  SECTION("large scale recovers the base pointwise") {
    auto barely = mollify(base, 1e12);
    for (double rho : {1.0, 1.5, 2.0})
      CHECK(barely.density(rho) == Approx(base.density(rho)).epsilon(1e-9));
  }
  SECTION("mollified zero is still zero") {
    auto z = mollify(zero_spec(2), 4.0);
    CHECK(kappa(z) == 0.0);
  }
  SECTION("stacked mollification composes the scales") {
    auto twice = mollify(mollify(base, 4.0), 4.0);
    auto once = mollify(base, 2.0);
    CHECK(twice.density(1.5) == Approx(once.density(1.5)).epsilon(1e-12));
  }
}

TEST_CASE("tabulated density interpolates and validates", "[covariance]") {
  auto spec = tabulated_spec(2, {1.0, 2.0, 3.0}, {0.0, 1.0, 0.0});
  CHECK(spec.density(1.5) == Approx(0.5));
  CHECK(spec.density(0.5) == 0.0);
  CHECK(spec.density(3.5) == 0.0);
  CHECK(spectral_norm(spec, 1.0) > 0.0);
  CHECK_THROWS_AS(tabulated_spec(2, {1.0}, {1.0}), Error);
  CHECK_THROWS_AS(tabulated_spec(2, {2.0, 1.0}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(tabulated_spec(2, {1.0, 2.0}, {1.0, -1.0}), Error);
}

TEST_CASE("kraichnan parameter validation", "[covariance]") {
  CHECK_THROWS_AS(kraichnan_spec(2, 1.5, 1.0), Error);
  CHECK_THROWS_AS(kraichnan_spec(2, 0.1, -1.0), Error);
}
