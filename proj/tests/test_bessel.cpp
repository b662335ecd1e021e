#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fj/bessel.hpp"
#include "fj/errors.hpp"

namespace {

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt. The integrand is smooth
// and periodic, so the trapezoid rule converges geometrically.
double bessel_integral(int n, double x) {
  const int m = 4000;
  const double h = std::numbers::pi / m;
  double sum = 0.5 * (std::cos(0.0) + std::cos(n * std::numbers::pi));
  for (int k = 1; k < m; ++k) {
    const double t = k * h;
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum * h / std::numbers::pi;
}

}  // namespace

TEST_SUITE("bessel") {

TEST_CASE("quoted values") {
  CHECK(fj::bessel_j(0, 0.0) == 1.0);
  CHECK(std::fabs(fj::bessel_j(2, 1.5) - 0.232088) < 1e-5);
  CHECK(std::fabs(fj::bessel_j(0, 1.5) - 0.5118) < 1e-3);
  CHECK(std::fabs(std::fabs(fj::bessel_j(0, 3.8317)) - 0.40276) < 1e-4);
  CHECK(std::fabs(std::fabs(fj::bessel_j(1, 2.4048)) - 0.51915) < 1e-4);
  CHECK(std::fabs(fj::bessel_j(2, 5.1356)) < 1e-4);
}

TEST_CASE("matches the integral representation") {
  double worst = 0.0;
  for (int n = 0; n <= 12; ++n) {
    for (double x = 0.0; x <= 100.0; x += 0.37) {
      worst = std::max(worst, std::fabs(fj::bessel_j(n, x) - bessel_integral(n, x)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("matches std::cyl_bessel_j") {
  double worst = 0.0;
  for (int n : {0, 1, 2, 3, 5, 8, 20, 40, 64}) {
    for (double x = 0.05; x <= 100.0; x += 0.61) {
      const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
      worst = std::max(worst, std::fabs(fj::bessel_j(n, x) - ref));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("large arguments use the recurrence branch") {
  for (double x : {150.0, 700.0, 2500.0, 1e4}) {
    for (int n : {0, 1, 7}) {
      CHECK(std::fabs(fj::bessel_j(n, x) - std::cyl_bessel_j(static_cast<double>(n), x)) < 1e-10);
    }
  }
}

TEST_CASE("parity by reduction") {
  for (int n = 0; n <= 10; ++n) {
    for (double x : {0.3, 1.5, 4.0, 13.0, 37.5}) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      CHECK(fj::bessel_j(-n, x) == sign * fj::bessel_j(n, x));
      CHECK(fj::bessel_j(n, -x) == sign * fj::bessel_j(n, x));
    }
  }
}

TEST_CASE("three-term recurrence") {
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    for (double x = 0.1; x <= 50.0; x += 0.07) {
      const double r = fj::bessel_j(n - 1, x) + fj::bessel_j(n + 1, x) - 2.0 * n / x * fj::bessel_j(n, x);
      worst = std::max(worst, std::fabs(r));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("normalization sum") {
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    double s = fj::bessel_j(0, x) * fj::bessel_j(0, x);
    for (int k = 1; k <= 40; ++k) s += 2.0 * fj::bessel_j(k, x) * fj::bessel_j(k, x);
    CHECK(std::fabs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(fj::bessel_j(65, 1.0), fj::UnsupportedOrderError);
  CHECK_THROWS_AS(fj::bessel_j(-65, 1.0), fj::UnsupportedOrderError);
  CHECK_THROWS_AS(fj::bessel_j(0, NAN), fj::DomainError);
  CHECK_THROWS_AS(fj::bessel_j(0, INFINITY), fj::DomainError);
  CHECK_THROWS_AS(fj::bessel_j(0, 1.5e4), fj::DomainError);
  CHECK_NOTHROW(fj::bessel_j(64, 1.0));
}

}
