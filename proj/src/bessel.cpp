#include "fj/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "fj/errors.hpp"

namespace fj {

namespace {

constexpr double kSeriesCutoff = 12.0;

// sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!), x >= 0, n >= 0.
double series(int n, double x) {
  const long double half = static_cast<long double>(x) / 2.0L;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= half / k;

  const long double q = -half * half;
  long double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) && k > 2) break;
  }
  return static_cast<double>(sum);
}

// Miller's algorithm: recur J_{k-1} = (2k/x) J_k - J_{k+1} downward from an
// index well above max(n, x), then normalise.
double miller(int n, double x) {
  const double top = std::max(static_cast<double>(n), x);
  int start = static_cast<int>(top + 30.0 + 12.0 * std::cbrt(top));
  if (start % 2 != 0) ++start;

  constexpr double kBig = 1e250;
  constexpr double kSmall = 1e-250;

  const double two_over_x = 2.0 / x;
  double next = 0.0;    // J_{k+1}
  double cur = 1e-300;  // J_k, arbitrary seed
  double norm = 0.0;    // J_0 + 2 sum J_2k, unnormalised
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = k * two_over_x * cur - next;
    next = cur;
    cur = prev;  // now J_{k-1}
    if (std::fabs(cur) > kBig) {
      cur *= kSmall;
      next *= kSmall;
      norm *= kSmall;
      result *= kSmall;
    }
    const int idx = k - 1;
    if (idx == n) result = cur;
    if (idx > 0 && idx % 2 == 0) norm += 2.0 * cur;
  }
  norm += cur;
  return result / norm;
}

}  // namespace

BesselOrder::BesselOrder(int n) : n_(n) {
  if (std::abs(n) > kMaxBesselOrder) {
    throw UnsupportedOrderError("Bessel order " + std::to_string(n) +
                                " exceeds the supported range |n| <= " +
                                std::to_string(kMaxBesselOrder));
  }
}

double bessel_j(BesselOrder order, double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_j: non-finite argument");
  if (std::fabs(x) > kMaxBesselArgument) {
    throw DomainError("bessel_j: |x| exceeds " +
                      std::to_string(kMaxBesselArgument));
  }

  int n = order.value();
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n % 2 != 0) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (n % 2 != 0) sign = -sign;
  }

  if (x == 0.0) return n == 0 ? sign : 0.0;
  const double value = x < kSeriesCutoff ? series(n, x) : miller(n, x);
  return sign * value;
}

}  // namespace fj
