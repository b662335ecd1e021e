#pragma once

#include <cmath>
#include <numbers>

namespace fj::detail {

// cos(pi x) and sin(pi x), exact at multiples of 1/2.
inline double reduce_half_turns(double x) { return x - 2.0 * std::round(0.5 * x); }

inline double cos_pi(double x) {
  const double r = reduce_half_turns(x);
  if (r == 0.0) return 1.0;
  if (std::fabs(r) == 1.0) return -1.0;
  if (std::fabs(r) == 0.5) return 0.0;
  return std::cos(std::numbers::pi * r);
}

inline double sin_pi(double x) {
  const double r = reduce_half_turns(x);
  if (r == 0.0 || std::fabs(r) == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == -0.5) return -1.0;
  return std::sin(std::numbers::pi * r);
}

}  // namespace fj::detail
