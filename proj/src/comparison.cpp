#include "fj/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "fj/errors.hpp"

namespace fj {

DeviationReport compare_trajectories(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) {
    throw AlignmentError("trajectories have different sample counts");
  }
  DeviationReport r;
  for (std::size_t s = 0; s < a.size(); ++s) {
    const double ta = a.times()[s];
    const double tb = b.times()[s];
    if (std::fabs(ta - tb) > 1e-9 * std::max({1.0, std::fabs(ta), std::fabs(tb)})) {
      throw AlignmentError("trajectory time grids differ");
    }
    const auto& sa = a.states()[s];
    const auto& sb = b.states()[s];
    const auto& pa = a.probabilities()[s];
    const auto& pb = b.probabilities()[s];
    for (std::size_t k = 0; k < 4; ++k) {
      const double da = std::abs(sa.a[k] - sb.a[k]);
      if (da > r.max_abs_amplitude_dev) {
        r.max_abs_amplitude_dev = da;
        r.time_of_max = ta;
      }
      r.max_abs_probability_dev =
          std::max(r.max_abs_probability_dev, std::fabs(pa.p[k] - pb.p[k]));
    }
    r.max_abs_probability_dev =
        std::max(r.max_abs_probability_dev, std::fabs(pa.total - pb.total));
  }
  return r;
}

AsymptoticEstimate asymptotic_total_probability(const Trajectory& traj,
                                                double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 0.5)) {
    throw ConfigError("window_fraction must lie in (0, 0.5]");
  }
  if (traj.empty()) throw ConfigError("empty trajectory");

  const std::size_t n = traj.size();
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(window_fraction * static_cast<double>(n))));
  const std::size_t first = n - window;

  AsymptoticEstimate est;
  est.samples = window;
  double sum = 0.0;
  for (std::size_t s = first; s < n; ++s) {
    const double p = traj.probabilities()[s].total;
    if (!std::isfinite(p)) {
      throw DivergenceError("non-finite total probability in averaging window",
                            traj.times()[s]);
    }
    sum += p;
  }
  est.mean = sum / static_cast<double>(window);
  double var = 0.0;
  for (std::size_t s = first; s < n; ++s) {
    const double d = traj.probabilities()[s].total - est.mean;
    var += d * d;
  }
  est.stddev = std::sqrt(var / static_cast<double>(window));
  return est;
}

}  // namespace fj
