#pragma once

#include <cstddef>

#include "fj/trajectory.hpp"

namespace fj {

struct DeviationReport {
  double max_abs_amplitude_dev = 0.0;
  double max_abs_probability_dev = 0.0;
  double time_of_max = 0.0;  // sample with the largest amplitude deviation
};

// Component-wise maximum deviations over a shared time grid. Throws
// AlignmentError when sizes differ or times disagree beyond 1e-9 relative.
DeviationReport compare_trajectories(const Trajectory& a, const Trajectory& b);

struct AsymptoticEstimate {
  double mean = 0.0;    // mean P_total over the trailing window
  double stddev = 0.0;  // convergence diagnostic
  std::size_t samples = 0;
};

// Mean of P_total over the last window_fraction of the samples. Throws
// ConfigError for window_fraction outside (0, 0.5] and DivergenceError for
// non-finite values inside the window.
AsymptoticEstimate asymptotic_total_probability(const Trajectory& traj,
                                                double window_fraction = 0.2);

}  // namespace fj
