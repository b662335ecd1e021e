#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fj/model.hpp"

namespace fj {

struct Probabilities {
  std::array<double, 4> p{};
  double total = 0.0;

  static Probabilities of(const Amplitudes& a);
};

// Time series of states with cached probabilities. Times are strictly
// increasing; append() enforces it.
class Trajectory {
 public:
  Trajectory() = default;

  void reserve(std::size_t n);
  // Throws ConfigError when s.t does not exceed the last sample time.
  void append(const StateVector& s);

  std::size_t size() const noexcept { return states_.size(); }
  bool empty() const noexcept { return states_.empty(); }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<StateVector>& states() const noexcept { return states_; }
  const std::vector<Probabilities>& probabilities() const noexcept {
    return probabilities_;
  }

  const StateVector& back() const { return states_.back(); }

 private:
  std::vector<double> times_;
  std::vector<StateVector> states_;
  std::vector<Probabilities> probabilities_;
};

}  // namespace fj
