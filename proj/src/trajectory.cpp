#include "fj/trajectory.hpp"

#include "fj/errors.hpp"

namespace fj {

Probabilities Probabilities::of(const Amplitudes& a) {
  Probabilities out;
  for (std::size_t k = 0; k < 4; ++k) {
    out.p[k] = std::norm(a[k]);
    out.total += out.p[k];
  }
  return out;
}

void Trajectory::reserve(std::size_t n) {
  times_.reserve(n);
  states_.reserve(n);
  probabilities_.reserve(n);
}

void Trajectory::append(const StateVector& s) {
  if (!times_.empty() && !(s.t > times_.back())) {
    throw ConfigError("trajectory times must be strictly increasing");
  }
  times_.push_back(s.t);
  states_.push_back(s);
  probabilities_.push_back(Probabilities::of(s.a));
}

}  // namespace fj
