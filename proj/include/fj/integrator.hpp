#pragma once

#include "fj/model.hpp"
#include "fj/trajectory.hpp"

namespace fj {

inline constexpr double kDivergenceThreshold = 1e150;

struct IntegrationConfig {
  int steps_per_period = 512;  // RK4 step h = tau / steps_per_period
  double t_end = 0.0;
  int sample_stride = 1;       // keep every sample_stride-th step

  // Throws ConfigError on steps_per_period < 64, sample_stride < 1 or a
  // non-finite t_end.
  void validate() const;
};

// da/dt = -i H(t) a for the driven four-state model.
Amplitudes rhs(const SystemParams& p, double t, const Amplitudes& a);

// Classical fixed-step RK4 from initial.t to cfg.t_end, applied to the slow
// amplitudes a_k / frame_phases(p, t)_k so the Zeeman and drive phases are
// exact; samples are reported in the lab frame. The first sample is
// the initial state; the last step lands within h/2 of t_end and is always
// kept. Throws DivergenceError once any |a_k| exceeds kDivergenceThreshold.
Trajectory propagate(const SystemParams& p, const StateVector& initial,
                     const IntegrationConfig& cfg);

// One-period propagator U(tau): column q evolves basis state q from t = 0.
// Uses cfg.steps_per_period; cfg.t_end is ignored.
Matrix4 monodromy(const SystemParams& p, const IntegrationConfig& cfg);

// E = (i / tau) log(mu) for the eigenvalues mu of U, principal branch, so that
// Re E lies in (-omega/2, omega/2]. Sorted by (Im E descending, Re E ascending).
// Throws DecompositionError if U is singular.
Spectrum numerical_quasienergies(const Matrix4& u, double omega);

// Re e wrapped into (-omega/2, omega/2].
Complex fold_to_zone(Complex e, double omega);

// Distance between two quasienergies with Re taken modulo omega; plain
// complex distance when omega <= 0.
double zone_distance(Complex a, Complex b, double omega);

// Smallest max-pair zone_distance over all pairings of the two spectra.
double spectrum_distance(const Spectrum& a, const Spectrum& b, double omega);

}  // namespace fj
