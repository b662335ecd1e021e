#include "fj/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "fj/errors.hpp"
#include "half_turns.hpp"

namespace fj {

namespace {

// Time-independent pieces of H(t); only the drive term varies.
struct Hamiltonian {
  SystemParams params;
  double conserve;  // nu cos(pi lambda)
  double flip;      // nu sin(pi lambda)

  explicit Hamiltonian(const SystemParams& p)
      : params(p),
        conserve(p.nu * detail::cos_pi(p.lambda)),
        flip(p.nu * detail::sin_pi(p.lambda)) {}

  // -i times the tunnelling and gain/loss part of H applied to a.
  Amplitudes coupling(const Amplitudes& a) const {
    const Complex gain{0.0, params.beta_l};
    const Complex loss{0.0, -params.beta_r};
    const Amplitudes h_a = {
        -conserve * a[2] - flip * a[1] + loss * a[0],
        -conserve * a[3] - flip * a[0] + gain * a[1],
        -conserve * a[0] + flip * a[3] + gain * a[2],
        -conserve * a[1] + flip * a[2] + loss * a[3],
    };
    // -i (x + iy) = y - ix
    Amplitudes out;
    for (std::size_t k = 0; k < 4; ++k) out[k] = {h_a[k].imag(), -h_a[k].real()};
    return out;
  }

  Amplitudes derivative(double t, const Amplitudes& a) const {
    const double f = params.epsilon * std::cos(params.omega * t);
    const double z = 0.5 * params.zeeman;
    const double diag[4] = {z - f, -z + f, z + f, -z - f};
    Amplitudes out = coupling(a);
    for (std::size_t k = 0; k < 4; ++k) out[k] += Complex{0.0, -diag[k]} * a[k];
    return out;
  }

  // Slow amplitudes b_k = a_k / phase_k(t). The Zeeman and drive phases are
  // integrated exactly, so RK4 only resolves the O(nu) couplings.
  Amplitudes slow_derivative(double t, const Amplitudes& b) const {
    const Amplitudes ph = frame_phases(params, t);
    Amplitudes a;
    for (std::size_t k = 0; k < 4; ++k) a[k] = ph[k] * b[k];
    Amplitudes out = coupling(a);
    for (std::size_t k = 0; k < 4; ++k) out[k] *= std::conj(ph[k]);
    return out;
  }

  Amplitudes to_slow(double t, Amplitudes a) const {
    const Amplitudes ph = frame_phases(params, t);
    for (std::size_t k = 0; k < 4; ++k) a[k] *= std::conj(ph[k]);
    return a;
  }

  Amplitudes to_lab(double t, Amplitudes b) const {
    const Amplitudes ph = frame_phases(params, t);
    for (std::size_t k = 0; k < 4; ++k) b[k] *= ph[k];
    return b;
  }

  // One RK4 step of the slow amplitudes.
  Amplitudes step(double t, double h, const Amplitudes& b) const {
    auto axpy = [](const Amplitudes& x, double s, const Amplitudes& y) {
      Amplitudes r;
      for (std::size_t k = 0; k < 4; ++k) r[k] = x[k] + s * y[k];
      return r;
    };
    const Amplitudes k1 = slow_derivative(t, b);
    const Amplitudes k2 = slow_derivative(t + 0.5 * h, axpy(b, 0.5 * h, k1));
    const Amplitudes k3 = slow_derivative(t + 0.5 * h, axpy(b, 0.5 * h, k2));
    const Amplitudes k4 = slow_derivative(t + h, axpy(b, h, k3));
    Amplitudes out;
    for (std::size_t k = 0; k < 4; ++k) {
      out[k] = b[k] + (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    return out;
  }
};

bool diverged(const Amplitudes& a) {
  return std::any_of(a.begin(), a.end(), [](Complex z) {
    return !(std::abs(z) <= kDivergenceThreshold);
  });
}

void sort_spectrum(Spectrum& e) {
  std::sort(e.begin(), e.end(), [](Complex a, Complex b) {
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() < b.real();
  });
}

}  // namespace

void IntegrationConfig::validate() const {
  if (steps_per_period < 64) throw ConfigError("steps_per_period must be >= 64");
  if (sample_stride < 1) throw ConfigError("sample_stride must be >= 1");
  if (!std::isfinite(t_end)) throw ConfigError("t_end must be finite");
}

Amplitudes rhs(const SystemParams& p, double t, const Amplitudes& a) {
  return Hamiltonian(p).derivative(t, a);
}

Trajectory propagate(const SystemParams& p, const StateVector& initial,
                     const IntegrationConfig& cfg) {
  p.validate();
  cfg.validate();
  if (cfg.t_end < initial.t) throw ConfigError("t_end precedes the initial time");

  const Hamiltonian ham(p);
  const double h = p.period() / cfg.steps_per_period;
  const double span = cfg.t_end - initial.t;
  const auto steps = static_cast<long long>(std::llround(span / h));
  if (steps > 2'000'000'000LL) throw ConfigError("integration span too long");

  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(steps / cfg.sample_stride + 2));
  traj.append(initial);

  Amplitudes b = ham.to_slow(initial.t, initial.a);
  for (long long k = 0; k < steps; ++k) {
    const double t = initial.t + static_cast<double>(k) * h;
    b = ham.step(t, h, b);
    const double t_next = initial.t + static_cast<double>(k + 1) * h;
    if (diverged(b)) {  // |a_k| = |b_k|
      throw DivergenceError("amplitude exceeded 1e150 at t = " +
                                std::to_string(t_next),
                            t_next);
    }
    if ((k + 1) % cfg.sample_stride == 0 || k + 1 == steps) {
      traj.append({ham.to_lab(t_next, b), t_next});
    }
  }
  return traj;
}

Matrix4 monodromy(const SystemParams& p, const IntegrationConfig& cfg) {
  p.validate();
  if (cfg.steps_per_period < 64) throw ConfigError("steps_per_period must be >= 64");

  const Hamiltonian ham(p);
  const double h = p.period() / cfg.steps_per_period;
  Matrix4 u;
  for (int q = 0; q < 4; ++q) {
    Amplitudes a{};
    a[static_cast<std::size_t>(q)] = 1.0;
    for (int k = 0; k < cfg.steps_per_period; ++k) {
      a = ham.step(static_cast<double>(k) * h, h, a);
      if (diverged(a)) {
        throw DivergenceError("monodromy column diverged", (k + 1) * h);
      }
    }
    a = ham.to_lab(p.period(), a);
    for (int r = 0; r < 4; ++r) u(r, q) = a[static_cast<std::size_t>(r)];
  }
  return u;
}

Spectrum numerical_quasienergies(const Matrix4& u, double omega) {
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  Eigen::ComplexEigenSolver<Matrix4> solver(u, false);
  if (solver.info() != Eigen::Success) {
    throw DecompositionError("eigen-decomposition of the propagator failed");
  }
  const double tau = 2.0 * std::numbers::pi / omega;
  Spectrum e;
  for (int p = 0; p < 4; ++p) {
    const Complex mu = solver.eigenvalues()(p);
    if (std::abs(mu) == 0.0 || !std::isfinite(std::abs(mu))) {
      throw DecompositionError("propagator is singular");
    }
    // E = (i / tau) log mu; principal log keeps arg in (-pi, pi].
    e[static_cast<std::size_t>(p)] = fold_to_zone(Complex{0.0, 1.0 / tau} * std::log(mu), omega);
  }
  sort_spectrum(e);
  return e;
}

Complex fold_to_zone(Complex e, double omega) {
  double re = std::fmod(e.real(), omega);
  if (re > 0.5 * omega) re -= omega;
  if (re <= -0.5 * omega) re += omega;
  return {re, e.imag()};
}

double zone_distance(Complex a, Complex b, double omega) {
  if (omega <= 0.0) return std::abs(a - b);
  const Complex d = fold_to_zone(a - b, omega);
  return std::abs(d);
}

double spectrum_distance(const Spectrum& a, const Spectrum& b, double omega) {
  std::array<std::size_t, 4> perm{0, 1, 2, 3};
  double best = INFINITY;
  do {
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      worst = std::max(worst, zone_distance(a[k], b[perm[k]], omega));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace fj
