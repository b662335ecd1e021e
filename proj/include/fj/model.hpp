#pragma once

#include <array>
#include <complex>
#include <span>

#include <Eigen/Core>

namespace fj {

using Complex = std::complex<double>;
using Amplitudes = std::array<Complex, 4>;
using Spectrum = std::array<Complex, 4>;
using Matrix4 = Eigen::Matrix<Complex, 4, 4>;

// Dimensionless model parameters, frequencies in units of the reference
// frequency. Basis order: |0,up>, |down,0>, |up,0>, |0,down>.
struct SystemParams {
  double nu = 1.0;       // bare tunnelling rate
  double lambda = 0.0;   // spin-orbit coupling strength
  double zeeman = 0.0;   // Zeeman field Omega
  double omega = 1.0;    // driving frequency
  double epsilon = 0.0;  // driving amplitude
  double beta_l = 0.0;   // gain, left well
  double beta_r = 0.0;   // loss, right well

  // Throws ConfigError on omega <= 0, nu < 0, negative gain/loss or
  // non-finite fields.
  void validate() const;

  double two_eps_over_omega() const { return 2.0 * epsilon / omega; }
  double period() const;
  bool balanced() const { return beta_l == beta_r; }

  // Integer Omega/omega. Throws ResonanceError when the ratio is more than
  // 1e-9 away from an integer.
  int resonance_order() const;

  void set_two_eps_over_omega(double ratio) { epsilon = 0.5 * ratio * omega; }
  void set_beta(double beta) { beta_l = beta_r = beta; }
};

// Cycle-averaged couplings of the resonant effective model.
struct EffectiveCouplings {
  double j0 = 0.0;       // spin-conserving: nu cos(pi lambda) J_0(2 eps/omega)
  double j_plus = 0.0;   // spin-flipping:  nu sin(pi lambda) J_n(2 eps/omega)
  double j_minus = 0.0;  // spin-flipping:  nu sin(pi lambda) J_-n(2 eps/omega)
  int n = 0;             // resonance order Omega/omega

  bool even() const { return n % 2 == 0; }
};

struct StateVector {
  Amplitudes a{};
  double t = 0.0;

  double probability(std::size_t k) const { return std::norm(a[k]); }
  double total_probability() const;

  // Basis state k in 1..4 at time t. Throws ConfigError otherwise.
  static StateVector basis(int k, double t = 0.0);
};

struct QuasienergyMode {
  Complex e;
  Amplitudes vec{};  // (A, B, C, D); largest-magnitude component scaled to 1
  int index = 0;     // label p in 1..4 of the closed-form branch
};

using ModeSet = std::array<QuasienergyMode, 4>;

struct FloquetSolutionSet {
  ModeSet modes;
  std::array<Complex, 4> lambdas{};

  // sum_p lambda_p vec_p exp(-i E_p t), the slowly varying amplitudes d_k(t).
  Amplitudes slow_amplitudes(double t) const;
};

EffectiveCouplings effective_couplings(const SystemParams& p);

// M with i db/dt = M b for the time-independent effective model.
Matrix4 effective_matrix(const EffectiveCouplings& c, double beta_l,
                         double beta_r);

// Closed-form quasienergies in label order p = 1..4:
//   E_{1,2} = i/2 (beta_l - beta_r +- zeta_+),  E_{3,4} = i/2 (beta_l - beta_r -+ zeta_-)
// with zeta_+- = sqrt((beta_r+beta_l)^2 - 4 j0^2 - 4 j+^2 +- 4 |j0 (j+ - j-)|)
// taken on the principal branch.
Spectrum closed_form_spectrum(const EffectiveCouplings& c, double beta_l,
                              double beta_r);

// Quasienergies with eigenvectors, sorted by (Im E descending, Re E ascending).
// Eigenvectors come from the closed forms when they are well defined (odd n,
// j0 != 0, j0^2 + j+ j- != 0) and from a null-space computation otherwise.
ModeSet quasienergies(const EffectiveCouplings& c, double beta_l,
                      double beta_r);

// exp(-i phi_k(t)) for the four rotating-frame phases, zero at t = 0.
Amplitudes frame_phases(const SystemParams& p, double t);

// Envelope of one Floquet state at time t, excluding exp(-i E t).
StateVector floquet_state_amplitudes(const QuasienergyMode& mode,
                                     const SystemParams& p, double t);

// Expands the initial state in the Floquet basis. Throws DegeneracyError when
// the eigenvector matrix has condition number >= 1e12.
FloquetSolutionSet non_floquet_solution(const ModeSet& modes,
                                        const StateVector& initial);

class Trajectory;

// Effective-model evolution sampled at `times`. Throws ResonanceError or
// DegeneracyError.
Trajectory analytic_evolution(const SystemParams& p,
                              const StateVector& initial,
                              std::span<const double> times);

}  // namespace fj
