#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fj/model.hpp"

namespace fj {

inline constexpr double kDefaultClassifyTolerance = 1e-8;

// Stability taxonomy by the signs of Im E_p:
//   A  all zero                      periodic, stable
//   B  some zero, the rest negative  total probability saturates
//   C  all negative                  decays to zero
//   D  any positive                  exponential growth
enum class StabilityCase { A_stable_real, B_stable_mixed, C_all_decay, D_unstable };

std::string_view to_string(StabilityCase c);
// Accepts the full enumerator name or its letter ("A".."D").
StabilityCase stability_case_from_string(std::string_view s);

inline bool is_stable(StabilityCase c) {
  return c == StabilityCase::A_stable_real || c == StabilityCase::B_stable_mixed;
}

struct StabilityVerdict {
  StabilityCase kind = StabilityCase::A_stable_real;
  double max_im = 0.0;
  Spectrum spectrum{};
};

StabilityVerdict classify(const Spectrum& spectrum,
                          double tol = kDefaultClassifyTolerance);

// Balanced gain-loss, even n: rho = 2 sqrt(beta^2 - j0^2 - j+^2).
// Throws WrongParityError for odd n.
Complex rho_even(const EffectiveCouplings& c, double beta);

struct RhoPair {
  Complex plus;   // 2 sqrt(beta^2 - (|j0| + |j+|)^2)
  Complex minus;  // 2 sqrt(beta^2 - (|j0| - |j+|)^2)
};

// Balanced gain-loss, odd n. Throws WrongParityError for even n.
RhoPair rho_odd(const EffectiveCouplings& c, double beta);

// Balanced stability threshold: sqrt(j0^2 + j+^2) for even n and
// ||j0| - |j+|| for odd n. Case A holds for beta strictly below it.
double boundary_beta(const EffectiveCouplings& c);

// Sign of this decides balanced stability: negative or zero is Case A.
// Even: beta^2 - j0^2 - j+^2.  Odd: beta^2 - (|j0| - |j+|)^2.
double balanced_discriminant(const EffectiveCouplings& c, double beta);

struct EquilibriumCondition {
  std::string name;         // even, cat1_i, cat1_ii, cat1_iii, cat2_i, cat2_ii
  std::string description;
  bool satisfied = false;
  double residual = 0.0;    // |product condition| mismatch
  Spectrum simplified{};    // reduced spectrum implied by the condition
};

struct EquilibriumReport {
  EffectiveCouplings couplings;
  double tolerance = 0.0;
  std::vector<EquilibriumCondition> conditions;
  Spectrum spectrum{};         // closed-form spectrum at the given parameters
  StabilityVerdict verdict;    // of the reduced spectrum when a condition holds, else of `spectrum`
  bool stable = false;         // some condition holds and its reduced spectrum is A or B

  const EquilibriumCondition* find(std::string_view name) const;
};

// Checks the unbalanced equilibrium conditions (products of gain and loss
// against the effective couplings). Throws PrerequisiteError when
// beta_r < beta_l.
EquilibriumReport equilibrium_check(const SystemParams& p, double tol = 1e-6);

// Loss that balances the couplings for a given gain: beta_r = (j0^2 + j+^2) /
// beta_l for even n, (|j0| - |j+|)^2 / beta_l for odd n.
double equilibrium_beta_r(const EffectiveCouplings& c, double beta_l);

// Gain for a fixed loss/gain ratio r on the same curve:
// beta_l = sqrt(coupling term / r).
double equilibrium_beta_l_for_ratio(const EffectiveCouplings& c, double ratio);

}  // namespace fj
