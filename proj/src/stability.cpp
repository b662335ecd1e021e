#include "fj/stability.hpp"

#include <algorithm>
#include <cmath>

#include "fj/errors.hpp"

namespace fj {

namespace {

Complex principal_sqrt(double x) { return std::sqrt(Complex{x, 0.0}); }

// Product of gain and loss that balances the couplings.
double coupling_term(const EffectiveCouplings& c) {
  if (c.even()) return c.j0 * c.j0 + c.j_plus * c.j_plus;
  const double d = std::fabs(c.j0) - std::fabs(c.j_plus);
  return d * d;
}

Spectrum two_zero_spectrum(double damping) {
  return {Complex{}, Complex{0.0, damping}, Complex{0.0, damping}, Complex{}};
}

}  // namespace

std::string_view to_string(StabilityCase c) {
  switch (c) {
    case StabilityCase::A_stable_real: return "A_stable_real";
    case StabilityCase::B_stable_mixed: return "B_stable_mixed";
    case StabilityCase::C_all_decay: return "C_all_decay";
    case StabilityCase::D_unstable: return "D_unstable";
  }
  return "?";
}

StabilityCase stability_case_from_string(std::string_view s) {
  for (auto c : {StabilityCase::A_stable_real, StabilityCase::B_stable_mixed,
                 StabilityCase::C_all_decay, StabilityCase::D_unstable}) {
    const std::string_view name = to_string(c);
    if (s == name || s == name.substr(0, 1)) return c;
  }
  throw ConfigError("unknown stability case '" + std::string(s) + "'");
}

StabilityVerdict classify(const Spectrum& spectrum, double tol) {
  StabilityVerdict v;
  v.spectrum = spectrum;
  v.max_im = -INFINITY;
  bool any_zero = false;
  bool any_negative = false;
  bool any_positive = false;
  for (const Complex& e : spectrum) {
    const double s = e.imag();
    v.max_im = std::max(v.max_im, s);
    if (s > tol) {
      any_positive = true;
    } else if (s < -tol) {
      any_negative = true;
    } else {
      any_zero = true;
    }
  }
  if (any_positive) {
    v.kind = StabilityCase::D_unstable;
  } else if (!any_negative) {
    v.kind = StabilityCase::A_stable_real;
  } else if (any_zero) {
    v.kind = StabilityCase::B_stable_mixed;
  } else {
    v.kind = StabilityCase::C_all_decay;
  }
  return v;
}

Complex rho_even(const EffectiveCouplings& c, double beta) {
  if (!c.even()) throw WrongParityError("rho_even requires even Omega/omega");
  return 2.0 * principal_sqrt(beta * beta - c.j0 * c.j0 - c.j_plus * c.j_plus);
}

RhoPair rho_odd(const EffectiveCouplings& c, double beta) {
  if (c.even()) throw WrongParityError("rho_odd requires odd Omega/omega");
  const double sum = std::fabs(c.j0) + std::fabs(c.j_plus);
  const double diff = std::fabs(c.j0) - std::fabs(c.j_plus);
  return {2.0 * principal_sqrt(beta * beta - sum * sum),
          2.0 * principal_sqrt(beta * beta - diff * diff)};
}

double boundary_beta(const EffectiveCouplings& c) {
  if (c.even()) return std::hypot(c.j0, c.j_plus);
  return std::fabs(std::fabs(c.j0) - std::fabs(c.j_plus));
}

double balanced_discriminant(const EffectiveCouplings& c, double beta) {
  return beta * beta - coupling_term(c);
}

double equilibrium_beta_r(const EffectiveCouplings& c, double beta_l) {
  if (!(beta_l > 0.0)) throw ConfigError("beta_l must be positive");
  return coupling_term(c) / beta_l;
}

double equilibrium_beta_l_for_ratio(const EffectiveCouplings& c, double ratio) {
  if (!(ratio > 0.0)) throw ConfigError("loss/gain ratio must be positive");
  return std::sqrt(coupling_term(c) / ratio);
}

const EquilibriumCondition* EquilibriumReport::find(std::string_view name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

EquilibriumReport equilibrium_check(const SystemParams& p, double tol) {
  const EffectiveCouplings c = effective_couplings(p);
  const double bl = p.beta_l;
  const double br = p.beta_r;
  if (br < bl) {
    throw PrerequisiteError("equilibrium requires loss beta_r >= gain beta_l");
  }

  EquilibriumReport report;
  report.couplings = c;
  report.tolerance = tol;
  report.spectrum = closed_form_spectrum(c, bl, br);
  report.verdict = classify(report.spectrum);

  const double product = br * bl;
  const double damping = bl - br;
  const double a0 = std::fabs(c.j0);
  const double an = std::fabs(c.j_plus);

  if (c.even()) {
    EquilibriumCondition even;
    even.name = "even";
    even.description = "beta_r beta_l = J0^2 + Jn^2";
    even.residual = std::fabs(product - (c.j0 * c.j0 + c.j_plus * c.j_plus));
    even.satisfied = even.residual <= tol;
    even.simplified = two_zero_spectrum(damping);
    report.conditions.push_back(even);
  } else {
    EquilibriumCondition i;
    i.name = "cat1_i";
    i.description = "Jn = 0 and beta_r beta_l = J0^2";
    i.residual = std::max(an, std::fabs(product - c.j0 * c.j0));
    i.satisfied = i.residual <= tol;
    i.simplified = two_zero_spectrum(damping);
    report.conditions.push_back(i);

    EquilibriumCondition ii;
    ii.name = "cat1_ii";
    ii.description = "J0 = 0 and beta_r beta_l = Jn^2";
    ii.residual = std::max(a0, std::fabs(product - c.j_plus * c.j_plus));
    ii.satisfied = ii.residual <= tol;
    ii.simplified = two_zero_spectrum(damping);
    report.conditions.push_back(ii);

    EquilibriumCondition iii;
    iii.name = "cat1_iii";
    iii.description = "J0 = Jn = 0 and beta_l = 0";
    iii.residual = std::max({a0, an, bl});
    iii.satisfied = iii.residual <= tol;
    iii.simplified = two_zero_spectrum(-br);
    report.conditions.push_back(iii);

    const double diff = a0 - an;
    const double sum = a0 + an;
    const double product_residual = std::fabs(diff * diff - product);
    const double radicand = (bl + br) * (bl + br) - 4.0 * sum * sum;
    const Complex rho_plus = principal_sqrt(radicand);
    const Spectrum cat2_spectrum = {
        Complex{}, Complex{0.0, damping},
        Complex{-0.5 * rho_plus.imag(), 0.5 * (damping - rho_plus.real())},
        Complex{0.5 * rho_plus.imag(), 0.5 * (damping + rho_plus.real())}};

    EquilibriumCondition c2i;
    c2i.name = "cat2_i";
    c2i.description =
        "(|J0| - |Jn|)^2 = beta_r beta_l and (beta_l + beta_r)^2 < 4 (|J0| + |Jn|)^2";
    c2i.residual = product_residual;
    c2i.satisfied = product_residual <= tol && radicand < 0.0;
    c2i.simplified = cat2_spectrum;
    report.conditions.push_back(c2i);

    EquilibriumCondition c2ii;
    c2ii.name = "cat2_ii";
    c2ii.description =
        "(|J0| - |Jn|)^2 = beta_r beta_l and 0 <= rho'_+ < beta_r - beta_l";
    c2ii.residual = product_residual;
    c2ii.satisfied = product_residual <= tol && radicand >= 0.0 &&
                     rho_plus.real() < br - bl;
    c2ii.simplified = cat2_spectrum;
    report.conditions.push_back(c2ii);
  }

  // A satisfied condition replaces the raw spectrum by its reduced form, so a
  // beta quoted to four digits does not turn E = 0 into a tiny decay.
  bool reduced = false;
  for (const auto& cond : report.conditions) {
    if (!cond.satisfied) continue;
    const StabilityVerdict v = classify(cond.simplified);
    if (is_stable(v.kind)) {
      report.stable = true;
      report.verdict = v;
      break;
    }
    if (!reduced) report.verdict = v;
    reduced = true;
  }
  return report;
}

}  // namespace fj
