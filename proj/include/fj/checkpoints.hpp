#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fj/model.hpp"
#include "fj/scan.hpp"

namespace fj {

// Reference parameter sets of the stability and dynamics figures.
namespace figures {

// Balanced, nu = 1, omega = 50, Omega = n omega.
SystemParams balanced(int n, double beta, double two_eps_over_omega, double lambda);

SystemParams fig7(double beta_l, double beta_r);    // n = 2, lambda = 1/3, eps = 75
SystemParams fig8a();                               // n = 1, cat. 1(i)
SystemParams fig8b();                               // n = 1, cat. 1(ii), beta_r = 3 beta_l
SystemParams fig8cd();                              // n = 1, cat. 1(iii)
SystemParams fig9(double beta_l, double beta_r);    // n = 1, lambda = 1/4, eps = 100

}  // namespace figures

struct CheckResult {
  std::string id;
  std::string description;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // absolute; 0 for boolean checks
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  // When set, scan JSON and trajectory CSV files backing the checks are
  // written here.
  std::optional<std::string> artifacts_dir;
  int threads = 0;
};

// Figure-level checkpoints: Bessel values, boundary identities, equilibrium
// derivations, asymptotic totals, CDT/decay split, the Fig. 1 dynamics and
// the even/odd scan topology, plus the spectrum and propagator cross-checks.
std::vector<CheckResult> run_figure_suite(const SuiteOptions& opts = {});

// True if some 4-connected component of stable cells touches both the first
// and the last row (axis1 extremes) and contains a column with axis2 <= max_axis2.
// Writes the smallest such axis2 value to `lowest` when non-null.
bool has_spanning_stable_region(const ScanGrid& g, double max_axis2,
                                double* lowest = nullptr);

}  // namespace fj
