#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "fj/model.hpp"
#include "fj/stability.hpp"

namespace fj {

enum class ScanParam { lambda, two_eps_over_omega, beta, beta_l, beta_r };

std::string_view to_string(ScanParam p);
ScanParam scan_param_from_string(std::string_view s);

// `beta` drives beta_l and beta_r together.
SystemParams with_param(SystemParams p, ScanParam which, double value);
double param_value(const SystemParams& p, ScanParam which);

struct Axis {
  ScanParam param = ScanParam::lambda;
  double min = 0.0;
  double max = 1.0;
  int count = 2;

  double at(int i) const {
    return min + (max - min) * static_cast<double>(i) / (count - 1);
  }
  // Throws ConfigError unless min < max, count >= 2 and both are finite.
  void validate() const;
};

enum class ScanQuantity { re_rho_even, re_rho_sum_odd, max_im_spectrum };

std::string_view to_string(ScanQuantity q);
ScanQuantity scan_quantity_from_string(std::string_view s);

struct BoundaryPoint {
  double x1;  // axis1 value
  double x2;  // axis2 value
};
using Polyline = std::vector<BoundaryPoint>;

struct ScanOptions {
  double tol = kDefaultClassifyTolerance;
  int threads = 0;            // 0: OpenMP default
  bool boundaries = true;     // extract stability boundary polylines
  double refine_tol = 1e-6;   // bisection width along the swept axis
};

// Row-major count1 x count2 grid; row i is axis1.at(i), column j axis2.at(j).
struct ScanGrid {
  SystemParams fixed;
  Axis axis1;
  Axis axis2;
  ScanQuantity quantity = ScanQuantity::max_im_spectrum;
  double tol = kDefaultClassifyTolerance;

  std::vector<double> values;         // requested scalar
  std::vector<double> discriminant;   // <= 0 inside the stable region
  std::vector<StabilityCase> verdicts;
  std::vector<std::uint8_t> boundary_cells;  // 1 next to a sign change
  std::vector<Polyline> boundaries;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(axis2.count) +
           static_cast<std::size_t>(j);
  }
  double value(int i, int j) const { return values[index(i, j)]; }
  StabilityCase verdict(int i, int j) const { return verdicts[index(i, j)]; }
  SystemParams params_at(int i, int j) const;
};

struct CellResult {
  double value = 0.0;
  double discriminant = 0.0;
  StabilityCase verdict = StabilityCase::A_stable_real;
};

// Closed-form evaluation of one parameter point.
CellResult evaluate_cell(const SystemParams& p, ScanQuantity q, double tol);

// Validates the request. Throws ConfigError (bad axes, unbalanced template
// for a balanced quantity), WrongParityError or ResonanceError.
void validate_scan(const SystemParams& tmpl, const Axis& a1, const Axis& a2,
                   ScanQuantity q);

// Grid cells and boundary crossings are evaluated with OpenMP.
ScanGrid scan(const SystemParams& tmpl, const Axis& axis1, const Axis& axis2,
              ScanQuantity quantity, const ScanOptions& opts = {});

// Single-threaded reference with identical results.
ScanGrid scan_serial(const SystemParams& tmpl, const Axis& axis1,
                     const Axis& axis2, ScanQuantity quantity,
                     const ScanOptions& opts = {});

struct DynamicsCheck {
  int i = 0;
  int j = 0;
  StabilityCase predicted = StabilityCase::A_stable_real;
  double max_total = 0.0;         // max P_total over the run (inf if diverged)
  double predicted_total = 1.0;   // effective-model max P_total, NaN at an EP
  bool conclusive = false;        // predicted_total >= 100 (unstable) or <= 5 (otherwise)
  bool consistent = false;
};

// Integrates `count` randomly chosen cells from |0,up> over `periods` driving
// periods and checks the verdict: P_total must stay below 10 where the
// effective model keeps it under 5, and exceed 10 where it predicts 100.
std::vector<DynamicsCheck> verify_dynamics(const ScanGrid& grid, int count,
                                           std::uint64_t seed,
                                           int periods = 50,
                                           int steps_per_period = 512);

}  // namespace fj
