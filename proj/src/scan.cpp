#include "fj/scan.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include <omp.h>

#include "fj/errors.hpp"
#include "fj/integrator.hpp"

namespace fj {

namespace {

bool is_balanced_quantity(ScanQuantity q) {
  return q == ScanQuantity::re_rho_even || q == ScanQuantity::re_rho_sum_odd;
}

bool overlaps(ScanParam a, ScanParam b) {
  if (a == b) return true;
  auto is_beta = [](ScanParam p) {
    return p == ScanParam::beta || p == ScanParam::beta_l || p == ScanParam::beta_r;
  };
  return is_beta(a) && is_beta(b) &&
         (a == ScanParam::beta || b == ScanParam::beta);
}

// Sign change of the discriminant along one grid edge.
struct Crossing {
  std::size_t edge;  // edge id
  BoundaryPoint point;
};

// Edge ids: axis2-direction edges (i,j)-(i,j+1) first, then axis1-direction
// edges (i,j)-(i+1,j).
struct EdgeLayout {
  int n1;
  int n2;
  std::size_t along2(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n2 - 1) +
           static_cast<std::size_t>(j);
  }
  std::size_t along1(int i, int j) const {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2 - 1) +
           static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) +
           static_cast<std::size_t>(j);
  }
  std::size_t total() const {
    return static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2 - 1) +
           static_cast<std::size_t>(n1 - 1) * static_cast<std::size_t>(n2);
  }
};

bool unstable_side(double f) { return f > 0.0; }

// Bisection on the discriminant between two grid nodes that differ in one axis.
BoundaryPoint refine(const ScanGrid& g, int i0, int j0, int i1, int j1,
                     double refine_tol) {
  const bool along_axis2 = i0 == i1;
  const Axis& axis = along_axis2 ? g.axis2 : g.axis1;
  double lo = along_axis2 ? g.axis2.at(j0) : g.axis1.at(i0);
  double hi = along_axis2 ? g.axis2.at(j1) : g.axis1.at(i1);
  const SystemParams base = g.params_at(i0, j0);
  const bool lo_side = unstable_side(g.discriminant[g.index(i0, j0)]);

  auto f = [&](double x) {
    return evaluate_cell(with_param(base, axis.param, x), g.quantity, g.tol)
        .discriminant;
  };
  while (std::fabs(hi - lo) > refine_tol) {
    const double mid = 0.5 * (lo + hi);
    if (unstable_side(f(mid)) == lo_side) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  if (along_axis2) return {g.axis1.at(i0), x};
  return {x, g.axis2.at(j0)};
}

// Enumerates the crossing edges in a fixed order.
struct EdgeTask {
  int i0, j0, i1, j1;
  std::size_t id;
};

std::vector<EdgeTask> crossing_edges(const ScanGrid& g) {
  const EdgeLayout layout{g.axis1.count, g.axis2.count};
  std::vector<EdgeTask> tasks;
  auto side = [&](int i, int j) { return unstable_side(g.discriminant[g.index(i, j)]); };
  for (int i = 0; i < layout.n1; ++i) {
    for (int j = 0; j + 1 < layout.n2; ++j) {
      if (side(i, j) != side(i, j + 1)) tasks.push_back({i, j, i, j + 1, layout.along2(i, j)});
    }
  }
  for (int i = 0; i + 1 < layout.n1; ++i) {
    for (int j = 0; j < layout.n2; ++j) {
      if (side(i, j) != side(i + 1, j)) tasks.push_back({i, j, i + 1, j, layout.along1(i, j)});
    }
  }
  return tasks;
}

// Marching squares over refined crossings, chained into polylines.
std::vector<Polyline> link_crossings(const ScanGrid& g,
                                     const std::vector<EdgeTask>& tasks,
                                     const std::vector<BoundaryPoint>& points) {
  const EdgeLayout layout{g.axis1.count, g.axis2.count};
  std::vector<std::optional<BoundaryPoint>> at_edge(layout.total());
  for (std::size_t k = 0; k < tasks.size(); ++k) at_edge[tasks[k].id] = points[k];

  auto node = [&](int i, int j) { return g.discriminant[g.index(i, j)]; };

  std::vector<std::pair<std::size_t, std::size_t>> segments;
  for (int i = 0; i + 1 < layout.n1; ++i) {
    for (int j = 0; j + 1 < layout.n2; ++j) {
      // corners c0=(i,j) c1=(i,j+1) c2=(i+1,j+1) c3=(i+1,j); edge e_k joins c_k, c_k+1
      const std::size_t e[4] = {layout.along2(i, j), layout.along1(i, j + 1),
                                layout.along2(i + 1, j), layout.along1(i, j)};
      std::size_t hit[4];
      int n = 0;
      for (std::size_t id : e) {
        if (at_edge[id]) hit[n++] = id;
      }
      if (n == 2) {
        segments.emplace_back(hit[0], hit[1]);
      } else if (n == 4) {
        const double centre =
            0.25 * (node(i, j) + node(i, j + 1) + node(i + 1, j + 1) + node(i + 1, j));
        if (unstable_side(centre) == unstable_side(node(i, j))) {
          segments.emplace_back(e[0], e[1]);
          segments.emplace_back(e[2], e[3]);
        } else {
          segments.emplace_back(e[3], e[0]);
          segments.emplace_back(e[1], e[2]);
        }
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].first].push_back(s);
    incident[segments[s].second].push_back(s);
  }

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> lines;
  auto walk = [&](std::size_t start_edge) {
    Polyline line{*at_edge[start_edge]};
    std::size_t cur = start_edge;
    for (;;) {
      std::optional<std::size_t> next_seg;
      for (std::size_t s : incident[cur]) {
        if (!used[s]) {
          next_seg = s;
          break;
        }
      }
      if (!next_seg) break;
      used[*next_seg] = true;
      const auto& seg = segments[*next_seg];
      cur = seg.first == cur ? seg.second : seg.first;
      line.push_back(*at_edge[cur]);
    }
    if (line.size() >= 2) lines.push_back(std::move(line));
  };

  // Open chains start at grid-border crossings, then closed loops.
  for (const auto& [edge, segs] : incident) {
    if (segs.size() == 1 && !used[segs[0]]) walk(edge);
  }
  for (const auto& [edge, segs] : incident) {
    if (std::any_of(segs.begin(), segs.end(), [&](std::size_t s) { return !used[s]; })) {
      walk(edge);
    }
  }
  return lines;
}

ScanGrid make_grid(const SystemParams& tmpl, const Axis& a1, const Axis& a2,
                   ScanQuantity q, const ScanOptions& opts) {
  validate_scan(tmpl, a1, a2, q);
  ScanGrid g;
  g.fixed = tmpl;
  g.axis1 = a1;
  g.axis2 = a2;
  g.quantity = q;
  g.tol = opts.tol;
  const std::size_t n = static_cast<std::size_t>(a1.count) * static_cast<std::size_t>(a2.count);
  g.values.resize(n);
  g.discriminant.resize(n);
  g.verdicts.resize(n);
  g.boundary_cells.assign(n, 0);
  return g;
}

void store(ScanGrid& g, std::size_t idx, const CellResult& r) {
  g.values[idx] = r.value;
  g.discriminant[idx] = r.discriminant;
  g.verdicts[idx] = r.verdict;
}

void flag_boundary_cells(ScanGrid& g, const std::vector<EdgeTask>& tasks) {
  for (const auto& t : tasks) {
    g.boundary_cells[g.index(t.i0, t.j0)] = 1;
    g.boundary_cells[g.index(t.i1, t.j1)] = 1;
  }
}

}  // namespace

std::string_view to_string(ScanParam p) {
  switch (p) {
    case ScanParam::lambda: return "lambda";
    case ScanParam::two_eps_over_omega: return "two_eps_over_omega";
    case ScanParam::beta: return "beta";
    case ScanParam::beta_l: return "beta_l";
    case ScanParam::beta_r: return "beta_r";
  }
  return "?";
}

ScanParam scan_param_from_string(std::string_view s) {
  for (auto p : {ScanParam::lambda, ScanParam::two_eps_over_omega, ScanParam::beta,
                 ScanParam::beta_l, ScanParam::beta_r}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown scan parameter '" + std::string(s) + "'");
}

std::string_view to_string(ScanQuantity q) {
  switch (q) {
    case ScanQuantity::re_rho_even: return "re_rho_even";
    case ScanQuantity::re_rho_sum_odd: return "re_rho_sum_odd";
    case ScanQuantity::max_im_spectrum: return "max_im_spectrum";
  }
  return "?";
}

ScanQuantity scan_quantity_from_string(std::string_view s) {
  for (auto q : {ScanQuantity::re_rho_even, ScanQuantity::re_rho_sum_odd,
                 ScanQuantity::max_im_spectrum}) {
    if (s == to_string(q)) return q;
  }
  throw ConfigError("unknown scan quantity '" + std::string(s) + "'");
}

SystemParams with_param(SystemParams p, ScanParam which, double value) {
  switch (which) {
    case ScanParam::lambda: p.lambda = value; break;
    case ScanParam::two_eps_over_omega: p.set_two_eps_over_omega(value); break;
    case ScanParam::beta: p.set_beta(value); break;
    case ScanParam::beta_l: p.beta_l = value; break;
    case ScanParam::beta_r: p.beta_r = value; break;
  }
  return p;
}

double param_value(const SystemParams& p, ScanParam which) {
  switch (which) {
    case ScanParam::lambda: return p.lambda;
    case ScanParam::two_eps_over_omega: return p.two_eps_over_omega();
    case ScanParam::beta: return p.beta_l;
    case ScanParam::beta_l: return p.beta_l;
    case ScanParam::beta_r: return p.beta_r;
  }
  return 0.0;
}

void Axis::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("axis bounds must be finite");
  if (!(min < max)) throw ConfigError("axis " + std::string(to_string(param)) + " needs min < max");
  if (count < 2) throw ConfigError("axis " + std::string(to_string(param)) + " needs count >= 2");
}

SystemParams ScanGrid::params_at(int i, int j) const {
  return with_param(with_param(fixed, axis1.param, axis1.at(i)), axis2.param, axis2.at(j));
}

CellResult evaluate_cell(const SystemParams& p, ScanQuantity q, double tol) {
  const EffectiveCouplings c = effective_couplings(p);
  const Spectrum e = closed_form_spectrum(c, p.beta_l, p.beta_r);
  const StabilityVerdict v = classify(e, tol);
  CellResult r;
  r.verdict = v.kind;
  switch (q) {
    case ScanQuantity::re_rho_even:
      r.value = rho_even(c, p.beta_l).real();
      r.discriminant = balanced_discriminant(c, p.beta_l);
      break;
    case ScanQuantity::re_rho_sum_odd: {
      const RhoPair rho = rho_odd(c, p.beta_l);
      r.value = (rho.plus + rho.minus).real();
      r.discriminant = balanced_discriminant(c, p.beta_l);
      break;
    }
    case ScanQuantity::max_im_spectrum:
      r.value = v.max_im;
      r.discriminant = v.max_im - tol;
      break;
  }
  return r;
}

void validate_scan(const SystemParams& tmpl, const Axis& a1, const Axis& a2,
                   ScanQuantity q) {
  a1.validate();
  a2.validate();
  if (overlaps(a1.param, a2.param)) {
    throw ConfigError("scan axes must reference distinct parameters");
  }
  tmpl.validate();
  const int n = tmpl.resonance_order();
  if (q == ScanQuantity::re_rho_even && n % 2 != 0) {
    throw WrongParityError("re_rho_even requires even Omega/omega");
  }
  if (q == ScanQuantity::re_rho_sum_odd && n % 2 == 0) {
    throw WrongParityError("re_rho_sum_odd requires odd Omega/omega");
  }
  if (is_balanced_quantity(q)) {
    for (const Axis* a : {&a1, &a2}) {
      if (a->param == ScanParam::beta_l || a->param == ScanParam::beta_r) {
        throw ConfigError("balanced quantities sweep gain-loss through the 'beta' axis");
      }
    }
    const bool beta_axis = a1.param == ScanParam::beta || a2.param == ScanParam::beta;
    if (!beta_axis && !tmpl.balanced()) {
      throw ConfigError("balanced quantities need beta_l == beta_r");
    }
  }
}

ScanGrid scan(const SystemParams& tmpl, const Axis& axis1, const Axis& axis2,
              ScanQuantity quantity, const ScanOptions& opts) {
  ScanGrid g = make_grid(tmpl, axis1, axis2, quantity, opts);
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
  const long long n = static_cast<long long>(g.values.size());

  std::exception_ptr failure;
  std::mutex failure_lock;

#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long idx = 0; idx < n; ++idx) {
    const int i = static_cast<int>(idx / axis2.count);
    const int j = static_cast<int>(idx % axis2.count);
    try {
      store(g, static_cast<std::size_t>(idx), evaluate_cell(g.params_at(i, j), quantity, opts.tol));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const std::vector<EdgeTask> tasks = crossing_edges(g);
  flag_boundary_cells(g, tasks);
  if (opts.boundaries) {
    std::vector<BoundaryPoint> points(tasks.size());
    const long long m = static_cast<long long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (long long k = 0; k < m; ++k) {
      const EdgeTask& t = tasks[static_cast<std::size_t>(k)];
      points[static_cast<std::size_t>(k)] = refine(g, t.i0, t.j0, t.i1, t.j1, opts.refine_tol);
    }
    g.boundaries = link_crossings(g, tasks, points);
  }
  return g;
}

ScanGrid scan_serial(const SystemParams& tmpl, const Axis& axis1,
                     const Axis& axis2, ScanQuantity quantity,
                     const ScanOptions& opts) {
  ScanGrid g = make_grid(tmpl, axis1, axis2, quantity, opts);
  for (int i = 0; i < axis1.count; ++i) {
    for (int j = 0; j < axis2.count; ++j) {
      store(g, g.index(i, j), evaluate_cell(g.params_at(i, j), quantity, opts.tol));
    }
  }
  const std::vector<EdgeTask> tasks = crossing_edges(g);
  flag_boundary_cells(g, tasks);
  if (opts.boundaries) {
    std::vector<BoundaryPoint> points;
    points.reserve(tasks.size());
    for (const auto& t : tasks) points.push_back(refine(g, t.i0, t.j0, t.i1, t.j1, opts.refine_tol));
    g.boundaries = link_crossings(g, tasks, points);
  }
  return g;
}

namespace {

DynamicsCheck check_cell(const ScanGrid& grid, std::size_t idx, int periods,
                         int steps_per_period) {
  DynamicsCheck d;
  d.i = static_cast<int>(idx / static_cast<std::size_t>(grid.axis2.count));
  d.j = static_cast<int>(idx % static_cast<std::size_t>(grid.axis2.count));
  const SystemParams p = grid.params_at(d.i, d.j);
  d.predicted = grid.verdicts[idx];

  const double t_end = periods * p.period();
  const StateVector initial = StateVector::basis(1);
  // The growth rate alone misjudges what |0,up> sees (small overlap with the
  // growing mode, large bounded swings near an EP), so the effective model
  // predicts the largest total along the run.
  std::vector<double> times(static_cast<std::size_t>(8 * periods) + 1);
  for (std::size_t s = 0; s < times.size(); ++s) {
    times[s] = t_end * static_cast<double>(s) / static_cast<double>(times.size() - 1);
  }
  try {
    d.predicted_total = 0.0;
    for (const auto& pr : analytic_evolution(p, initial, times).probabilities()) {
      d.predicted_total = std::max(d.predicted_total, pr.total);
    }
  } catch (const DegeneracyError&) {
    d.predicted_total = NAN;
  }

  IntegrationConfig cfg;
  cfg.steps_per_period = steps_per_period;
  cfg.t_end = t_end;
  try {
    const Trajectory traj = propagate(p, initial, cfg);
    for (const auto& pr : traj.probabilities()) d.max_total = std::max(d.max_total, pr.total);
  } catch (const DivergenceError&) {
    d.max_total = INFINITY;
  }

  // Decaying cells may grow transiently (non-normal dynamics), so they share
  // the bounded rule with stable cells. NaN predictions are never conclusive.
  if (d.predicted == StabilityCase::D_unstable) {
    d.conclusive = d.predicted_total >= 100.0;
    d.consistent = !d.conclusive || d.max_total > 10.0;
  } else {
    d.conclusive = d.predicted_total <= 5.0;
    d.consistent = !d.conclusive || d.max_total <= 10.0;
  }
  return d;
}

}  // namespace

std::vector<DynamicsCheck> verify_dynamics(const ScanGrid& grid, int count,
                                           std::uint64_t seed, int periods,
                                           int steps_per_period) {
  if (count < 0) throw ConfigError("verify count must be non-negative");
  const std::size_t cells = grid.values.size();
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min(cells, static_cast<std::size_t>(count)));

  std::vector<DynamicsCheck> out(order.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(order.size()); ++q) {
    try {
      out[static_cast<std::size_t>(q)] =
          check_cell(grid, order[static_cast<std::size_t>(q)], periods, steps_per_period);
    } catch (...) {
#pragma omp critical(fj_verify_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace fj
