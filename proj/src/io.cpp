#include "fj/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "fj/errors.hpp"

namespace fj::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryHeader << '\n';
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const auto& st = traj.states()[s];
    const auto& pr = traj.probabilities()[s];
    std::string line = format_number(st.t);
    for (double p : pr.p) line += ',' + format_number(p);
    line += ',' + format_number(pr.total);
    for (const Complex& a : st.a) {
      line += ',' + format_number(a.real());
      line += ',' + format_number(a.imag());
    }
    out << line << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory CSV: missing header");
  if (line != kTrajectoryHeader) {
    throw ConfigError("trajectory CSV: unexpected header '" + line + "'");
  }
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw ConfigError("trajectory CSV line " + std::to_string(lineno) +
                          ": column " + std::to_string(cols.size() + 1) +
                          " is not a number");
      }
      cols.push_back(v);
    }
    if (cols.size() != 14) {
      throw ConfigError("trajectory CSV line " + std::to_string(lineno) +
                        ": expected 14 columns, got " + std::to_string(cols.size()));
    }
    StateVector s;
    s.t = cols[0];
    for (std::size_t k = 0; k < 4; ++k) s.a[k] = {cols[6 + 2 * k], cols[7 + 2 * k]};
    traj.append(s);
  }
  return traj;
}

Json to_json(const SystemParams& p) {
  Json j;
  j["nu"] = round12(p.nu);
  j["lambda"] = round12(p.lambda);
  j["Omega"] = round12(p.zeeman);
  j["omega"] = round12(p.omega);
  j["epsilon"] = round12(p.epsilon);
  j["beta_l"] = round12(p.beta_l);
  j["beta_r"] = round12(p.beta_r);
  return j;
}

SystemParams params_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("params must be a JSON object");
  SystemParams p;
  try {
    p.nu = j.value("nu", p.nu);
    p.lambda = j.value("lambda", p.lambda);
    p.zeeman = j.value("Omega", p.zeeman);
    p.omega = j.value("omega", p.omega);
    if (j.contains("epsilon") && j.contains("two_eps_over_omega")) {
      throw ConfigError("params: epsilon and two_eps_over_omega are exclusive");
    }
    p.epsilon = j.value("epsilon", p.epsilon);
    if (j.contains("two_eps_over_omega")) {
      p.set_two_eps_over_omega(j.at("two_eps_over_omega").get<double>());
    }
    if (j.contains("beta")) {
      if (j.contains("beta_l") || j.contains("beta_r")) {
        throw ConfigError("params: beta excludes beta_l/beta_r");
      }
      p.set_beta(j.at("beta").get<double>());
    }
    p.beta_l = j.value("beta_l", p.beta_l);
    p.beta_r = j.value("beta_r", p.beta_r);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  return p;
}

Json to_json(const IntegrationConfig& cfg) {
  Json j;
  j["steps_per_period"] = cfg.steps_per_period;
  j["t_end"] = round12(cfg.t_end);
  j["sample_stride"] = cfg.sample_stride;
  return j;
}

IntegrationConfig integration_from_json(const Json& j) {
  IntegrationConfig cfg;
  try {
    cfg.steps_per_period = j.value("steps_per_period", cfg.steps_per_period);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.sample_stride = j.value("sample_stride", cfg.sample_stride);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("integration: ") + e.what());
  }
  return cfg;
}

Json to_json(Complex z) {
  Json j;
  j["re"] = round12(z.real());
  j["im"] = round12(z.imag());
  return j;
}

Json to_json(const EffectiveCouplings& c) {
  Json j;
  j["j0"] = round12(c.j0);
  j["j_plus"] = round12(c.j_plus);
  j["j_minus"] = round12(c.j_minus);
  j["n"] = c.n;
  return j;
}

Json to_json(const StabilityVerdict& v) {
  Json j;
  j["case"] = std::string(to_string(v.kind));
  j["max_im"] = round12(v.max_im);
  Json spec = Json::array();
  for (const auto& e : v.spectrum) spec.push_back(to_json(e));
  j["spectrum"] = spec;
  return j;
}

Json to_json(const ModeSet& modes) {
  Json arr = Json::array();
  for (const auto& m : modes) {
    Json j;
    j["index"] = m.index;
    j["E"] = to_json(m.e);
    Json vec = Json::array();
    for (const auto& x : m.vec) vec.push_back(to_json(x));
    j["vector"] = vec;
    arr.push_back(j);
  }
  return arr;
}

Json to_json(const EquilibriumReport& r) {
  Json j;
  j["couplings"] = to_json(r.couplings);
  j["tolerance"] = round12(r.tolerance);
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    Json cj;
    cj["name"] = c.name;
    cj["description"] = c.description;
    cj["satisfied"] = c.satisfied;
    cj["residual"] = round12(c.residual);
    Json spec = Json::array();
    for (const auto& e : c.simplified) spec.push_back(to_json(e));
    cj["simplified_spectrum"] = spec;
    conds.push_back(cj);
  }
  j["conditions"] = conds;
  j["verdict"] = to_json(r.verdict);
  j["stable"] = r.stable;
  return j;
}

Json to_json(const DeviationReport& r) {
  Json j;
  j["max_abs_amplitude_dev"] = round12(r.max_abs_amplitude_dev);
  j["max_abs_probability_dev"] = round12(r.max_abs_probability_dev);
  j["time_of_max"] = round12(r.time_of_max);
  return j;
}

Json to_json(const AsymptoticEstimate& e) {
  Json j;
  j["mean"] = round12(e.mean);
  j["stddev"] = round12(e.stddev);
  j["samples"] = e.samples;
  return j;
}

Json to_json(const Axis& a) {
  Json j;
  j["name"] = std::string(to_string(a.param));
  j["min"] = round12(a.min);
  j["max"] = round12(a.max);
  j["count"] = a.count;
  return j;
}

Json to_json(const ScanGrid& g) {
  Json j;
  j["quantity"] = std::string(to_string(g.quantity));
  j["tol"] = round12(g.tol);
  j["fixed"] = to_json(g.fixed);
  j["axes"] = Json::array({to_json(g.axis1), to_json(g.axis2)});

  Json values = Json::array();
  Json verdicts = Json::array();
  Json flags = Json::array();
  for (int i = 0; i < g.axis1.count; ++i) {
    Json vrow = Json::array();
    Json crow = Json::array();
    Json frow = Json::array();
    for (int jj = 0; jj < g.axis2.count; ++jj) {
      vrow.push_back(round12(g.value(i, jj)));
      crow.push_back(std::string(to_string(g.verdict(i, jj)).substr(0, 1)));
      frow.push_back(static_cast<int>(g.boundary_cells[g.index(i, jj)]));
    }
    values.push_back(vrow);
    verdicts.push_back(crow);
    flags.push_back(frow);
  }
  j["values"] = values;
  j["verdicts"] = verdicts;
  j["boundary_cells"] = flags;

  Json lines = Json::array();
  for (const auto& line : g.boundaries) {
    Json pts = Json::array();
    for (const auto& p : line) pts.push_back(Json::array({round12(p.x1), round12(p.x2)}));
    lines.push_back(pts);
  }
  j["boundaries"] = lines;
  return j;
}

Json to_json(const DynamicsCheck& d) {
  Json j;
  j["i"] = d.i;
  j["j"] = d.j;
  j["predicted"] = std::string(to_string(d.predicted));
  j["max_total"] = round12(d.max_total);
  j["predicted_total"] = round12(d.predicted_total);
  j["conclusive"] = d.conclusive;
  j["consistent"] = d.consistent;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace fj::io
