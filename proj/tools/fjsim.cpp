#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fj/checkpoints.hpp"
#include "fj/comparison.hpp"
#include "fj/errors.hpp"
#include "fj/integrator.hpp"
#include "fj/io.hpp"
#include "fj/scan.hpp"
#include "fj/stability.hpp"

namespace {

using fj::io::Json;

enum Exit : int {
  kOk = 0,
  kFailed = 1,  // verification ran but some item did not pass
  kUsage = 2,
  kResonance = 3,
  kDivergence = 4,
};

struct RunConfig {
  std::string command;
  // n = 2 resonance at omega 50, the usual working point
  fj::SystemParams params = [] {
    fj::SystemParams p;
    p.nu = 1.0;
    p.zeeman = 100.0;
    p.omega = 50.0;
    return p;
  }();

  int init_basis = 1;
  std::optional<fj::Amplitudes> init_amplitudes;
  double t0 = 0.0;
  fj::IntegrationConfig integration = [] {
    fj::IntegrationConfig c;
    c.t_end = 40.0;
    return c;
  }();

  fj::Axis axis1{fj::ScanParam::lambda, 0.0, 2.0, 101};
  fj::Axis axis2{fj::ScanParam::two_eps_over_omega, 0.0, 8.0, 201};
  fj::ScanQuantity quantity = fj::ScanQuantity::max_im_spectrum;
  double tol = fj::kDefaultClassifyTolerance;
  bool boundaries = true;
  int verify_dynamics = 0;
  std::uint64_t seed = 1;

  fj::Axis sweep{fj::ScanParam::two_eps_over_omega, 0.0, 8.0, 401};

  std::string suite = "figures";
  std::optional<std::string> artifacts;

  std::optional<std::string> output;
  std::optional<std::string> analytic;
  std::string format;
  int threads = 0;

  fj::StateVector initial() const {
    fj::StateVector s = fj::StateVector::basis(init_basis, t0);
    if (init_amplitudes) s.a = *init_amplitudes;
    return s;
  }
};

std::string default_format(const std::string& command) {
  return command == "evolve" || command == "boundary" ? "csv" : "json";
}

Json axis_json(const fj::Axis& a) { return fj::io::to_json(a); }

fj::Axis axis_from_json(const Json& j) {
  fj::Axis a;
  a.param = fj::scan_param_from_string(j.at("name").get<std::string>());
  a.min = j.at("min").get<double>();
  a.max = j.at("max").get<double>();
  a.count = j.at("count").get<int>();
  return a;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["params"] = fj::io::to_json(c.params);
  if (c.command == "evolve") {
    if (c.init_amplitudes) {
      Json amps = Json::array();
      for (const auto& z : *c.init_amplitudes) amps.push_back(fj::io::to_json(z));
      j["initial"] = amps;
    } else {
      j["initial"] = c.init_basis;
    }
    j["t0"] = fj::io::round12(c.t0);
    j["integration"] = fj::io::to_json(c.integration);
    if (c.analytic) j["analytic"] = *c.analytic;
  } else if (c.command == "scan") {
    Json s;
    s["axis1"] = axis_json(c.axis1);
    s["axis2"] = axis_json(c.axis2);
    s["quantity"] = std::string(fj::to_string(c.quantity));
    s["tol"] = fj::io::round12(c.tol);
    s["boundaries"] = c.boundaries;
    s["verify_dynamics"] = c.verify_dynamics;
    s["seed"] = c.seed;
    j["scan"] = s;
  } else if (c.command == "boundary") {
    j["sweep"] = axis_json(c.sweep);
  } else if (c.command == "verify") {
    j["suite"] = c.suite;
    if (c.artifacts) j["artifacts"] = *c.artifacts;
  }
  if (c.output) j["output"] = *c.output;
  j["format"] = c.format;
  j["threads"] = c.threads;
  return j;
}

void apply_json(RunConfig& c, const Json& j) {
  if (!j.is_object()) throw fj::ConfigError("config must be a JSON object");
  try {
    if (j.contains("command") && j.at("command").get<std::string>() != c.command) {
      throw fj::ConfigError("config is for command '" + j.at("command").get<std::string>() +
                            "', not '" + c.command + "'");
    }
    if (j.contains("params")) c.params = fj::io::params_from_json(j.at("params"));
    if (j.contains("initial")) {
      const Json& init = j.at("initial");
      if (init.is_number_integer()) {
        c.init_basis = init.get<int>();
        c.init_amplitudes.reset();
      } else {
        if (!init.is_array() || init.size() != 4) {
          throw fj::ConfigError("initial must be a basis index or four {re, im} objects");
        }
        fj::Amplitudes a;
        for (std::size_t k = 0; k < 4; ++k) {
          a[k] = {init[k].at("re").get<double>(), init[k].at("im").get<double>()};
        }
        c.init_amplitudes = a;
      }
    }
    c.t0 = j.value("t0", c.t0);
    if (j.contains("integration")) c.integration = fj::io::integration_from_json(j.at("integration"));
    if (j.contains("analytic")) c.analytic = j.at("analytic").get<std::string>();
    if (j.contains("scan")) {
      const Json& s = j.at("scan");
      if (s.contains("axis1")) c.axis1 = axis_from_json(s.at("axis1"));
      if (s.contains("axis2")) c.axis2 = axis_from_json(s.at("axis2"));
      if (s.contains("quantity")) c.quantity = fj::scan_quantity_from_string(s.at("quantity").get<std::string>());
      c.tol = s.value("tol", c.tol);
      c.boundaries = s.value("boundaries", c.boundaries);
      c.verify_dynamics = s.value("verify_dynamics", c.verify_dynamics);
      c.seed = s.value("seed", c.seed);
    }
    if (j.contains("sweep")) c.sweep = axis_from_json(j.at("sweep"));
    c.suite = j.value("suite", c.suite);
    if (j.contains("artifacts")) c.artifacts = j.at("artifacts").get<std::string>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    c.format = j.value("format", c.format);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw fj::ConfigError(std::string("config: ") + e.what());
  }
}

// name:min:max:count
fj::Axis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw fj::ConfigError("axis must be name:min:max:count, got '" + text + "'");
  try {
    fj::Axis a;
    a.param = fj::scan_param_from_string(parts[0]);
    std::size_t used = 0;
    a.min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("min");
    a.max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("max");
    a.count = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("count");
    return a;
  } catch (const std::logic_error&) {
    throw fj::ConfigError("malformed axis '" + text + "'");
  }
}

fj::Amplitudes parse_amplitudes(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw fj::ConfigError("malformed amplitude '" + item + "'");
    }
  }
  if (v.size() != 8) throw fj::ConfigError("--amplitudes needs 8 numbers (re,im x 4)");
  fj::Amplitudes a;
  for (std::size_t k = 0; k < 4; ++k) a[k] = {v[2 * k], v[2 * k + 1]};
  return a;
}

// Storage for flag values; see given() for presence checks.
struct Flags {
  double nu = 0, lambda = 0, zeeman = 0, omega = 0, eps = 0, ratio = 0;
  double beta = 0, beta_l = 0, beta_r = 0;

  int init = 1;
  std::string amplitudes;
  double t0 = 0, t_end = 0;
  int spp = 512, stride = 1;
  std::string analytic;

  std::string axis1, axis2, quantity;
  double tol = 0;
  bool no_boundaries = false;
  int verify_dynamics = 0;
  std::uint64_t seed = 0;

  std::string sweep;

  std::string suite, artifacts;

  std::string config, output, format;
  int threads = 0;
  bool dump = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration; flags override it");
  sub->add_option("-o,--output", f.output, "output file (default: stdout)");
  sub->add_option("--format", f.format, "csv or json");
  sub->add_flag("--dump-config", f.dump, "print the effective configuration as JSON and exit");
}

void add_params(CLI::App* sub, Flags& f) {
  sub->add_option("--nu", f.nu, "bare tunnelling rate");
  sub->add_option("--lambda", f.lambda, "spin-orbit coupling strength");
  sub->add_option("--Omega", f.zeeman, "Zeeman field");
  sub->add_option("--omega", f.omega, "driving frequency");
  auto* eps = sub->add_option("--eps", f.eps, "driving amplitude");
  auto* ratio = sub->add_option("--two-eps-over-omega", f.ratio, "driving amplitude as 2 eps / omega");
  eps->excludes(ratio);
  auto* beta = sub->add_option("--beta", f.beta, "balanced gain and loss");
  auto* beta_l = sub->add_option("--beta-l", f.beta_l, "gain in the left well");
  auto* beta_r = sub->add_option("--beta-r", f.beta_r, "loss in the right well");
  beta->excludes(beta_l)->excludes(beta_r);
  beta_l->needs(beta_r);
  beta_r->needs(beta_l);
}

// Subcommands share the Flags storage, so "was it given" is asked of the
// subcommand that actually ran.
bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* o = sub->get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

void apply_flags(RunConfig& c, const Flags& f, const CLI::App* sub) {
  auto& p = c.params;
  if (given(sub, "--nu")) p.nu = f.nu;
  if (given(sub, "--lambda")) p.lambda = f.lambda;
  if (given(sub, "--Omega")) p.zeeman = f.zeeman;
  if (given(sub, "--omega")) p.omega = f.omega;
  if (given(sub, "--eps")) p.epsilon = f.eps;
  if (given(sub, "--two-eps-over-omega")) p.set_two_eps_over_omega(f.ratio);
  if (given(sub, "--beta")) p.set_beta(f.beta);
  if (given(sub, "--beta-l")) p.beta_l = f.beta_l;
  if (given(sub, "--beta-r")) p.beta_r = f.beta_r;
}

int threads_from_env() {
  const char* env = std::getenv("FJ_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) throw fj::ConfigError("FJ_THREADS must be a non-negative integer");
  return static_cast<int>(n);
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.output) {
    fj::io::write_file(*c.output, text);
  } else {
    std::cout << text;
    std::cout.flush();
  }
}

std::string trajectory_text(const fj::Trajectory& traj, const std::string& format) {
  if (format == "csv") {
    std::ostringstream out;
    fj::io::write_trajectory_csv(out, traj);
    return out.str();
  }
  Json samples = Json::array();
  for (std::size_t s = 0; s < traj.size(); ++s) {
    Json row;
    row["t"] = fj::io::round12(traj.times()[s]);
    Json probs = Json::array();
    for (double p : traj.probabilities()[s].p) probs.push_back(fj::io::round12(p));
    row["P"] = probs;
    row["Ptot"] = fj::io::round12(traj.probabilities()[s].total);
    Json amps = Json::array();
    for (const auto& z : traj.states()[s].a) amps.push_back(fj::io::to_json(z));
    row["a"] = amps;
    samples.push_back(row);
  }
  Json j;
  j["samples"] = samples;
  return j.dump(1) + "\n";
}

int cmd_evolve(const RunConfig& c) {
  const fj::StateVector init = c.initial();
  if (init.total_probability() == 0.0) throw fj::ConfigError("initial amplitudes are all zero");
  const fj::Trajectory traj = fj::propagate(c.params, init, c.integration);
  emit(c, trajectory_text(traj, c.format));
  if (c.analytic) {
    const fj::Trajectory ana = fj::analytic_evolution(c.params, init, traj.times());
    fj::io::write_file(*c.analytic, trajectory_text(ana, c.format));
  }
  return kOk;
}

int cmd_quasienergy(const RunConfig& c) {
  c.params.validate();
  const auto couplings = fj::effective_couplings(c.params);
  const auto modes = fj::quasienergies(couplings, c.params.beta_l, c.params.beta_r);
  Json j;
  j["params"] = fj::io::to_json(c.params);
  j["couplings"] = fj::io::to_json(couplings);
  j["modes"] = fj::io::to_json(modes);
  j["verdict"] = fj::io::to_json(
      fj::classify(fj::closed_form_spectrum(couplings, c.params.beta_l, c.params.beta_r)));
  emit(c, j.dump(1) + "\n");
  return kOk;
}

int cmd_scan(const RunConfig& c) {
  fj::ScanOptions opts;
  opts.tol = c.tol;
  opts.threads = c.threads;
  opts.boundaries = c.boundaries;
  const fj::ScanGrid grid = fj::scan(c.params, c.axis1, c.axis2, c.quantity, opts);
  Json j = fj::io::to_json(grid);
  int code = kOk;
  if (c.verify_dynamics > 0) {
    const auto checks = fj::verify_dynamics(grid, c.verify_dynamics, c.seed);
    Json arr = Json::array();
    for (const auto& d : checks) {
      arr.push_back(fj::io::to_json(d));
      if (d.conclusive && !d.consistent) {
        code = std::max(code, fj::is_stable(d.predicted) ? int{kDivergence} : int{kFailed});
      }
    }
    j["dynamics_checks"] = arr;
  }
  emit(c, j.dump(1) + "\n");
  if (code != kOk) std::cerr << "fjsim: dynamics disagree with the predicted verdict\n";
  return code;
}

int cmd_boundary(const RunConfig& c) {
  c.sweep.validate();
  if (c.sweep.param != fj::ScanParam::lambda && c.sweep.param != fj::ScanParam::two_eps_over_omega) {
    throw fj::ConfigError("boundary sweeps lambda or two_eps_over_omega");
  }
  c.params.resonance_order();
  std::string text;
  if (c.format == "csv") {
    text = std::string(fj::to_string(c.sweep.param)) + ",boundary_beta\n";
    for (int k = 0; k < c.sweep.count; ++k) {
      const double x = c.sweep.at(k);
      const auto couplings = fj::effective_couplings(fj::with_param(c.params, c.sweep.param, x));
      text += fj::io::format_number(x) + ',' + fj::io::format_number(fj::boundary_beta(couplings)) + '\n';
    }
  } else {
    Json rows = Json::array();
    for (int k = 0; k < c.sweep.count; ++k) {
      const double x = c.sweep.at(k);
      const auto couplings = fj::effective_couplings(fj::with_param(c.params, c.sweep.param, x));
      rows.push_back(Json::array({fj::io::round12(x), fj::io::round12(fj::boundary_beta(couplings))}));
    }
    Json j;
    j["sweep"] = axis_json(c.sweep);
    j["boundary_beta"] = rows;
    text = j.dump(1) + "\n";
  }
  emit(c, text);
  return kOk;
}

int cmd_verify(const RunConfig& c) {
  if (c.suite != "figures") throw fj::ConfigError("unknown suite '" + c.suite + "'");
  fj::SuiteOptions opts;
  opts.artifacts_dir = c.artifacts;
  opts.threads = c.threads;
  const auto results = fj::run_figure_suite(opts);
  Json items = Json::array();
  bool all = true;
  for (const auto& r : results) {
    Json j;
    j["id"] = r.id;
    j["description"] = r.description;
    j["passed"] = r.passed;
    j["measured"] = fj::io::round12(r.measured);
    j["expected"] = fj::io::round12(r.expected);
    j["tolerance"] = fj::io::round12(r.tolerance);
    if (!r.detail.empty()) j["detail"] = r.detail;
    items.push_back(j);
    all = all && r.passed;
  }
  Json report;
  report["suite"] = c.suite;
  report["passed"] = all;
  report["items"] = items;
  emit(c, report.dump(1) + "\n");
  return all ? kOk : kFailed;
}

int dispatch(const RunConfig& c) {
  if (c.command == "evolve") return cmd_evolve(c);
  if (c.command == "quasienergy") return cmd_quasienergy(c);
  if (c.command == "scan") return cmd_scan(c);
  if (c.command == "boundary") return cmd_boundary(c);
  return cmd_verify(c);
}

int run(int argc, char** argv) {
  CLI::App app{"Driven non-Hermitian spin-orbit double well: evolution, quasienergies, stability maps"};
  app.require_subcommand(1);
  Flags f;

  auto* evolve = app.add_subcommand("evolve", "integrate the amplitudes and write a trajectory");
  add_common(evolve, f);
  add_params(evolve, f);
  auto* init = evolve->add_option("--init", f.init, "initial basis state 1..4");
  auto* amps = evolve->add_option("--amplitudes", f.amplitudes, "initial amplitudes re1,im1,...,re4,im4");
  init->excludes(amps);
  evolve->add_option("--t0", f.t0, "initial time");
  evolve->add_option("--t-end", f.t_end, "final time");
  evolve->add_option("--steps-per-period", f.spp, "RK4 steps per driving period");
  evolve->add_option("--stride", f.stride, "keep every k-th step");
  evolve->add_option("--analytic", f.analytic, "also write the effective-model trajectory here");

  auto* quasi = app.add_subcommand("quasienergy", "closed-form quasienergies, eigenvectors and verdict");
  add_common(quasi, f);
  add_params(quasi, f);

  auto* scan = app.add_subcommand("scan", "two-parameter stability map");
  add_common(scan, f);
  add_params(scan, f);
  scan->add_option("--axis1", f.axis1, "name:min:max:count (default lambda:0:2:101)");
  scan->add_option("--axis2", f.axis2, "name:min:max:count (default two_eps_over_omega:0:8:201)");
  scan->add_option("--quantity", f.quantity, "re_rho_even, re_rho_sum_odd or max_im_spectrum");
  scan->add_option("--tol", f.tol, "classification tolerance");
  scan->add_flag("--no-boundaries", f.no_boundaries, "skip boundary polylines");
  scan->add_option("--verify-dynamics", f.verify_dynamics, "integrate k random cells and check the verdicts");
  scan->add_option("--seed", f.seed, "seed for --verify-dynamics");
  scan->add_option("--threads", f.threads, "worker threads (default FJ_THREADS or all cores)");

  auto* boundary = app.add_subcommand("boundary", "balanced stability boundary beta along one parameter");
  add_common(boundary, f);
  add_params(boundary, f);
  boundary->add_option("--sweep", f.sweep, "name:min:max:count (default two_eps_over_omega:0:8:401)");

  auto* verify = app.add_subcommand("verify", "run the checkpoint suite and write a JSON report");
  add_common(verify, f);
  verify->add_option("--suite", f.suite, "checkpoint suite (figures)");
  verify->add_option("--artifacts", f.artifacts, "write scan JSON and trajectory CSV files here");
  verify->add_option("--threads", f.threads, "worker threads for the scans");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    RunConfig c;
    const CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    c.format = default_format(c.command);
    c.threads = threads_from_env();
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      if (!in) throw fj::ConfigError("cannot read config '" + f.config + "'");
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw fj::ConfigError("config '" + f.config + "': " + e.what());
      }
      apply_json(c, j);
    }
    if (c.command != "verify") apply_flags(c, f, sub);
    if (c.command == "evolve") {
      if (given(sub, "--init")) {
        c.init_basis = f.init;
        c.init_amplitudes.reset();
      }
      if (given(sub, "--amplitudes")) c.init_amplitudes = parse_amplitudes(f.amplitudes);
      if (given(sub, "--t0")) c.t0 = f.t0;
      if (given(sub, "--t-end")) c.integration.t_end = f.t_end;
      if (given(sub, "--steps-per-period")) c.integration.steps_per_period = f.spp;
      if (given(sub, "--stride")) c.integration.sample_stride = f.stride;
      if (given(sub, "--analytic")) c.analytic = f.analytic;
      if (c.init_basis < 1 || c.init_basis > 4) throw fj::ConfigError("--init must be 1..4");
      c.integration.validate();
    }
    if (c.command == "scan") {
      if (given(sub, "--axis1")) c.axis1 = parse_axis(f.axis1);
      if (given(sub, "--axis2")) c.axis2 = parse_axis(f.axis2);
      if (given(sub, "--quantity")) c.quantity = fj::scan_quantity_from_string(f.quantity);
      if (given(sub, "--tol")) c.tol = f.tol;
      if (f.no_boundaries) c.boundaries = false;
      if (given(sub, "--verify-dynamics")) c.verify_dynamics = f.verify_dynamics;
      if (given(sub, "--seed")) c.seed = f.seed;
      if (given(sub, "--threads")) c.threads = f.threads;
      if (c.verify_dynamics < 0) throw fj::ConfigError("--verify-dynamics must be >= 0");
    }
    if (c.command == "boundary" && given(sub, "--sweep")) c.sweep = parse_axis(f.sweep);
    if (c.command == "verify") {
      if (given(sub, "--suite")) c.suite = f.suite;
      if (given(sub, "--artifacts")) c.artifacts = f.artifacts;
      if (given(sub, "--threads")) c.threads = f.threads;
    }
    if (given(sub, "--output")) c.output = f.output;
    if (given(sub, "--format")) c.format = f.format;
    if (c.format != "csv" && c.format != "json") throw fj::ConfigError("--format must be csv or json");
    if (c.format == "csv" && c.command != "evolve" && c.command != "boundary") {
      throw fj::ConfigError(c.command + " writes JSON only");
    }
    if (c.threads < 0) throw fj::ConfigError("--threads must be >= 0");
    if (c.command != "verify") c.params.validate();

    if (f.dump) {
      std::cout << to_json(c).dump(1) << '\n';
      return kOk;
    }
    return dispatch(c);
  } catch (const fj::ResonanceError& e) {
    std::cerr << "fjsim: " << e.what() << '\n';
    return kResonance;
  } catch (const fj::DivergenceError& e) {
    std::cerr << "fjsim: " << e.what() << '\n';
    return kDivergence;
  } catch (const fj::Error& e) {
    std::cerr << "fjsim: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
