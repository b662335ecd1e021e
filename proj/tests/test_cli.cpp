#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs fjsim with `args` under an optional environment prefix; stderr is discarded.
Result fjsim_env(const std::string& env, const std::string& args) {
  const std::string cmd = env + " " + std::string(FJSIM_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Result fjsim(const std::string& args) { return fjsim_env("", args); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fjsim_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kFig1d = "--nu 1 --omega 50 --Omega 100 --lambda 0.5 --eps 75 --beta 0.2";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("evolve writes the trajectory CSV") {
  const auto r = fjsim("evolve " + kFig1d + " --init 1 --t-end 20 --stride 64");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,P1,P2,P3,P4,Ptot,re_a1,im_a1,re_a2,im_a2,re_a3,im_a3,re_a4,im_a4");
  std::getline(in, line);
  CHECK(line == "0,1,0,0,0,1,1,0,0,0,0,0,0,0");
  std::string last;
  while (std::getline(in, line)) last = line;
  // the run ends within one step (tau / 512) of t_end
  const double t_last = std::stod(last.substr(0, last.find(',')));
  CHECK(std::fabs(t_last - 20.0) <= 2.0 * 3.14159265358979 / 50.0 / 512.0);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto a = fjsim("evolve " + kFig1d + " --t-end 2 --stride 16");
  const auto b = fjsim("evolve " + kFig1d + " --t-end 2 --stride 16");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto s1 = fjsim("scan " + kFig1d + " --quantity re_rho_even --axis1 lambda:0:2:11 --axis2 two_eps_over_omega:0:8:21 --threads 1");
  const auto s4 = fjsim("scan " + kFig1d + " --quantity re_rho_even --axis1 lambda:0:2:11 --axis2 two_eps_over_omega:0:8:21 --threads 4");
  CHECK(s1.code == 0);
  CHECK(s1.out == s4.out);
}

TEST_CASE("analytic companion file") {
  const auto path = scratch("analytic.csv");
  fs::remove(path);
  const auto r = fjsim("evolve " + kFig1d + " --t-end 1 --stride 32 --analytic " + path.string());
  REQUIRE(r.code == 0);
  const std::string ana = read(path);
  std::istringstream a(r.out), b(ana);
  std::string la, lb;
  int rows = 0;
  while (std::getline(a, la) && std::getline(b, lb)) {
    CHECK(la.substr(0, la.find(',')) == lb.substr(0, lb.find(',')));
    ++rows;
  }
  CHECK(rows > 2);
}

TEST_CASE("quasienergy JSON") {
  const auto r = fjsim("quasienergy " + kFig1d);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("couplings").at("n") == 2);
  CHECK(j.at("modes").size() == 4);
  CHECK(j.at("modes")[0].at("vector").size() == 4);
  CHECK(j.at("verdict").at("case") == "A_stable_real");
}

TEST_CASE("scan JSON with dynamics checks") {
  const auto r = fjsim("scan " + kFig1d + " --quantity re_rho_even --axis1 lambda:0:2:11 --axis2 two_eps_over_omega:0:8:21 --verify-dynamics 4 --seed 3");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("values").size() == 11);
  CHECK(j.at("values")[0].size() == 21);
  CHECK(j.at("dynamics_checks").size() == 4);
  CHECK(j.at("boundaries").size() > 0);
}

TEST_CASE("boundary CSV") {
  const auto r = fjsim("boundary --omega 50 --Omega 100 --lambda 0 --sweep two_eps_over_omega:1.5:1.5000001:2");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "two_eps_over_omega,boundary_beta");
  std::getline(in, line);
  CHECK(line.rfind("1.5,0.5118", 0) == 0);
}

TEST_CASE("exit codes") {
  CHECK(fjsim("quasienergy --omega 50 --Omega 101 --eps 75").code == 3);
  CHECK(fjsim("evolve --eps 1 --two-eps-over-omega 2").code == 2);
  CHECK(fjsim("evolve --beta 0.1 --beta-l 0.2 --beta-r 0.3").code == 2);
  CHECK(fjsim("evolve --beta-l 0.2").code == 2);
  CHECK(fjsim("evolve --init 7 --t-end 1").code == 2);
  CHECK(fjsim("evolve --amplitudes 0,0,0,0,0,0,0,0 --t-end 1").code == 2);
  CHECK(fjsim("evolve --omega -1").code == 2);
  CHECK(fjsim("scan --omega 50 --Omega 50 --quantity re_rho_even --beta 0.2").code == 2);
  CHECK(fjsim("scan --axis1 lambda:1:1:2").code == 2);
  CHECK(fjsim("nonsense").code == 2);
  CHECK(fjsim("evolve --output /nonexistent/dir/x.csv --t-end 0.1").code == 2);
  CHECK(fjsim("evolve --omega 50 --Omega 100 --two-eps-over-omega 1 --lambda 0.5 --beta 3 --t-end 200").code == 4);
}

TEST_CASE("dump-config round-trips through --config") {
  for (const std::string& args : std::vector<std::string>{
           "evolve " + kFig1d + " --amplitudes 0.6,0,0,0.8,0,0,0,0 --t-end 3 --stride 4",
        "scan --omega 50 --Omega 50 --beta 0.3 --quantity re_rho_sum_odd --axis1 lambda:0:1:5 --axis2 two_eps_over_omega:0:4:9 --verify-dynamics 2",
        "boundary --omega 50 --Omega 100 --lambda 0.25 --sweep lambda:0:2:9 --format json",
        "verify --suite figures"}) {
    const auto dumped = fjsim(args + " --dump-config");
    REQUIRE(dumped.code == 0);
    const auto path = scratch("config.json");
    std::ofstream(path) << dumped.out;
    const std::string command = args.substr(0, args.find(' '));
    const auto again = fjsim(command + " --config " + path.string() + " --dump-config");
    CHECK(again.code == 0);
    CHECK(again.out == dumped.out);
  }
}

TEST_CASE("flags override the config file") {
  const auto path = scratch("override.json");
  std::ofstream(path) << R"({"params": {"omega": 50, "Omega": 100, "lambda": 0.5, "two_eps_over_omega": 3, "beta": 0.2}})";
  const auto r = fjsim("quasienergy --config " + path.string() + " --lambda 1 --dump-config");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("params").at("lambda") == 1.0);
  CHECK(j.at("params").at("epsilon") == 75.0);
  CHECK(fjsim("scan --config " + path.string() + " --dump-config").code == 0);
  std::ofstream(path) << R"({"command": "evolve"})";
  CHECK(fjsim("scan --config " + path.string()).code == 2);
  std::ofstream(path) << "{ not json";
  CHECK(fjsim("scan --config " + path.string()).code == 2);
}

TEST_CASE("threads from the environment") {
  const std::string cmd = "scan " + kFig1d + " --quantity re_rho_even --dump-config";
  CHECK(nlohmann::json::parse(fjsim(cmd).out).at("threads") == 0);
  CHECK(nlohmann::json::parse(fjsim(cmd + " --threads 2").out).at("threads") == 2);
  const auto env = fjsim_env("FJ_THREADS=3", cmd);
  CHECK(nlohmann::json::parse(env.out).at("threads") == 3);
  CHECK(fjsim_env("FJ_THREADS=abc", cmd).code == 2);
}

TEST_CASE("verify writes a passing report and artifacts") {
  const auto dir = scratch("artifacts");
  fs::remove_all(dir);
  const auto r = fjsim("verify --suite figures --artifacts " + dir.string());
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("passed") == true);
  CHECK(j.at("items").size() >= 30);
  CHECK(fs::exists(dir / "scan_fig1a.json"));
  CHECK(fs::exists(dir / "traj_fig7a.csv"));
}

}
