// lcbd: batch front end for the retarded and Bohm-Dirac guidance laws.
//
//   lcbd run      --scenario FILE [--out-dir DIR]
//   lcbd checks   [--seed N]
//   lcbd ensemble --scenario FILE --count N --t1 T [--out-dir DIR] [--seed N] [--jobs J]
//   lcbd sweep    --scenario FAMILY --eps 0.2 0.1 0.05 [--out-dir DIR] [--jobs J]
//
// Exit codes: 0 ok, 2 input error, 3 dynamics error, 1 failed checks.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "lcbd/checks.hpp"
#include "lcbd/ensemble.hpp"
#include "lcbd/output.hpp"
#include "lcbd/reference_bd.hpp"
#include "lcbd/scenario.hpp"

namespace fs = std::filesystem;
using namespace lcbd;

namespace {

constexpr int kOk = 0;
constexpr int kChecksFailed = 1;
constexpr int kInputError = 2;
constexpr int kDynamicsError = 3;

bool is_input_error(ErrorKind kind) { return kind == ErrorKind::Validation || kind == ErrorKind::InvalidArgument; }

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path);
  } catch (const Error& e) {
    std::cerr << "lcbd run: " << e.what() << '\n';
    return kInputError;
  }

  const auto start = std::chrono::steady_clock::now();
  const auto& wf = scenario.wavefunction();
  RunResult result;
  try {
    if (scenario.model == Model::Retarded) {
      BoundaryData boundary = scenario.boundary;
      boundary.velocities = scenario.seed_velocities();
      result = run(wf, boundary, scenario.integrator);
    } else {
      result = bd_run(wf, scenario.boundary.t_start, scenario.boundary.positions, scenario.integrator);
      if (scenario.seed_rule == SeedRule::Explicit && !result.trajectories.empty()) {
        for (int i = 0; i < scenario.particles; ++i)
          result.initial_violation =
              std::max(result.initial_violation,
                       (result.trajectories[i].seed().velocity - scenario.boundary.velocities[i]).norm());
      }
    }
  } catch (const Error& e) {
    // Seed-rule evaluation failures surface here (e.g. psi vanishing at the boundary).
    result.failure = RunFailure{e.kind(), e.what(), scenario.boundary.t_start};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / scenario.trajectories_path);
    write_trajectories_csv(csv, result.trajectories);
  }
  write_json(fs::path(out_dir) / scenario.report_path, run_report(scenario, result, wall));

  if (result.failure) {
    std::cerr << "lcbd run: " << result.failure->message << '\n';
    return kDynamicsError;
  }
  return kOk;
}

int cmd_checks(std::uint64_t seed) {
  CheckOptions options;
  options.seed = seed;
  const auto results = run_checks(options);
  bool all = true;
  std::cout << std::left << std::setw(6) << "PASS" << std::setw(56) << "check" << "detail\n";
  for (const auto& r : results) {
    all = all && r.passed;
    std::cout << std::setw(6) << (r.passed ? "ok" : "FAIL") << std::setw(56) << r.name << r.detail << " ["
              << std::fixed << std::setprecision(2) << r.seconds << std::defaultfloat << " s]\n";
  }
  return all ? kOk : kChecksFailed;
}

int cmd_ensemble(const std::string& scenario_path, int count, double t1, std::uint64_t seed, bool seed_given,
                 int jobs, const std::string& out_dir) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path);
    if (count < 1) throw Error(ErrorKind::Validation, "--count must be positive");
    if (!scenario.ensemble) throw Error(ErrorKind::Validation, "scenario has no \"ensemble\" section");
    if (!std::isfinite(t1)) throw Error(ErrorKind::Validation, "--t1 must be finite");
  } catch (const Error& e) {
    std::cerr << "lcbd ensemble: " << e.what() << '\n';
    return kInputError;
  }

  TransportOptions options;
  options.bins = scenario.ensemble->bins;
  options.bootstrap = scenario.ensemble->bootstrap;
  options.jobs = jobs;
  options.rng_seed = seed_given ? seed : scenario.rng_seed;
  options.dt = scenario.integrator.dt;
  options.box0 = scenario.ensemble->box;
  if (scenario.ensemble->box_t1) options.box1 = *scenario.ensemble->box_t1;
  options.tolerances = scenario.integrator;

  const double t0 = scenario.boundary.t_start;
  TransportReport report;
  try {
    const TransportModel model = scenario.model == Model::Retarded ? TransportModel::Retarded : TransportModel::BohmDirac;
    report = transport_test(scenario.wavefunction(), t0, t1, count, model, options);
  } catch (const Error& e) {
    std::cerr << "lcbd ensemble: " << e.what() << '\n';
    return is_input_error(e.kind()) ? kInputError : kDynamicsError;
  }

  const auto doc = to_json(report);
  if (out_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    fs::create_directories(out_dir);
    write_json(fs::path(out_dir) / "ensemble.json", doc);
  }
  return kOk;
}

int cmd_sweep(const std::string& family_path, const std::vector<double>& eps, int jobs, const std::string& out_dir) {
  ScenarioFamily family;
  try {
    family = load_family(family_path);
    if (eps.empty()) throw Error(ErrorKind::Validation, "--eps needs at least one value");
    for (double e : eps)
      if (!(e > 0.0) || !std::isfinite(e)) throw Error(ErrorKind::Validation, "--eps values must be positive");
  } catch (const Error& e) {
    std::cerr << "lcbd sweep: " << e.what() << '\n';
    return kInputError;
  }

  SweepTable table;
  try {
    table = limit_sweep(family, eps, jobs);
  } catch (const Error& e) {
    std::cerr << "lcbd sweep: " << e.what() << '\n';
    return is_input_error(e.kind()) ? kInputError : kDynamicsError;
  }
  const auto doc = to_json(table);
  if (out_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    fs::create_directories(out_dir);
    write_json(fs::path(out_dir) / "sweep.json", doc);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retarded light-cone guidance for N Dirac particles"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::string ensemble_out;
  std::uint64_t seed = 1;
  int jobs = 1;
  int count = 0;
  double t1 = 0.0;
  std::vector<double> eps;

  auto* run_cmd = app.add_subcommand("run", "integrate one scenario and write trajectories.csv + report.json");
  run_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* checks_cmd = app.add_subcommand("checks", "run the invariant suite");
  checks_cmd->add_option("--seed", seed, "seed for the random draws");

  auto* ensemble_cmd = app.add_subcommand("ensemble", "transport a |psi|^2 ensemble and compare with |psi(t1)|^2");
  ensemble_cmd->add_option("--scenario", scenario_path, "scenario JSON file with an ensemble section")->required();
  ensemble_cmd->add_option("--count", count, "ensemble size")->required();
  ensemble_cmd->add_option("--t1", t1, "comparison time")->required();
  auto* seed_opt = ensemble_cmd->add_option("--seed", seed, "sampling seed (default: scenario rng_seed)");
  ensemble_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  ensemble_cmd->add_option("--out-dir", ensemble_out, "write ensemble.json here instead of stdout");

  auto* sweep_cmd = app.add_subcommand("sweep", "retarded vs Bohm-Dirac deviation over a family of slow-downs");
  sweep_cmd->add_option("--scenario", scenario_path, "family JSON file")->required();
  sweep_cmd->add_option("--eps", eps, "velocity scale factors")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out-dir", ensemble_out, "write sweep.json here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*run_cmd) return cmd_run(scenario_path, out_dir);
    if (*checks_cmd) return cmd_checks(seed);
    if (*ensemble_cmd) return cmd_ensemble(scenario_path, count, t1, seed, seed_opt->count() > 0, jobs, ensemble_out);
    if (*sweep_cmd) return cmd_sweep(scenario_path, eps, jobs, ensemble_out);
  } catch (const std::exception& e) {
    std::cerr << "lcbd: " << e.what() << '\n';
    return kDynamicsError;
  }
  return kInputError;
}
