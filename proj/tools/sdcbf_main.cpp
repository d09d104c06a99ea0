// Scenario-driven front end: run episodes, validate configs, sweep one axis.
#include <CLI11.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sdcbf/errors.hpp"
#include "sdcbf/scenario.hpp"
#include "sdcbf/sim.hpp"

namespace fs = std::filesystem;
using namespace sdcbf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSafety = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> eps_x;
  std::optional<double> eps_u;
  std::optional<double> rate;  // Hz; wins over the scenario's dt
  std::optional<int> taylor_order;
  std::optional<long> pop_budget;
};

void add_override_flags(CLI::App& cmd, Overrides& ov) {
  cmd.add_option("--seed", ov.seed, "Noise seed override");
  cmd.add_option("--eps-x", ov.eps_x, "Measurement noise bound override")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--eps-u", ov.eps_u, "Actuation noise bound override")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--rate", ov.rate, "Sampling rate in Hz (sets dt = 1/rate)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--taylor-order", ov.taylor_order, "Taylor model order override")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--pop-budget", ov.pop_budget, "Branch and bound node budget override")
      ->check(CLI::PositiveNumber);
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const Overrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.eps_x) cfg.eps_x = *ov.eps_x;
  if (ov.eps_u) cfg.eps_u = *ov.eps_u;
  if (ov.rate) cfg.dt = 1.0 / *ov.rate;
  if (ov.taylor_order) cfg.taylor_order = *ov.taylor_order;
  if (ov.pop_budget) cfg.pop_budget = *ov.pop_budget;
  return cfg;
}

// Runs one episode and writes the four artifacts into out_dir.
SimLog run_cell(const ScenarioConfig& cfg, const std::string& controller,
                const fs::path& out_dir) {
  CompiledScenario sc = compile_scenario(cfg);
  ControllerKind kind = controller_from_string(controller);
  NoiseModel noise{cfg.eps_x, cfg.eps_u, noise_mode_from_string(cfg.noise_mode), cfg.seed};
  SimLog log = run_episode(sc, kind, noise);

  fs::create_directories(out_dir);
  std::ofstream traj(out_dir / "trajectory.csv", std::ios::binary);
  write_trajectory_csv(log, traj);
  std::ofstream steps(out_dir / "steps.csv", std::ios::binary);
  write_steps_csv(log, steps);
  std::ofstream summary(out_dir / "summary.json", std::ios::binary);
  write_summary_json(log, sc, summary);
  std::ofstream timing(out_dir / "timing.json", std::ios::binary);
  write_timing_json(log, timing);
  if (!traj || !steps || !summary || !timing)
    throw IOError("failed to write artifacts under " + out_dir.string());
  return log;
}

std::string one_line(const SimLog& log) {
  std::ostringstream s;
  s << "status=" << to_string(log.status) << " steps=" << log.steps.size()
    << " min_h=" << log.min_h_overall << " violation=" << (log.violation ? "true" : "false");
  if (log.violation) s << " first_violation_t=" << log.first_violation_time;
  if (log.qp_infeasible_steps > 0) s << " infeasible_steps=" << log.qp_infeasible_steps;
  return s.str();
}

// Exit contract: the unfiltered baseline always succeeds (a violation is its
// expected result and lands in summary.json); a filtered episode fails the
// invocation when it was unsafe or could not complete.
int exit_for(const std::string& controller, const SimLog& log) {
  if (controller == "naive") return kExitOk;
  if (log.violation || log.status != EpisodeStatus::ok) return kExitSafety;
  return kExitOk;
}

struct SweepSetter {
  const char* name;
  void (*set)(ScenarioConfig&, double);
};

constexpr SweepSetter kAxes[] = {
    {"eps_x", [](ScenarioConfig& c, double v) { c.eps_x = v; }},
    {"eps_u", [](ScenarioConfig& c, double v) { c.eps_u = v; }},
    {"dt", [](ScenarioConfig& c, double v) { c.dt = v; }},
    {"rate", [](ScenarioConfig& c, double v) { c.dt = 1.0 / v; }},
    {"horizon", [](ScenarioConfig& c, double v) { c.horizon = v; }},
    {"seed", [](ScenarioConfig& c, double v) { c.seed = static_cast<std::uint64_t>(v); }},
    {"taylor_order", [](ScenarioConfig& c, double v) { c.taylor_order = static_cast<int>(v); }},
    {"pop_budget", [](ScenarioConfig& c, double v) { c.pop_budget = static_cast<long>(v); }},
};

const SweepSetter* find_axis(const std::string& name) {
  for (const auto& a : kAxes)
    if (name == a.name) return &a;
  return nullptr;
}

struct SweepCell {
  std::string controller;
  std::string value_token;
  double value = 0.0;
  fs::path dir;
  // filled by the worker
  bool ran = false;
  std::string error;
  EpisodeStatus status = EpisodeStatus::ok;
  size_t steps = 0;
  double min_h = 0.0;
  bool violation = false;
  double first_violation_time = -1.0;
  int infeasible_steps = 0;
};

int cmd_run(const std::string& scenario, const std::string& controller,
            const std::string& out, const Overrides& ov) {
  ScenarioConfig cfg = apply_overrides(load_scenario(scenario), ov);
  SimLog log = run_cell(cfg, controller, out);
  std::cout << cfg.name << " " << controller << ": " << one_line(log) << "\n"
            << "artifacts written to " << out << "\n";
  return exit_for(controller, log);
}

int cmd_validate(const std::string& scenario) {
  ScenarioConfig cfg = load_scenario(scenario);
  ValidationReport rep = validate_scenario(cfg);
  std::cout << rep.text();
  std::cout << (rep.ok ? "OK" : "INVALID") << "\n";
  return rep.ok ? kExitOk : kExitConfig;
}

int cmd_sweep(const std::string& scenario, const std::string& axis,
              const std::vector<std::string>& value_tokens,
              const std::vector<std::string>& controllers, const std::string& out,
              int workers, const Overrides& ov) {
  const SweepSetter* setter = find_axis(axis);
  if (!setter) {
    std::ostringstream names;
    for (const auto& a : kAxes) names << " " << a.name;
    throw DomainError("unknown sweep axis '" + axis + "'; expected one of:" + names.str());
  }
  if (value_tokens.empty()) throw DomainError("sweep needs at least one --values entry");
  for (const auto& c : controllers) controller_from_string(c);  // fail fast on typos

  ScenarioConfig base = apply_overrides(load_scenario(scenario), ov);

  std::vector<SweepCell> cells;
  for (const auto& controller : controllers) {
    for (const auto& token : value_tokens) {
      SweepCell cell;
      cell.controller = controller;
      cell.value_token = token;
      size_t used = 0;
      try {
        cell.value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size())
        throw DomainError("sweep value '" + token + "' is not a number");
      cell.dir = fs::path(out) / (controller + "_" + axis + "_" + token);
      cells.push_back(std::move(cell));
    }
  }

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      SweepCell& cell = cells[i];
      try {
        ScenarioConfig cfg = base;
        setter->set(cfg, cell.value);
        SimLog log = run_cell(cfg, cell.controller, cell.dir);
        cell.ran = true;
        cell.status = log.status;
        cell.steps = log.steps.size();
        cell.min_h = log.min_h_overall;
        cell.violation = log.violation;
        cell.first_violation_time = log.first_violation_time;
        cell.infeasible_steps = log.qp_infeasible_steps;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  int pool = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  std::vector<std::thread> threads;
  for (int i = 1; i < pool; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  fs::create_directories(out);
  std::ofstream cmp(fs::path(out) / "comparison.csv", std::ios::binary);
  cmp << "scenario,controller," << axis
      << ",status,steps,min_h,violation,first_violation_time,qp_infeasible_steps\r\n";
  int code = kExitOk;
  for (const SweepCell& cell : cells) {
    if (!cell.ran) {
      std::cerr << "error: " << cell.controller << " " << axis << "=" << cell.value_token
                << ": " << cell.error << "\n";
      code = kExitConfig;
      continue;
    }
    cmp << base.name << "," << cell.controller << "," << cell.value_token << ","
        << to_string(cell.status) << "," << cell.steps << "," << cell.min_h << ","
        << (cell.violation ? "true" : "false") << "," << cell.first_violation_time << ","
        << cell.infeasible_steps << "\r\n";
    std::cout << cell.controller << " " << axis << "=" << cell.value_token << ": status="
              << to_string(cell.status) << " min_h=" << cell.min_h << " violation="
              << (cell.violation ? "true" : "false") << "\n";
    if (code == kExitOk && cell.controller != "naive" &&
        (cell.violation || cell.status != EpisodeStatus::ok))
      code = kExitSafety;
  }
  if (!cmp) throw IOError("failed to write comparison.csv under " + out);
  std::cout << "comparison written to " << (fs::path(out) / "comparison.csv").string()
            << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled-data barrier-filtered control: scenario runner"};
  app.require_subcommand(1);
  const std::vector<std::string> kinds = {"naive", "sdcbf", "usdcbf"};

  std::string scenario, controller = "usdcbf", out = "out";
  Overrides ov;

  CLI::App* run = app.add_subcommand("run", "Run one closed-loop episode");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--controller", controller, "Controller variant")
      ->check(CLI::IsMember(kinds));
  run->add_option("--out", out, "Output directory")->required();
  add_override_flags(*run, ov);

  CLI::App* validate = app.add_subcommand("validate", "Statically check a scenario file");
  validate->add_option("--scenario", scenario, "Scenario file")->required();

  std::string axis;
  std::vector<std::string> values;
  std::vector<std::string> controllers = {"naive", "usdcbf"};
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run a one-axis parameter sweep across controllers");
  sweep->add_option("--scenario", scenario, "Scenario file")->required();
  sweep->add_option("--axis", axis, "Scalar config field to vary")->required();
  sweep->add_option("--values", values, "Values for the axis")->delimiter(',');
  sweep->add_option("--controller", controllers, "Controller variants to cross with")
      ->delimiter(',')
      ->check(CLI::IsMember(kinds));
  sweep->add_option("--out", out, "Output directory")->required();
  sweep->add_option("--workers", workers, "Parallel episode workers")
      ->check(CLI::PositiveNumber);
  add_override_flags(*sweep, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(scenario, controller, out, ov);
    if (validate->parsed()) return cmd_validate(scenario);
    return cmd_sweep(scenario, axis, values, controllers, out, workers, ov);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
