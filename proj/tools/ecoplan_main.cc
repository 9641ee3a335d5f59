// Copyright 2026 The ecoplan Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     https://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ecoplan command-line driver.
//
// Exit codes: 0 optimal (or feasible, for simulate and dominance), 2
// infeasible, 1 usage, input or numerical error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecoplan/io.h"
#include "ecoplan/model.h"
#include "ecoplan/planner.h"
#include "ecoplan/recovery.h"
#include "ecoplan/solver.h"
#include "ecoplan/transcription.h"
#include "ecoplan/validation.h"

namespace {

using namespace ecoplan;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr std::uint64_t kDefaultSeed = 20260101;

struct Args {
  std::string scenario;
  std::optional<double> horizon;
  int grid = 1000;
  std::string out;
  bool svg = false;
  double t_tol = 0.5;
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 20;
  std::string controls;
  int count = 100;
};

void WriteFile(const std::filesystem::path& path,
               const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  body(os);
  if (!os) throw std::runtime_error("error writing " + path.string());
}

void WriteJson(const std::filesystem::path& path,
               const nlohmann::ordered_json& json) {
  WriteFile(path, [&](std::ostream& os) { os << json.dump(2) << '\n'; });
}

std::filesystem::path OutputDir(const Args& args) {
  std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<double> ToVector(const Eigen::VectorXd& v, double scale = 1.0) {
  std::vector<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i] * scale;
  return out;
}

// One SVG per quantity, against time.
void WriteTrajectoryPlots(const std::filesystem::path& dir,
                          const Trajectory& traj, const Scenario& sc) {
  const Grid& grid = traj.grid;
  std::vector<double> nodes(grid.N + 1);
  std::vector<double> starts(grid.N);
  for (int k = 0; k <= grid.N; ++k) nodes[k] = grid.Time(k);
  for (int j = 0; j < grid.N; ++j) starts[j] = grid.Time(j);
  std::vector<double> lo(grid.N + 1);
  std::vector<double> hi(grid.N + 1);
  for (int k = 0; k <= grid.N; ++k) {
    lo[k] = Sample(sc.v_min, nodes[k]) * 3.6;
    hi[k] = Sample(sc.v_max, nodes[k]) * 3.6;
  }
  auto plot = [&](const std::string& name, const std::string& label,
                  std::vector<PlotSeries> series) {
    WriteFile(dir / (name + ".svg"), [&](std::ostream& os) {
      WriteSvgPlot(os, label, "t (s)", label, series);
    });
  };
  plot("speed", "speed (km/h)",
       {{"v", nodes, ToVector(traj.v, 3.6)}, {"v_min", nodes, lo},
        {"v_max", nodes, hi}});
  plot("position", "position (m)", {{"x", nodes, ToVector(traj.x)}});
  plot("kinetic", "kinetic energy (kJ)",
       {{"K", nodes, ToVector(traj.K, 1e-3)}});
  plot("energy", "internal energy (kJ)",
       {{"E", nodes, ToVector(traj.E, 1e-3)}});
  plot("drive_power", "drive power (kW)",
       {{"P_drv", starts, ToVector(traj.P_drv, 1e-3)}});
  plot("brake_power", "brake power (kW)",
       {{"P_brk", starts, ToVector(traj.P_brk, 1e-3)}});
}

// Writes the artifacts of one plan and returns its exit code.
int EmitPlan(const Args& args, const Scenario& sc, const Plan& plan) {
  const auto dir = OutputDir(args);
  WriteJson(dir / "solve.json", ToJson(plan.report));
  std::cout << "status " << StatusName(plan.report.status) << ", T "
            << plan.horizon << " s";
  if (!plan.optimal()) {
    std::cout << '\n';
    if (!plan.report.message.empty()) {
      std::cerr << "ecoplan: " << plan.report.message << '\n';
    }
    return plan.report.status == SolveStatus::kInfeasible ? kExitInfeasible
                                                          : kExitError;
  }
  std::cout << ", consumption " << plan.Consumption() / 1e3 << " kJ\n";
  const Trajectory& traj = *plan.recovered;
  WriteFile(dir / "trajectory.csv",
            [&](std::ostream& os) { WriteTrajectoryCsv(os, traj); });
  WriteFile(dir / "controls.csv",
            [&](std::ostream& os) { WriteControlsCsv(os, ControlsOf(traj)); });
  WriteJson(dir / "feasibility.json", ToJson(*plan.feasibility));
  if (args.svg) WriteTrajectoryPlots(dir, traj, sc.WithHorizon(plan.horizon));
  return kExitOk;
}

PlanOptions OptionsFor(const Args& args) {
  PlanOptions options;
  options.N = args.grid;
  return options;
}

Scenario Load(const Args& args, bool need_horizon) {
  Scenario sc = LoadScenario(args.scenario, /*require_horizon=*/false);
  if (args.horizon) {
    if (!(*args.horizon > 0.0)) {
      throw std::invalid_argument("--horizon must be positive");
    }
    sc = sc.WithHorizon(*args.horizon);
  }
  if (need_horizon && !(sc.horizon > 0.0)) {
    throw FormatError(args.scenario, "horizon.T_s",
                      "missing; pass --horizon");
  }
  return CheckScenario(sc, args.scenario);
}

int RunPlan(const Args& args) {
  const Scenario sc = Load(args, true);
  const Plan plan = PlanFixedT(sc, sc.horizon, OptionsFor(args));
  return EmitPlan(args, sc, plan);
}

int RunMinTime(const Args& args) {
  const Scenario sc = Load(args, false);
  MinTimeOptions search;
  search.t_tolerance = args.t_tol;
  const MinTimeResult result = MinTime(sc, OptionsFor(args), search);
  const auto dir = OutputDir(args);
  nlohmann::ordered_json json;
  json["T_star_s"] = result.T_star;
  json["T_lower_s"] = result.T_lower;
  json["used_scan"] = result.used_scan;
  json["note"] = result.note;
  json["history"] = ToJson(result.history);
  WriteJson(dir / "search.json", json);
  return EmitPlan(args, sc, result.plan);
}

int RunMinEnergy(const Args& args) {
  const Scenario sc = Load(args, false);
  MinEnergyOptions search;
  search.t_tolerance = args.t_tol;
  const MinEnergyResult result = MinEnergy(sc, OptionsFor(args), search);
  const auto dir = OutputDir(args);
  nlohmann::ordered_json json;
  json["T_opt_s"] = result.T_opt;
  json["T_star_s"] = result.T_star;
  json["T_cap_s"] = result.T_cap;
  json["used_scan"] = result.used_scan;
  json["note"] = result.note;
  json["history"] = ToJson(result.history);
  WriteJson(dir / "search.json", json);
  return EmitPlan(args, sc, result.plan);
}

int RunPareto(const Args& args) {
  if (!(args.t_min > 0.0) || !(args.t_max > args.t_min)) {
    throw std::invalid_argument("need 0 < --t-min < --t-max");
  }
  const Scenario sc = Load(args, false);
  const PlanOptions options = OptionsFor(args);
  std::vector<double> horizons(args.points);
  for (int i = 0; i < args.points; ++i) {
    horizons[i] =
        args.t_min + (args.t_max - args.t_min) * i / (args.points - 1);
  }
  const std::vector<ParetoPoint> points = Pareto(sc, options, horizons);
  const auto dir = OutputDir(args);
  WriteFile(dir / "pareto.csv",
            [&](std::ostream& os) { WriteParetoCsv(os, points); });

  std::vector<double> ts;
  std::vector<double> kj;
  for (const auto& p : points) {
    if (p.status != SolveStatus::kOptimal) continue;
    ts.push_back(p.T);
    kj.push_back(p.consumption / 1e3);
  }
  std::cout << ts.size() << " of " << points.size() << " horizons optimal\n";
  if (ts.empty()) return kExitInfeasible;

  if (args.svg) {
    std::vector<PlotSeries> series = {{"consumption", ts, kj}};
    MinEnergyOptions search;
    search.t_tolerance = args.t_tol;
    const MinEnergyResult best = MinEnergy(sc, options, search);
    const Plan fastest = PlanFixedT(sc, best.T_star, options);
    if (fastest.optimal()) {
      series.push_back({"minimum time", {best.T_star},
                        {fastest.Consumption() / 1e3}, true});
    }
    series.push_back({"minimum energy", {best.T_opt},
                      {best.plan.Consumption() / 1e3}, true});
    WriteFile(dir / "pareto.svg", [&](std::ostream& os) {
      WriteSvgPlot(os, "consumption against travel time", "T (s)",
                   "consumption (kJ)", series);
    });
  }
  return kExitOk;
}

int RunSimulate(const Args& args) {
  const Scenario sc = Load(args, true);
  std::ifstream in(args.controls, std::ios::binary);
  if (!in) throw FormatError(args.controls, "file", "cannot be opened");
  const ControlSchedule schedule =
      ReadControlsCsv(in, sc.horizon, args.controls);
  const Simulation sim = SimulateForward(schedule, sc);
  const FeasibilityReport report = CheckFeasibility(sim.trajectory, sc, {});
  const auto dir = OutputDir(args);
  WriteFile(dir / "trajectory.csv",
            [&](std::ostream& os) { WriteTrajectoryCsv(os, sim.trajectory); });
  nlohmann::ordered_json json = ToJson(report);
  json["shed_kinetic_energy_J"] = sim.shed_energy;
  WriteJson(dir / "feasibility.json", json);
  if (args.svg) WriteTrajectoryPlots(dir, sim.trajectory, sc);
  std::cout << (report.feasible ? "feasible" : "infeasible") << ", x_N "
            << sim.trajectory.FinalPosition() << " m, consumption "
            << sim.trajectory.Consumption() / 1e3 << " kJ\n";
  return report.feasible ? kExitOk : kExitInfeasible;
}

std::uint64_t SeedFromEnvironment() {
  const char* text = std::getenv("ECOPLAN_SEED");
  if (text == nullptr || *text == '\0') return kDefaultSeed;
  std::size_t used = 0;
  const std::string value(text);
  const unsigned long long seed = std::stoull(value, &used);
  if (used != value.size()) {
    throw std::invalid_argument("ECOPLAN_SEED must be an unsigned integer");
  }
  return seed;
}

// Compares the optimal final energy against random feasible schedules.
int RunDominance(const Args& args) {
  const Scenario sc = Load(args, true);
  const std::uint64_t seed = SeedFromEnvironment();
  const Plan plan = PlanFixedT(sc, sc.horizon, OptionsFor(args));
  if (!plan.optimal()) return EmitPlan(args, sc, plan);
  const RandomScheduleSet set =
      RandomFeasibleSchedules(sc, args.grid, args.count, seed);
  double best = -kInfinity;
  for (const auto& s : set.accepted) {
    best = std::max(best, s.simulation.trajectory.FinalEnergy());
  }
  const double excess = best - plan.relaxed.FinalEnergy();
  const bool dominated = excess <= 1e-4 * sc.E_init;
  const auto dir = OutputDir(args);
  nlohmann::ordered_json json;
  json["seed"] = seed;
  json["accepted"] = set.accepted.size();
  json["attempts"] = set.attempts;
  json["warning"] = set.warning;
  json["optimal_final_energy_kJ"] = plan.relaxed.FinalEnergy() / 1e3;
  json["best_random_final_energy_kJ"] = set.accepted.empty() ? 0.0 : best / 1e3;
  json["dominated"] = dominated;
  WriteJson(dir / "dominance.json", json);
  std::cout << set.accepted.size() << " random schedules, best E_N "
            << best / 1e3 << " kJ against optimal "
            << plan.relaxed.FinalEnergy() / 1e3 << " kJ\n";
  if (!set.warning.empty()) std::cerr << "ecoplan: " << set.warning << '\n';
  return dominated && !set.accepted.empty() ? kExitOk : kExitError;
}

int RunDump(const Args& args) {
  const Scenario sc = Load(args, true);
  DumpProblem(Transcribe(sc, args.grid), std::cout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-optimal speed planning along a fixed path."};
  app.require_subcommand(1);
  Args args;
  std::function<int(const Args&)> run;

  const CLI::Validator positive(
      [](std::string& text) -> std::string {
        double value = 0.0;
        if (!CLI::detail::lexical_cast(text, value) || !(value > 0.0)) {
          return "must be positive, got " + text;
        }
        return {};
      },
      "POSITIVE");
  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--scenario", args.scenario, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--grid", args.grid, "number of grid intervals N")
        ->check(CLI::Range(2, 1000000));
    if (needs_out) {
      cmd->add_option("--out", args.out, "output directory")->required();
    }
  };
  auto add_horizon = [&](CLI::App* cmd) {
    cmd->add_option("--horizon", args.horizon,
                    "travel time T in s (overrides horizon.T_s)")
        ->check(positive);
  };

  CLI::App* plan = app.add_subcommand("plan", "plan for a fixed travel time");
  add_common(plan, true);
  add_horizon(plan);
  plan->add_flag("--svg", args.svg, "also write SVG plots");
  plan->callback([&] { run = RunPlan; });

  for (const auto& [name, help, fn] :
       {std::tuple{"min-time", "shortest feasible travel time", RunMinTime},
        std::tuple{"min-energy", "travel time with the least consumption",
                   RunMinEnergy}}) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, true);
    cmd->add_option("--t-tol", args.t_tol, "search tolerance in s")
        ->check(positive);
    cmd->add_flag("--svg", args.svg, "also write SVG plots");
    cmd->callback([&run, fn = fn] { run = fn; });
  }

  CLI::App* pareto =
      app.add_subcommand("pareto", "consumption over a travel time sweep");
  add_common(pareto, true);
  pareto->add_option("--t-min", args.t_min, "shortest horizon in s")
      ->required()
      ->check(positive);
  pareto->add_option("--t-max", args.t_max, "longest horizon in s")
      ->required()
      ->check(positive);
  pareto->add_option("--points", args.points, "number of horizons M")
      ->check(CLI::Range(2, 100000));
  pareto->add_option("--t-tol", args.t_tol,
                     "search tolerance for the marked points in s")
      ->check(positive);
  pareto->add_flag("--svg", args.svg, "also write an SVG plot");
  pareto->callback([&] { run = RunPareto; });

  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate a control schedule");
  add_common(simulate, true);
  add_horizon(simulate);
  simulate->add_option("--controls", args.controls, "controls CSV")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_flag("--svg", args.svg, "also write SVG plots");
  simulate->callback([&] { run = RunSimulate; });

  CLI::App* dominance = app.add_subcommand(
      "dominance", "compare the plan with random feasible schedules");
  add_common(dominance, true);
  add_horizon(dominance);
  dominance->add_option("--count", args.count, "number of random schedules")
      ->check(CLI::Range(1, 100000));
  dominance->callback([&] { run = RunDominance; });

  CLI::App* dump =
      app.add_subcommand("dump-problem", "print the discretized problem");
  add_common(dump, false);
  add_horizon(dump);
  dump->callback([&] { run = RunDump; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    return run(args);
  } catch (const NoFeasibleHorizon& e) {
    std::cerr << "ecoplan: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "ecoplan: " << e.what() << '\n';
    return kExitError;
  }
}
