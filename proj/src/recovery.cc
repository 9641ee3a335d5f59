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

#include "ecoplan/recovery.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecoplan/transcription.h"

namespace ecoplan {
namespace {

double AverageLoss(const VehicleParams& vehicle, double K0, double K1) {
  return 0.5 * (ResistiveLoss(vehicle, std::max(K0, 0.0)).value +
                ResistiveLoss(vehicle, std::max(K1, 0.0)).value);
}

// Running maximum of a normalized violation.
class Tracker {
 public:
  explicit Tracker(std::string name) { check_.name = std::move(name); }

  void Add(double violation, int index) {
    if (check_.worst_index < 0 || violation > check_.max_violation) {
      check_.max_violation = violation;
      check_.worst_index = index;
    }
  }
  ConstraintCheck Done() const { return check_; }
  static ConstraintCheck Skipped(std::string name) {
    ConstraintCheck c;
    c.name = std::move(name);
    c.checked = false;
    return c;
  }

 private:
  ConstraintCheck check_;
};

}  // namespace

Trajectory Recover(const Trajectory& relaxed, const Scenario& scenario,
                   double tolerance) {
  const Grid& grid = relaxed.grid;
  const Scenario sc = scenario.WithHorizon(grid.T);
  const Scales scales = ComputeScales(sc, grid);
  const VehicleParams& vehicle = sc.vehicle;
  const double m = vehicle.mass;
  const double h = grid.h;
  const int N = grid.N;

  Trajectory out = MakeTrajectory(grid, TrajectoryKind::kRecovered);
  out.K = relaxed.K;
  out.E = relaxed.E;

  const double kinetic_slack = tolerance * scales.kinetic;
  for (int k = 0; k <= N; ++k) {
    const double K = relaxed.K[k];
    if (!(K >= -kinetic_slack)) {
      std::ostringstream os;
      os << "kinetic energy " << K << " J at node " << k << " is negative";
      throw RecoveryError(os.str());
    }
    out.v[k] = std::sqrt(2.0 * std::max(K, 0.0) / m);
  }
  out.x[0] = relaxed.x[0];
  for (int k = 0; k < N; ++k) {
    out.x[k + 1] = out.x[k] + 0.5 * h * (out.v[k] + out.v[k + 1]);
  }

  const double power_slack = tolerance * scales.power;
  for (int j = 0; j < N; ++j) {
    const double t_mid = grid.Midpoint(j);
    const double demand =
        sc.SolarAt(t_mid) - (relaxed.E[j + 1] - relaxed.E[j]) / h;
    try {
      out.P_drv[j] = EngineInverse(sc.engine, demand, power_slack);
    } catch (const std::domain_error&) {
      std::ostringstream os;
      os << "energy decrease " << demand << " W on interval " << j
         << " is outside the engine range";
      throw RecoveryError(os.str());
    }
    out.P_brk[j] = out.P_drv[j] - AverageLoss(vehicle, out.K[j], out.K[j + 1]) +
                   sc.TerrainAt(t_mid) - (out.K[j + 1] - out.K[j]) / h;
  }
  return out;
}

double FeasibilityReport::MaxViolation() const {
  double worst = -kInfinity;
  for (const auto& c : checks) {
    if (c.checked) worst = std::max(worst, c.max_violation);
  }
  return worst;
}

const ConstraintCheck* FeasibilityReport::Find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

FeasibilityReport CheckFeasibility(const Trajectory& traj,
                                   const Scenario& scenario,
                                   const FeasibilityTolerances& tolerances) {
  const Grid& grid = traj.grid;
  const Scenario sc = scenario.WithHorizon(grid.T);
  const Scales S = ComputeScales(sc, grid);
  const VehicleParams& vehicle = sc.vehicle;
  const EngineModel& engine = sc.engine;
  const double m = vehicle.mass;
  const double h = grid.h;
  const int N = grid.N;
  const bool simulated = traj.kind == TrajectoryKind::kSimulated;

  FeasibilityReport report;
  report.tolerance = tolerances.relative;

  Tracker initial("initial_conditions");
  initial.Add(std::abs(traj.x[0] - sc.x_init) / S.position, 0);
  initial.Add(std::abs(traj.v[0] - sc.v_init) / S.speed, 0);
  initial.Add(std::abs(traj.K[0] - 0.5 * m * sc.v_init * sc.v_init) /
                  S.kinetic, 0);
  initial.Add(std::abs(traj.E[0] - sc.E_init) / S.energy, 0);
  report.checks.push_back(initial.Done());

  if (simulated) {
    report.checks.push_back(Tracker::Skipped("position_dynamics"));
  } else {
    Tracker position("position_dynamics");
    for (int k = 0; k < N; ++k) {
      const double step = 0.5 * h * (traj.v[k] + traj.v[k + 1]);
      position.Add(std::abs(traj.x[k + 1] - traj.x[k] - step) / S.position,
                   k);
    }
    report.checks.push_back(position.Done());
  }

  Tracker lower("speed_lower");
  Tracker upper("speed_upper");
  for (int k = 0; k <= N; ++k) {
    const double t = grid.Time(k);
    lower.Add((Sample(sc.v_min, t) - traj.v[k]) / S.speed, k);
    upper.Add((traj.v[k] - Sample(sc.v_max, t)) / S.speed, k);
  }
  report.checks.push_back(lower.Done());
  report.checks.push_back(upper.Done());

  Tracker accel("acceleration");
  report.acceleration_excess = -kInfinity;
  for (int k = 0; k < N; ++k) {
    const double a = Sample(sc.a_max, grid.Time(k + 1));
    const double increment = traj.v[k + 1] - traj.v[k];
    report.acceleration_excess =
        std::max(report.acceleration_excess, increment / h - a);
    const double allowed = a * h * (1.0 + tolerances.acceleration_steps);
    accel.Add((increment - allowed) / S.speed, k);
  }
  report.checks.push_back(accel.Done());

  Tracker kinetic("kinetic_definition");
  for (int k = 0; k <= N; ++k) {
    kinetic.Add(std::abs(traj.K[k] - 0.5 * m * traj.v[k] * traj.v[k]) /
                    S.kinetic, k);
  }
  report.checks.push_back(kinetic.Done());

  Tracker brake("brake_nonnegative");
  report.min_brake_power = kInfinity;
  for (int j = 0; j < N; ++j) {
    report.min_brake_power = std::min(report.min_brake_power, traj.P_brk[j]);
    brake.Add(-traj.P_brk[j] / S.power, j);
  }
  Tracker domain("engine_domain");
  for (int j = 0; j < N; ++j) {
    domain.Add((engine.p_min() - traj.P_drv[j]) / S.power, j);
    if (engine.bounded_above()) {
      domain.Add((traj.P_drv[j] - engine.p_max()) / S.power, j);
    }
  }

  if (simulated) {
    report.checks.push_back(Tracker::Skipped("kinetic_balance"));
    report.checks.push_back(brake.Done());
    report.checks.push_back(Tracker::Skipped("engine_equality"));
  } else {
    Tracker balance("kinetic_balance");
    Tracker rate("engine_equality");
    for (int j = 0; j < N; ++j) {
      const double t_mid = grid.Midpoint(j);
      const double net = traj.P_drv[j] -
                         AverageLoss(vehicle, traj.K[j], traj.K[j + 1]) +
                         sc.TerrainAt(t_mid) - traj.P_brk[j];
      balance.Add(std::abs((traj.K[j + 1] - traj.K[j]) / h - net) / S.power,
                  j);
      const double demand = sc.SolarAt(t_mid) - (traj.E[j + 1] - traj.E[j]) / h;
      rate.Add(std::abs(demand - EngineRateExtended(engine, traj.P_drv[j])) /
                   S.power, j);
    }
    report.checks.push_back(balance.Done());
    report.checks.push_back(brake.Done());
    report.checks.push_back(rate.Done());
  }
  report.checks.push_back(domain.Done());

  Tracker energy("energy_box");
  for (int k = 0; k <= N; ++k) {
    energy.Add((sc.E_min - traj.E[k]) / S.energy, k);
    energy.Add((traj.E[k] - sc.E_max) / S.energy, k);
  }
  report.checks.push_back(energy.Done());

  Tracker terminal("terminal_position");
  terminal.Add((sc.x_end - traj.FinalPosition()) / S.position, N);
  report.checks.push_back(terminal.Done());

  report.feasible = true;
  for (const auto& c : report.checks) {
    if (c.checked && !(c.max_violation <= tolerances.relative)) {
      report.feasible = false;
    }
  }
  return report;
}

}  // namespace ecoplan
