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

#include "ecoplan/validation.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ecoplan/recovery.h"

namespace ecoplan {
namespace {

struct State {
  double x;
  double K;
  double E;
};

State Axpy(const State& s, double a, const State& d) {
  return {s.x + a * d.x, s.K + a * d.K, s.E + a * d.E};
}

class Plant {
 public:
  explicit Plant(const Scenario& scenario) : sc_(scenario) {}

  State Rate(double t, const State& s, double drive, double brake) const {
    const double K = std::max(s.K, 0.0);
    const double v = std::sqrt(2.0 * K / sc_.vehicle.mass);
    const double loss =
        DragPower(sc_.vehicle, v) + RollingPower(sc_.vehicle, v);
    return {v, drive - loss - brake + sc_.TerrainAt(t),
            -EngineRate(sc_.engine, drive) + sc_.SolarAt(t)};
  }

  // Integrates one grid interval of length h with constant controls.
  State Advance(double t0, double h, int substeps, State s, double drive,
                double brake, double* shed) const {
    const double dt = h / substeps;
    const double t_end = std::min(t0 + h, sc_.horizon);
    for (int i = 0; i < substeps; ++i) {
      const double t = t0 + i * dt;
      const double t_mid = std::min(t + 0.5 * dt, t_end);
      const double t_next = std::min(t + dt, t_end);
      const State k1 = Rate(t, s, drive, brake);
      const State k2 = Rate(t_mid, Axpy(s, 0.5 * dt, k1), drive, brake);
      const State k3 = Rate(t_mid, Axpy(s, 0.5 * dt, k2), drive, brake);
      const State k4 = Rate(t_next, Axpy(s, dt, k3), drive, brake);
      s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      s.K += dt / 6.0 * (k1.K + 2.0 * k2.K + 2.0 * k3.K + k4.K);
      s.E += dt / 6.0 * (k1.E + 2.0 * k2.E + 2.0 * k3.E + k4.E);
      if (s.K < 0.0) {
        if (shed) *shed += -s.K;
        s.K = 0.0;
      }
    }
    return s;
  }

 private:
  const Scenario& sc_;
};

double MaxOver(const Signal& signal, double t0, double t1, int samples) {
  double best = -kInfinity;
  for (int i = 0; i <= samples; ++i) {
    best = std::max(best, Sample(signal, t0 + (t1 - t0) * i / samples));
  }
  return best;
}

double MinOver(const Signal& signal, double t0, double t1, int samples) {
  double best = kInfinity;
  for (int i = 0; i <= samples; ++i) {
    best = std::min(best, Sample(signal, t0 + (t1 - t0) * i / samples));
  }
  return best;
}

// Margins that keep generated schedules strictly inside the constraints.
constexpr double kAccelerationMargin = 0.9;
constexpr double kSpeedMargin = 0.02;  // fraction of the speed scale

}  // namespace

void ControlSchedule::Validate(const EngineModel& engine) const {
  if (P_drv.size() != grid.N || P_brk.size() != grid.N) {
    throw std::invalid_argument("control schedule does not match its grid");
  }
  for (int j = 0; j < grid.N; ++j) {
    if (!(P_brk[j] >= 0.0)) {
      std::ostringstream os;
      os << "brake power must be nonnegative (interval " << j << ": "
         << P_brk[j] << " W)";
      throw std::invalid_argument(os.str());
    }
    if (!(P_drv[j] >= engine.p_min() && P_drv[j] <= engine.p_max())) {
      std::ostringstream os;
      os << "drive power " << P_drv[j] << " W on interval " << j
         << " is outside the engine domain";
      throw std::invalid_argument(os.str());
    }
  }
}

ControlSchedule ControlsOf(const Trajectory& trajectory) {
  ControlSchedule schedule;
  schedule.grid = trajectory.grid;
  schedule.P_drv = trajectory.P_drv;
  schedule.P_brk = trajectory.P_brk.cwiseMax(0.0);
  return schedule;
}

Simulation SimulateForward(const ControlSchedule& schedule,
                           const Scenario& scenario, int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const Grid& grid = schedule.grid;
  const Scenario sc = scenario.WithHorizon(grid.T);
  schedule.Validate(sc.engine);
  const Plant plant(sc);

  Simulation sim;
  Trajectory& traj = sim.trajectory;
  traj = MakeTrajectory(grid, TrajectoryKind::kSimulated);
  State s{sc.x_init, 0.5 * sc.vehicle.mass * sc.v_init * sc.v_init,
          sc.E_init};
  for (int k = 0;; ++k) {
    traj.x[k] = s.x;
    traj.K[k] = s.K;
    traj.v[k] = std::sqrt(2.0 * s.K / sc.vehicle.mass);
    traj.E[k] = s.E;
    if (k == grid.N) break;
    traj.P_drv[k] = schedule.P_drv[k];
    traj.P_brk[k] = schedule.P_brk[k];
    s = plant.Advance(grid.Time(k), grid.h, substeps, s, schedule.P_drv[k],
                      schedule.P_brk[k], &sim.shed_energy);
  }
  return sim;
}

RandomScheduleSet RandomFeasibleSchedules(const Scenario& scenario, int N,
                                          int count, std::uint64_t seed,
                                          int max_attempts) {
  const Scenario sc = Validate(scenario);
  const Grid grid = MakeGrid(sc.horizon, N);
  const VehicleParams& veh = sc.vehicle;
  const EngineModel& engine = sc.engine;
  const double m = veh.mass;
  const double h = grid.h;
  const double T = grid.T;
  if (max_attempts <= 0) max_attempts = 20 * count + 100;

  double v_top = 0.0;
  double a_low = kInfinity;
  for (int k = 0; k <= N; ++k) {
    v_top = std::max(v_top, Sample(sc.v_max, grid.Time(k)));
    a_low = std::min(a_low, Sample(sc.a_max, grid.Time(k)));
  }
  const double margin = kSpeedMargin * std::max(v_top, 1e-3);
  // Time needed to climb to any lower limit ahead.
  const double reach =
      a_low > 0.0 ? v_top / (kAccelerationMargin * a_low) : T;

  const double waste_scale = 0.02 * m * std::max(a_low, 0.1) * v_top;

  FeasibilityTolerances strict;
  strict.relative = 1e-12;
  strict.acceleration_steps = 0.0;

  const Plant plant(sc);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomScheduleSet out;

  while (static_cast<int>(out.accepted.size()) < count &&
         out.attempts < max_attempts) {
    ++out.attempts;
    // Each policy holds a fraction of the admissible speed band, changing
    // at a few random times.
    const int segments = 1 + static_cast<int>(unit(rng) * 4.0);
    const double base = 0.35 + 0.6 * unit(rng);
    std::vector<double> switch_times;
    std::vector<double> fractions;
    std::vector<double> wastes;
    for (int i = 0; i < segments; ++i) {
      switch_times.push_back(i == 0 ? 0.0 : unit(rng) * T);
      fractions.push_back(
          std::clamp(base + 0.3 * (unit(rng) - 0.5), 0.05, 0.98));
      // Power burnt by driving against the brake.
      wastes.push_back(unit(rng) < 0.5 ? unit(rng) * waste_scale : 0.0);
    }
    std::sort(switch_times.begin(), switch_times.end());

    ControlSchedule schedule;
    schedule.grid = grid;
    schedule.P_drv = Eigen::VectorXd::Zero(N);
    schedule.P_brk = Eigen::VectorXd::Zero(N);
    State s{sc.x_init, 0.5 * m * sc.v_init * sc.v_init, sc.E_init};
    int segment = 0;
    for (int j = 0; j < N; ++j) {
      const double t = grid.Time(j);
      const double t_next = grid.Time(j + 1);
      while (segment + 1 < segments && switch_times[segment + 1] <= t) {
        ++segment;
      }
      const double hi =
          MinOver(sc.v_max, t_next, std::min(t_next + 2.0 * h, T), 8) -
          margin;
      const double lo =
          MaxOver(sc.v_min, t_next, std::min(t_next + reach, T), 32) +
          margin;
      const double target =
          lo <= hi ? lo + fractions[segment] * (hi - lo) : 0.5 * (lo + hi);

      const double v = std::sqrt(2.0 * std::max(s.K, 0.0) / m);
      const double a = Sample(sc.a_max, t_next);
      const double v_next =
          std::max(0.0, std::min(target, v + kAccelerationMargin * a * h));
      const double loss =
          0.5 * (DragPower(veh, v) + RollingPower(veh, v) +
                 DragPower(veh, v_next) + RollingPower(veh, v_next));
      const double net = 0.5 * m * (v_next * v_next - v * v) / h + loss -
                         sc.TerrainAt(grid.Midpoint(j));
      const double drive =
          std::clamp(net + wastes[segment], engine.p_min(), engine.p_max());
      schedule.P_drv[j] = drive;
      schedule.P_brk[j] = std::max(0.0, drive - net);
      s = plant.Advance(t, h, 10, s, schedule.P_drv[j], schedule.P_brk[j],
                        nullptr);
    }

    Simulation sim = SimulateForward(schedule, sc);
    if (sim.shed_energy > 0.0) continue;
    const FeasibilityReport report =
        CheckFeasibility(sim.trajectory, sc, strict);
    if (!report.feasible) continue;
    out.accepted.push_back({std::move(schedule), std::move(sim)});
  }
  if (static_cast<int>(out.accepted.size()) < count) {
    std::ostringstream os;
    os << "only " << out.accepted.size() << " of " << count
       << " feasible schedules found in " << out.attempts << " attempts";
    out.warning = os.str();
  }
  return out;
}

double CruiseConsumption(const VehicleParams& vehicle,
                         const EngineModel& engine, double v) {
  const double demand = DragPower(vehicle, v) + RollingPower(vehicle, v);
  return EngineRate(engine, demand) / v;
}

double CruiseOracle(const VehicleParams& vehicle, const EngineModel& engine) {
  constexpr double kLow = 0.5;
  constexpr double kHigh = 80.0;
  constexpr double kTolerance = 1e-4;
  for (double v : {kLow, kHigh}) {
    const double demand = DragPower(vehicle, v) + RollingPower(vehicle, v);
    if (demand < engine.p_min() || demand > engine.p_max()) {
      throw std::domain_error(
          "engine domain does not cover the cruise search bracket");
    }
  }
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = kLow;
  double b = kHigh;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = CruiseConsumption(vehicle, engine, c);
  double fd = CruiseConsumption(vehicle, engine, d);
  while (b - a > kTolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = CruiseConsumption(vehicle, engine, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = CruiseConsumption(vehicle, engine, d);
    }
  }
  const double v_star = 0.5 * (a + b);
  if (v_star - kLow < 10.0 * kTolerance || kHigh - v_star < 10.0 * kTolerance) {
    throw std::domain_error("cruise minimum lies on the search bracket edge");
  }
  return v_star;
}

}  // namespace ecoplan
