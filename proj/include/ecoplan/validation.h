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

// Oracles that do not go through the transcription: a fixed-step RK4
// simulator of the vehicle, a generator of random schedules that satisfy
// every constraint, and the steady-cruise speed that minimizes consumption
// per meter.

#ifndef ECOPLAN_VALIDATION_H_
#define ECOPLAN_VALIDATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecoplan/model.h"
#include "ecoplan/trajectory.h"

namespace ecoplan {

// Piecewise-constant controls, one value per grid interval.
struct ControlSchedule {
  Grid grid;
  Eigen::VectorXd P_drv;  // W
  Eigen::VectorXd P_brk;  // W, >= 0

  // Throws std::invalid_argument on a size mismatch, a negative brake power
  // or a drive power outside the engine domain.
  void Validate(const EngineModel& engine) const;
};

ControlSchedule ControlsOf(const Trajectory& trajectory);

struct Simulation {
  Trajectory trajectory;  // simulated kind, states at grid nodes
  // Kinetic energy removed by the clamp at zero, J.
  double shed_energy = 0.0;
};

Simulation SimulateForward(const ControlSchedule& schedule,
                           const Scenario& scenario, int substeps = 10);

struct RandomSchedule {
  ControlSchedule schedule;
  Simulation simulation;
};

struct RandomScheduleSet {
  std::vector<RandomSchedule> accepted;
  int attempts = 0;
  std::string warning;  // set when fewer than requested were found
};

// Draws speed-target policies from `seed`, converts each to piecewise
// constant controls on an N-interval grid, simulates it and keeps those
// that pass CheckFeasibility with no tolerance allowances.
RandomScheduleSet RandomFeasibleSchedules(const Scenario& scenario, int N,
                                          int count, std::uint64_t seed,
                                          int max_attempts = 0);

// Consumption per meter at steady speed v, J/m.
double CruiseConsumption(const VehicleParams& vehicle,
                         const EngineModel& engine, double v);

// Golden-section minimizer of CruiseConsumption on [0.5, 80] m/s. Throws
// std::domain_error if the minimum sits on the bracket edge or the engine
// domain does not cover the bracket.
double CruiseOracle(const VehicleParams& vehicle, const EngineModel& engine);

}  // namespace ecoplan

#endif  // ECOPLAN_VALIDATION_H_
