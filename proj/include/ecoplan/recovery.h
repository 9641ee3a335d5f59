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

// Maps a relaxed solution to a physical trajectory and audits the result
// against the original (unrelaxed) constraints on the grid.
//
// The recovered speed is read from the kinetic energy alone, drive power
// from the energy decrease through the inverse engine characteristic, and
// brake power closes the kinetic energy balance. The relaxed speed and drive
// power are never read, so the construction depends only on K and E.

#ifndef ECOPLAN_RECOVERY_H_
#define ECOPLAN_RECOVERY_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "ecoplan/model.h"
#include "ecoplan/trajectory.h"

namespace ecoplan {

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `tolerance` is relative to the power and kinetic scales of the grid; the
// energy decrease may leave the engine range, and K may dip below zero, by
// that much before recovery gives up.
Trajectory Recover(const Trajectory& relaxed, const Scenario& scenario,
                   double tolerance = 1e-6);

struct FeasibilityTolerances {
  double relative = 1e-6;
  // The speed increment per step may exceed a_max h by this many multiples
  // of a_max h before the acceleration check fails. The kinetic-energy form
  // used by the transcription admits up to twice a_max h when launching
  // from rest, so one multiple covers it.
  double acceleration_steps = 1.0;
};

struct ConstraintCheck {
  std::string name;
  double max_violation = 0.0;  // normalized, <= 0 when satisfied
  int worst_index = -1;
  bool checked = true;
};

struct FeasibilityReport {
  std::vector<ConstraintCheck> checks;
  // Largest raw excess of (v_{k+1} - v_k) / h over a_max, m/s^2.
  double acceleration_excess = 0.0;
  double min_brake_power = 0.0;  // W
  double tolerance = 0.0;
  bool feasible = false;

  double MaxViolation() const;
  // Null when the name is unknown.
  const ConstraintCheck* Find(const std::string& name) const;
};

// Checks, in order: initial_conditions, position_dynamics, speed_lower,
// speed_upper, acceleration, kinetic_definition, kinetic_balance,
// brake_nonnegative, engine_equality, engine_domain, energy_box and
// terminal_position. Simulated trajectories skip the three grid dynamics
// rows (they hold in continuous time by construction).
FeasibilityReport CheckFeasibility(const Trajectory& trajectory,
                                   const Scenario& scenario,
                                   const FeasibilityTolerances& tolerances =
                                       {});

}  // namespace ecoplan

#endif  // ECOPLAN_RECOVERY_H_
