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

// Drivers on top of solve + recover: a plan for a fixed horizon, the
// shortest feasible horizon, the horizon with the least consumption, and a
// sweep of consumption against horizon.

#ifndef ECOPLAN_PLANNER_H_
#define ECOPLAN_PLANNER_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecoplan/model.h"
#include "ecoplan/recovery.h"
#include "ecoplan/solver.h"
#include "ecoplan/trajectory.h"

namespace ecoplan {

// Thrown when a recovered trajectory fails its feasibility audit.
class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by the horizon searches when no horizon admits a feasible plan.
class NoFeasibleHorizon : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlanOptions {
  int N = 1000;
  SolverSettings solver;
  FeasibilityTolerances tolerances;
};

struct Plan {
  double horizon = 0.0;  // s
  SolveReport report;
  Trajectory relaxed;
  // Recovered trajectory and its audit; filled only when the solve is
  // optimal.
  std::optional<Trajectory> recovered;
  std::optional<FeasibilityReport> feasibility;

  bool optimal() const { return report.status == SolveStatus::kOptimal; }
  // E_init - E_N, J.
  double Consumption() const { return relaxed.Consumption(); }
};

// Transcribes `scenario` at horizon T, solves, recovers and audits. Solver
// statuses other than optimal are returned as is; an optimal solve whose
// recovery fails the audit throws PlanError.
Plan PlanFixedT(const Scenario& scenario, double T, const PlanOptions& options,
                const Trajectory* warm = nullptr);

// One feasibility or objective evaluation made by a search.
struct SearchStep {
  std::string stage;  // "bracket", "bisect", "scan", "cap", "probe", ...
  double T = 0.0;
  bool feasible = false;
  double margin = 0.0;       // phase I margin, when assessed
  double consumption = 0.0;  // J, when solved
  std::string status;
};

struct MinTimeResult {
  double T_star = 0.0;
  double T_lower = 0.0;  // kinematic lower bound
  Plan plan;
  std::vector<SearchStep> history;
  bool used_scan = false;
  std::string note;
};

struct MinTimeOptions {
  double t_tolerance = 0.5;  // s
  std::optional<double> T_hi;  // known feasible horizon
  // Bracketing stops after this many growth steps.
  int max_bracket_steps = 40;
};

// Bisection on the phase I sign over [T_lo, T_hi], with T_lo the distance
// over the top speed. Falls back to a scan in steps of t_tolerance when
// feasibility is seen to flip back to infeasible above a feasible horizon or
// the final plan fails. Throws NoFeasibleHorizon when nothing feasible is
// found.
MinTimeResult MinTime(const Scenario& scenario, const PlanOptions& options,
                      const MinTimeOptions& search = {});

struct MinEnergyResult {
  double T_opt = 0.0;
  double T_star = 0.0;
  double T_cap = 0.0;
  Plan plan;
  std::vector<SearchStep> history;
  bool used_scan = false;
  std::string note;
};

struct MinEnergyOptions {
  double t_tolerance = 0.5;  // s
  // Window [T_star, T_cap]; searched for when absent.
  std::optional<double> T_star;
  std::optional<double> T_cap;
  int probe_points = 11;
  // Largest horizon tried when searching for T_cap, as a multiple of T_star.
  double cap_limit = 64.0;
};

// Golden-section maximization of E_N over the feasible window after a
// coarse unimodality probe; falls back to the best probe point when the
// probe shows three or more interior reversals.
MinEnergyResult MinEnergy(const Scenario& scenario, const PlanOptions& options,
                          const MinEnergyOptions& search = {});

struct ParetoPoint {
  double T = 0.0;
  double consumption = 0.0;  // J
  SolveStatus status = SolveStatus::kNumericalFailure;
  Plan plan;
};

// One plan per horizon (ascending), each warm-started from the previous
// optimal one.
std::vector<ParetoPoint> Pareto(const Scenario& scenario,
                                const PlanOptions& options,
                                const std::vector<double>& horizons);

// Phase I sign at horizon T.
FeasibilityAssessment AssessHorizon(const Scenario& scenario, double T,
                                    const PlanOptions& options);

}  // namespace ecoplan

#endif  // ECOPLAN_PLANNER_H_
