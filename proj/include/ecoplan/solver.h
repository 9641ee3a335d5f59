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

// Log-barrier interior-point solver for the transcribed relaxed problem.
//
// The initial conditions are fixed and the position chain is eliminated
// (x_N is a trapezoidal sum of the speeds), leaving 4N free variables
// grouped per interval j as [P_j, v_{j+1}, K_{j+1}, E_{j+1}]. Every
// inequality except the terminal position couples at most two adjacent
// groups, so the barrier Hessian is block tridiagonal plus a rank-one term
// from the terminal row; Newton steps use a block Cholesky factorization and
// a Sherman-Morrison correction, linear in N.
//
// Every inequality except the kinetic-energy relaxation K >= 1/2 m v^2 is
// enforced with a small normalized allowance (SolverSettings::relaxation) so
// that degenerate instances such as v_min == v_max keep a nonempty interior.

#ifndef ECOPLAN_SOLVER_H_
#define ECOPLAN_SOLVER_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecoplan/trajectory.h"
#include "ecoplan/transcription.h"

namespace ecoplan {

struct SolverSettings {
  double eps_gap = 1e-6;   // relative duality gap
  double eps_feas = 1e-6;  // relative (normalized) constraint tolerance
  double mu = 10.0;        // barrier parameter multiplier
  int max_newton = 50;     // per centering step
  double slope_fraction = 0.01;
  double shrink = 0.5;
  int max_total_iterations = 2000;
  // Newton decrement threshold lambda^2 / 2 for centering.
  double newton_tolerance = 1e-9;
  // Allowance on each normalized inequality; negative selects 0.1 eps_feas.
  double relaxation = -1.0;

  double EffectiveRelaxation() const {
    return relaxation >= 0.0 ? relaxation : 0.1 * eps_feas;
  }
  // Throws std::invalid_argument.
  void Validate() const;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations,
                         kNumericalFailure };

std::string StatusName(SolveStatus status);

// One completed centering step of the barrier method.
struct OuterIterate {
  double t = 0.0;
  double objective = 0.0;    // E_N, J
  double gap = 0.0;          // m / t, J
  double upper_bound = 0.0;  // objective + gap, J
  int newton_iterations = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective = 0.0;               // E_N, J
  double duality_gap = 0.0;             // J
  double max_equality_residual = 0.0;   // normalized
  double max_inequality_violation = 0.0;  // normalized
  double stationarity_residual = 0.0;   // normalized
  // Largest Lagrangian-gradient entry relative to the sum of the magnitudes
  // of the objective and multiplier terms that cancel in it.
  double relative_stationarity = 0.0;
  int newton_iterations = 0;            // total, phase I included
  int phase1_iterations = 0;
  // Gradient-reducing Newton steps taken after convergence; not counted in
  // newton_iterations.
  int polish_iterations = 0;
  double phase1_slack = 0.0;  // normalized; < 0 means strictly feasible
  bool warm_started = false;
  bool used_phase1 = false;
  int num_variables = 0;
  int num_inequalities = 0;
  double wall_time_s = 0.0;
  std::vector<OuterIterate> history;
  SolverSettings settings;
  std::string message;
};

struct SolveResult {
  Trajectory trajectory;  // relaxed kind
  SolveReport report;
  Eigen::VectorXd point;  // full variable layout
};

// Maximizes E_N. `initial` (full layout) is used when it lies in the
// differentiable domain; a strictly interior `initial` also skips phase I.
SolveResult Solve(const DiscretizedProblem& problem,
                  const SolverSettings& settings = {},
                  const std::optional<Eigen::VectorXd>& initial = {});

struct FeasibilityAssessment {
  bool feasible = false;
  // -(minimized common slack); >= 0 iff the relaxed constraint set with the
  // solver allowance is feasible.
  double margin = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  int iterations = 0;
};

// Phase I: minimizes one slack added to every inequality. With
// `sign_only` the search stops as soon as the sign of the optimum is known.
FeasibilityAssessment AssessFeasibility(const DiscretizedProblem& problem,
                                        const SolverSettings& settings = {},
                                        bool sign_only = false);

// Default starting point: v at mid-limits, K 10% above 1/2 m v^2, E decaying
// linearly at the idle rate, P slightly above idle.
Eigen::VectorXd ColdStart(const DiscretizedProblem& problem);

// Interpolates `previous` (any grid, any horizon) onto the problem's grid in
// normalized time and pushes it into the interior. Falls back to ColdStart
// when the interpolated point leaves the differentiable domain.
Eigen::VectorXd WarmStart(const DiscretizedProblem& problem,
                          const Trajectory& previous);

// True when every inequality holds with f < allowance (f < 0 for the
// kinetic-energy relaxation) and the point is in the differentiable domain.
bool IsStrictlyInterior(const DiscretizedProblem& problem,
                        const Eigen::VectorXd& point, double allowance);

// Relaxed trajectory from a full-layout point. The brake column carries the
// slack of the kinetic dynamics row (the brake power it implies).
Trajectory ToTrajectory(const DiscretizedProblem& problem,
                        const Eigen::VectorXd& point);

}  // namespace ecoplan

#endif  // ECOPLAN_SOLVER_H_
