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

// Direct transcription of the relaxed speed-planning problem on a uniform
// time grid. States (x, v, K, E) live at the N+1 nodes, drive power P on the
// N intervals. Every inequality is convex and stored in normalized form
//   f(z) / scale <= 0,
// so residuals of different physical units are comparable.

#ifndef ECOPLAN_TRANSCRIPTION_H_
#define ECOPLAN_TRANSCRIPTION_H_

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecoplan/model.h"

namespace ecoplan {

struct Grid {
  int N = 0;       // interval count
  double T = 0.0;  // horizon, s
  double h = 0.0;  // step, s

  // t_k = k h, with t_N = T exactly.
  double Time(int k) const { return k == N ? T : k * h; }
  double Midpoint(int j) const { return (j + 0.5) * h; }
};

// Throws std::invalid_argument unless N >= 2 and T > 0.
Grid MakeGrid(double T, int N);

// Which constraint family of the relaxed problem a row belongs to.
enum class ConstraintTag {
  kInitialCondition = 1,  // c1
  kPositionDynamics,      // c2
  kSpeedLower,            // c3
  kKineticUpper,          // c4
  kAcceleration,          // c5
  kKineticRelaxed,        // c6
  kKineticDynamics,       // c7
  kEnergyDynamics,        // c8
  kEnergyBox,             // c9
  kEngineRange,           // c10
  kPowerBox,              // c11
  kTerminalPosition,      // c12
};
inline constexpr int kNumConstraintTags = 12;

std::string TagName(ConstraintTag tag);  // "c1" .. "c12"
std::string TagDescription(ConstraintTag tag);

// Index map of the full variable vector
//   [x_0..x_N, v_0..v_N, K_0..K_N, E_0..E_N, P_0..P_{N-1}].
struct VariableLayout {
  int N = 0;

  int x(int k) const { return k; }
  int v(int k) const { return (N + 1) + k; }
  int K(int k) const { return 2 * (N + 1) + k; }
  int E(int k) const { return 3 * (N + 1) + k; }
  int P(int j) const { return 4 * (N + 1) + j; }
  int size() const { return 4 * (N + 1) + N; }
};

// Reference magnitudes for normalizing residuals.
struct Scales {
  double position = 1.0;  // m
  double speed = 1.0;     // m/s
  double kinetic = 1.0;   // J
  double energy = 1.0;    // J
  double power = 1.0;     // W
};
Scales ComputeScales(const Scenario& scenario, const Grid& grid);

// sum_i coeff_i z[var_i] = rhs, normalized by `scale`.
struct LinearEquality {
  ConstraintTag tag;
  int index;
  std::vector<std::pair<int, double>> terms;
  double rhs;
  double scale;
};

struct Inequality {
  enum class Form {
    kSpeedLower,         // v_min - v
    kKineticUpper,       // K - K_max
    kAcceleration,       // D(K) - a sqrt(2 m K_{k+1})
    kKineticRelaxed,     // 1/2 m v^2 - K
    kKineticDynamics,    // D(K) - P + avg g(K) - d
    kEnergyQuadratic,    // D(E) + f(P) - s
    kEnergyPiece,        // D(E) + slope P + intercept - s
    kEnergyLower,        // E_min - E
    kEnergyUpper,        // E - E_max
    kEngineRangeLower,   // f(p_min) - (s - D(E))
    kEngineRangeUpper,   // (s - D(E)) - f(p_max)
    kPowerLower,         // p_min - P
    kPowerUpper,         // P - p_max
    kTerminal,           // x_end - x_N
  };

  ConstraintTag tag;
  Form form;
  int index;  // node k or interval j
  std::array<int, 3> vars{-1, -1, -1};
  int num_vars = 0;
  // Sampled limit or constant: v_min, K_max, a_max, d, s, E bound, ...
  double bound = 0.0;
  // Piece data for kEnergyPiece.
  double slope = 0.0;
  double intercept = 0.0;
  double scale = 1.0;
};

// Value, local gradient and local Hessian of one normalized inequality with
// respect to its variables `vars[0..num_vars)`.
struct LocalEvaluation {
  double value = 0.0;
  std::array<double, 3> gradient{0.0, 0.0, 0.0};
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
  // False when a square-root term is evaluated at K <= 0.
  bool in_domain = true;
};

class DiscretizedProblem {
 public:
  const Scenario& scenario() const { return scenario_; }
  const Grid& grid() const { return grid_; }
  const VariableLayout& layout() const { return layout_; }
  const Scales& scales() const { return scales_; }
  const std::vector<LinearEquality>& equalities() const { return equalities_; }
  const std::vector<Inequality>& inequalities() const {
    return inequalities_;
  }
  int num_variables() const { return layout_.size(); }
  // The objective maximizes z[objective_index()] = E_N.
  int objective_index() const { return layout_.E(grid_.N); }

  // Fixed initial-condition values: x_0, v_0, K_0, E_0.
  double x0() const { return scenario_.x_init; }
  double v0() const { return scenario_.v_init; }
  double K0() const {
    return 0.5 * scenario_.vehicle.mass * scenario_.v_init * scenario_.v_init;
  }
  double E0() const { return scenario_.E_init; }

 private:
  friend DiscretizedProblem Transcribe(const Scenario& scenario, int N);

  Scenario scenario_;
  Grid grid_;
  VariableLayout layout_;
  Scales scales_;
  std::vector<LinearEquality> equalities_;
  std::vector<Inequality> inequalities_;
};

// Builds the relaxed program. Throws std::invalid_argument for N < 2 and
// ScenarioError for an invalid scenario.
DiscretizedProblem Transcribe(const Scenario& scenario, int N);

LocalEvaluation EvaluateInequality(const DiscretizedProblem& problem,
                                   const Inequality& row,
                                   const Eigen::VectorXd& point);

struct ProblemEvaluation {
  double objective = 0.0;  // E_N, J
  Eigen::VectorXd equality_residuals;    // normalized, feasible <=> 0
  Eigen::VectorXd inequality_residuals;  // normalized, feasible <=> <= 0
  std::vector<LocalEvaluation> inequality_derivatives;
  bool in_domain = true;

  double MaxEqualityResidual() const;
  double MaxInequalityViolation() const;
};

// Throws std::invalid_argument when `point` does not match the layout.
ProblemEvaluation Evaluate(const DiscretizedProblem& problem,
                           const Eigen::VectorXd& point);

// Number of inequality and equality rows per tag, indexed by tag value - 1.
std::array<int, kNumConstraintTags> CountByTag(
    const DiscretizedProblem& problem);

// Human-readable dump of the layout, per-tag counts and every row.
void DumpProblem(const DiscretizedProblem& problem, std::ostream& os);

}  // namespace ecoplan

#endif  // ECOPLAN_TRANSCRIPTION_H_
