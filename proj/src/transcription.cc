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

#include "ecoplan/transcription.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace ecoplan {

Grid MakeGrid(double T, int N) {
  if (N < 2) throw std::invalid_argument("grid needs N >= 2 intervals");
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("grid horizon must be positive");
  }
  return Grid{N, T, T / N};
}

std::string TagName(ConstraintTag tag) {
  return "c" + std::to_string(static_cast<int>(tag));
}

std::string TagDescription(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::kInitialCondition:
      return "initial conditions";
    case ConstraintTag::kPositionDynamics:
      return "trapezoidal position dynamics";
    case ConstraintTag::kSpeedLower:
      return "minimum speed";
    case ConstraintTag::kKineticUpper:
      return "maximum speed in kinetic energy";
    case ConstraintTag::kAcceleration:
      return "acceleration limit in kinetic energy";
    case ConstraintTag::kKineticRelaxed:
      return "relaxed kinetic energy definition";
    case ConstraintTag::kKineticDynamics:
      return "relaxed kinetic energy dynamics";
    case ConstraintTag::kEnergyDynamics:
      return "relaxed internal energy dynamics";
    case ConstraintTag::kEnergyBox:
      return "internal energy limits";
    case ConstraintTag::kEngineRange:
      return "consumption rate within engine range";
    case ConstraintTag::kPowerBox:
      return "drive power limits";
    case ConstraintTag::kTerminalPosition:
      return "terminal position";
  }
  return "unknown";
}

Scales ComputeScales(const Scenario& scenario, const Grid& grid) {
  const VehicleParams& veh = scenario.vehicle;
  Scales s;
  s.position = scenario.x_end - scenario.x_init;
  double v_top = 0.0;
  double a_top = 0.0;
  for (int k = 0; k <= grid.N; ++k) {
    v_top = std::max(v_top, Sample(scenario.v_max, grid.Time(k)));
    a_top = std::max(a_top, Sample(scenario.a_max, grid.Time(k)));
  }
  s.speed = std::max(v_top, 1e-3);
  s.kinetic = 0.5 * veh.mass * s.speed * s.speed;
  s.energy = std::max(scenario.E_max - scenario.E_min, 1.0);
  const double idle = std::max(scenario.engine.p_min(), 0.0);
  s.power = std::max({veh.mass * a_top * s.speed,
                      DragPower(veh, s.speed) + RollingPower(veh, s.speed),
                      std::abs(EngineRate(scenario.engine, idle)), 1.0});
  return s;
}

DiscretizedProblem Transcribe(const Scenario& input, int N) {
  DiscretizedProblem problem;
  problem.scenario_ = Validate(input);
  const Scenario& sc = problem.scenario_;
  problem.grid_ = MakeGrid(sc.horizon, N);
  problem.layout_ = VariableLayout{N};
  problem.scales_ = ComputeScales(sc, problem.grid_);

  const Grid& grid = problem.grid_;
  const VariableLayout& L = problem.layout_;
  const Scales& S = problem.scales_;
  const double m = sc.vehicle.mass;
  const double h = grid.h;

  // c1: initial conditions.
  auto& eq = problem.equalities_;
  eq.push_back({ConstraintTag::kInitialCondition, 0, {{L.x(0), 1.0}},
                sc.x_init, S.position});
  eq.push_back({ConstraintTag::kInitialCondition, 0, {{L.v(0), 1.0}},
                sc.v_init, S.speed});
  eq.push_back({ConstraintTag::kInitialCondition, 0, {{L.K(0), 1.0}},
                problem.K0(), S.kinetic});
  eq.push_back({ConstraintTag::kInitialCondition, 0, {{L.E(0), 1.0}},
                sc.E_init, S.energy});
  // c2: x_{k+1} - x_k - h (v_k + v_{k+1}) / 2 = 0.
  for (int k = 0; k < N; ++k) {
    eq.push_back({ConstraintTag::kPositionDynamics,
                  k,
                  {{L.x(k + 1), 1.0},
                   {L.x(k), -1.0},
                   {L.v(k), -0.5 * h},
                   {L.v(k + 1), -0.5 * h}},
                  0.0,
                  S.position});
  }

  auto& ineq = problem.inequalities_;
  using Form = Inequality::Form;
  auto add = [&ineq](ConstraintTag tag, Form form, int index,
                     std::initializer_list<int> vars, double bound,
                     double scale) {
    Inequality row;
    row.tag = tag;
    row.form = form;
    row.index = index;
    row.num_vars = 0;
    for (int v : vars) row.vars[row.num_vars++] = v;
    row.bound = bound;
    row.scale = scale;
    ineq.push_back(row);
    return ineq.size() - 1;
  };

  const EngineModel& engine = sc.engine;
  const auto pieces = engine.Pieces();
  const double rate_min = EngineRate(engine, engine.p_min());
  const double rate_max =
      engine.bounded_above() ? EngineRate(engine, engine.p_max()) : kInfinity;

  for (int k = 0; k <= N; ++k) {
    const double t = grid.Time(k);
    add(ConstraintTag::kSpeedLower, Form::kSpeedLower, k, {L.v(k)},
        Sample(sc.v_min, t), S.speed);
    const double vmax = Sample(sc.v_max, t);
    add(ConstraintTag::kKineticUpper, Form::kKineticUpper, k, {L.K(k)},
        0.5 * m * vmax * vmax, S.kinetic);
    add(ConstraintTag::kKineticRelaxed, Form::kKineticRelaxed, k,
        {L.v(k), L.K(k)}, 0.0, S.kinetic);
    add(ConstraintTag::kEnergyBox, Form::kEnergyLower, k, {L.E(k)}, sc.E_min,
        S.energy);
    add(ConstraintTag::kEnergyBox, Form::kEnergyUpper, k, {L.E(k)}, sc.E_max,
        S.energy);
  }
  for (int j = 0; j < N; ++j) {
    const double t_mid = grid.Midpoint(j);
    const double solar = sc.SolarAt(t_mid);
    add(ConstraintTag::kAcceleration, Form::kAcceleration, j,
        {L.K(j), L.K(j + 1)}, Sample(sc.a_max, grid.Time(j + 1)), S.power);
    add(ConstraintTag::kKineticDynamics, Form::kKineticDynamics, j,
        {L.K(j), L.K(j + 1), L.P(j)}, sc.TerrainAt(t_mid), S.power);
    if (engine.kind() == EngineModel::Kind::kQuadratic) {
      add(ConstraintTag::kEnergyDynamics, Form::kEnergyQuadratic, j,
          {L.E(j), L.E(j + 1), L.P(j)}, solar, S.power);
    } else {
      for (const auto& piece : pieces) {
        const size_t r =
            add(ConstraintTag::kEnergyDynamics, Form::kEnergyPiece, j,
                {L.E(j), L.E(j + 1), L.P(j)}, solar, S.power);
        ineq[r].slope = piece.slope;
        ineq[r].intercept = piece.intercept;
      }
    }
    size_t r = add(ConstraintTag::kEngineRange, Form::kEngineRangeLower, j,
                   {L.E(j), L.E(j + 1)}, solar, S.power);
    ineq[r].intercept = rate_min;
    if (engine.bounded_above()) {
      r = add(ConstraintTag::kEngineRange, Form::kEngineRangeUpper, j,
              {L.E(j), L.E(j + 1)}, solar, S.power);
      ineq[r].intercept = rate_max;
    }
    add(ConstraintTag::kPowerBox, Form::kPowerLower, j, {L.P(j)},
        engine.p_min(), S.power);
    if (engine.bounded_above()) {
      add(ConstraintTag::kPowerBox, Form::kPowerUpper, j, {L.P(j)},
          engine.p_max(), S.power);
    }
  }
  add(ConstraintTag::kTerminalPosition, Form::kTerminal, N, {L.x(N)},
      sc.x_end, S.position);
  return problem;
}

LocalEvaluation EvaluateInequality(const DiscretizedProblem& problem,
                                   const Inequality& row,
                                   const Eigen::VectorXd& z) {
  using Form = Inequality::Form;
  const Scenario& sc = problem.scenario();
  const double m = sc.vehicle.mass;
  const double h = problem.grid().h;
  LocalEvaluation out;
  double value = 0.0;
  auto& g = out.gradient;
  auto& H = out.hessian;
  const double z0 = z[row.vars[0]];
  const double z1 = row.num_vars > 1 ? z[row.vars[1]] : 0.0;
  const double z2 = row.num_vars > 2 ? z[row.vars[2]] : 0.0;

  switch (row.form) {
    case Form::kSpeedLower:
      value = row.bound - z0;
      g[0] = -1.0;
      break;
    case Form::kKineticUpper:
      value = z0 - row.bound;
      g[0] = 1.0;
      break;
    case Form::kAcceleration: {
      // (K1 - K0)/h - a sqrt(2 m K1)
      const double a = row.bound;
      if (!(z1 > 0.0)) {
        out.in_domain = false;
      }
      const double root = std::sqrt(std::max(z1, 0.0));
      const double c = a * std::sqrt(2.0 * m);
      value = (z1 - z0) / h - c * root;
      g[0] = -1.0 / h;
      g[1] = 1.0 / h - (root > 0.0 ? 0.5 * c / root : kInfinity);
      H(1, 1) = root > 0.0 ? 0.25 * c / (root * z1) : kInfinity;
      break;
    }
    case Form::kKineticRelaxed:
      value = 0.5 * m * z0 * z0 - z1;
      g[0] = m * z0;
      g[1] = -1.0;
      H(0, 0) = m;
      break;
    case Form::kKineticDynamics: {
      if (!(z0 >= 0.0 && z1 >= 0.0)) out.in_domain = false;
      const LossDerivatives l0 = ResistiveLoss(sc.vehicle, z0);
      const LossDerivatives l1 = ResistiveLoss(sc.vehicle, z1);
      value = (z1 - z0) / h - z2 + 0.5 * (l0.value + l1.value) - row.bound;
      g[0] = -1.0 / h + 0.5 * l0.first;
      g[1] = 1.0 / h + 0.5 * l1.first;
      g[2] = -1.0;
      H(0, 0) = 0.5 * l0.second;
      H(1, 1) = 0.5 * l1.second;
      break;
    }
    case Form::kEnergyQuadratic: {
      const EngineModel& e = sc.engine;
      value = (z1 - z0) / h + EngineRateExtended(e, z2) - row.bound;
      g[0] = -1.0 / h;
      g[1] = 1.0 / h;
      g[2] = 2.0 * e.alpha() * z2 + e.beta();
      H(2, 2) = 2.0 * e.alpha();
      break;
    }
    case Form::kEnergyPiece:
      value = (z1 - z0) / h + row.slope * z2 + row.intercept - row.bound;
      g[0] = -1.0 / h;
      g[1] = 1.0 / h;
      g[2] = row.slope;
      break;
    case Form::kEnergyLower:
      value = row.bound - z0;
      g[0] = -1.0;
      break;
    case Form::kEnergyUpper:
      value = z0 - row.bound;
      g[0] = 1.0;
      break;
    case Form::kEngineRangeLower:
      // f(p_min) - s + D(E)
      value = row.intercept - row.bound + (z1 - z0) / h;
      g[0] = -1.0 / h;
      g[1] = 1.0 / h;
      break;
    case Form::kEngineRangeUpper:
      // s - D(E) - f(p_max)
      value = row.bound - (z1 - z0) / h - row.intercept;
      g[0] = 1.0 / h;
      g[1] = -1.0 / h;
      break;
    case Form::kPowerLower:
      value = row.bound - z0;
      g[0] = -1.0;
      break;
    case Form::kPowerUpper:
      value = z0 - row.bound;
      g[0] = 1.0;
      break;
    case Form::kTerminal:
      value = row.bound - z0;
      g[0] = -1.0;
      break;
  }
  const double inv = 1.0 / row.scale;
  out.value = value * inv;
  for (double& gi : g) gi *= inv;
  H *= inv;
  return out;
}

double ProblemEvaluation::MaxEqualityResidual() const {
  return equality_residuals.size() ? equality_residuals.cwiseAbs().maxCoeff()
                                   : 0.0;
}

double ProblemEvaluation::MaxInequalityViolation() const {
  return inequality_residuals.size()
             ? std::max(0.0, inequality_residuals.maxCoeff())
             : 0.0;
}

ProblemEvaluation Evaluate(const DiscretizedProblem& problem,
                           const Eigen::VectorXd& point) {
  if (point.size() != problem.num_variables()) {
    throw std::invalid_argument("point does not match the variable layout");
  }
  ProblemEvaluation out;
  out.objective = point[problem.objective_index()];
  const auto& eqs = problem.equalities();
  out.equality_residuals.resize(eqs.size());
  for (size_t i = 0; i < eqs.size(); ++i) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : eqs[i].terms) lhs += coeff * point[var];
    out.equality_residuals[i] = (lhs - eqs[i].rhs) / eqs[i].scale;
  }
  const auto& rows = problem.inequalities();
  out.inequality_residuals.resize(rows.size());
  out.inequality_derivatives.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    LocalEvaluation e = EvaluateInequality(problem, rows[i], point);
    out.inequality_residuals[i] = e.value;
    out.in_domain = out.in_domain && e.in_domain;
    out.inequality_derivatives.push_back(e);
  }
  return out;
}

std::array<int, kNumConstraintTags> CountByTag(
    const DiscretizedProblem& problem) {
  std::array<int, kNumConstraintTags> counts{};
  for (const auto& e : problem.equalities()) {
    ++counts[static_cast<int>(e.tag) - 1];
  }
  for (const auto& r : problem.inequalities()) {
    ++counts[static_cast<int>(r.tag) - 1];
  }
  return counts;
}

void DumpProblem(const DiscretizedProblem& problem, std::ostream& os) {
  const Grid& grid = problem.grid();
  const VariableLayout& L = problem.layout();
  const Scales& S = problem.scales();
  os << std::setprecision(12);
  os << "# ecoplan discretized problem\n";
  os << "grid N=" << grid.N << " T=" << grid.T << " h=" << grid.h << "\n";
  os << "variables " << problem.num_variables() << "\n";
  os << "layout x=[" << L.x(0) << "," << L.x(grid.N) << "] v=[" << L.v(0)
     << "," << L.v(grid.N) << "] K=[" << L.K(0) << "," << L.K(grid.N)
     << "] E=[" << L.E(0) << "," << L.E(grid.N) << "] P=[" << L.P(0) << ","
     << L.P(grid.N - 1) << "]\n";
  os << "objective maximize z[" << problem.objective_index() << "] (E_N)\n";
  os << "scales position=" << S.position << " speed=" << S.speed
     << " kinetic=" << S.kinetic << " energy=" << S.energy
     << " power=" << S.power << "\n";
  const auto counts = CountByTag(problem);
  for (int t = 0; t < kNumConstraintTags; ++t) {
    const auto tag = static_cast<ConstraintTag>(t + 1);
    os << "tag " << TagName(tag) << " count=" << counts[t] << " ("
       << TagDescription(tag) << ")\n";
  }
  for (const auto& e : problem.equalities()) {
    os << "eq " << TagName(e.tag) << " " << e.index << " :";
    for (const auto& [var, coeff] : e.terms) os << " " << coeff << "*z" << var;
    os << " = " << e.rhs << "\n";
  }
  for (const auto& r : problem.inequalities()) {
    os << "ineq " << TagName(r.tag) << " form=" << static_cast<int>(r.form)
       << " " << r.index << " vars=";
    for (int i = 0; i < r.num_vars; ++i) {
      os << (i ? "," : "") << "z" << r.vars[i];
    }
    os << " bound=" << r.bound << " scale=" << r.scale << "\n";
  }
}

}  // namespace ecoplan
