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

#include "ecoplan/planner.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ecoplan/transcription.h"

namespace ecoplan {
namespace {

// Reversal count at which the consumption curve is no longer treated as
// unimodal.
constexpr int kMaxReversals = 3;

std::string Describe(const FeasibilityReport& report) {
  std::ostringstream os;
  os << "recovered trajectory fails its audit:";
  for (const auto& c : report.checks) {
    if (c.checked && c.max_violation > report.tolerance) {
      os << " " << c.name << "=" << c.max_violation << " (index "
         << c.worst_index << ")";
    }
  }
  return os.str();
}

// Validated copy; a scenario without a horizon is checked on [0, 1] and
// left without one.
Scenario Prepared(const Scenario& scenario) {
  if (scenario.horizon > 0.0) return Validate(scenario);
  Scenario checked = Validate(scenario.WithHorizon(1.0));
  checked.horizon = 0.0;
  return checked;
}

double KinematicLowerBound(const Scenario& scenario) {
  return (scenario.x_end - scenario.x_init) / scenario.v_max.Max();
}

// Relaxed solves at arbitrary horizons, warm-started from the nearest
// horizon solved so far.
class HorizonSolver {
 public:
  HorizonSolver(const Scenario& scenario, const PlanOptions& options)
      : scenario_(scenario), options_(options) {}

  // Consumption in J, or nullopt when the solve is not optimal.
  std::optional<double> Consumption(double T, std::string* status) {
    const DiscretizedProblem problem =
        Transcribe(scenario_.WithHorizon(T), options_.N);
    std::optional<Eigen::VectorXd> start;
    if (const Trajectory* near = Nearest(T)) {
      start = WarmStart(problem, *near);
    }
    const SolveResult result = Solve(problem, options_.solver, start);
    if (status) *status = StatusName(result.report.status);
    if (result.report.status != SolveStatus::kOptimal) return std::nullopt;
    solved_[T] = result.trajectory;
    return result.trajectory.Consumption();
  }

  const Trajectory* Nearest(double T) const {
    const Trajectory* best = nullptr;
    double distance = kInfinity;
    for (const auto& [t, traj] : solved_) {
      if (std::abs(t - T) < distance) {
        distance = std::abs(t - T);
        best = &traj;
      }
    }
    return best;
  }

 private:
  const Scenario& scenario_;
  const PlanOptions& options_;
  std::map<double, Trajectory> solved_;
};

}  // namespace

FeasibilityAssessment AssessHorizon(const Scenario& scenario, double T,
                                    const PlanOptions& options) {
  const DiscretizedProblem problem =
      Transcribe(Validate(scenario.WithHorizon(T)), options.N);
  return AssessFeasibility(problem, options.solver, /*sign_only=*/true);
}

Plan PlanFixedT(const Scenario& scenario, double T, const PlanOptions& options,
                const Trajectory* warm) {
  const Scenario sc = Validate(scenario.WithHorizon(T));
  const DiscretizedProblem problem = Transcribe(sc, options.N);
  std::optional<Eigen::VectorXd> start;
  if (warm) start = WarmStart(problem, *warm);
  SolveResult result = Solve(problem, options.solver, start);

  Plan plan;
  plan.horizon = T;
  plan.report = std::move(result.report);
  plan.relaxed = std::move(result.trajectory);
  if (!plan.optimal()) return plan;

  try {
    plan.recovered = Recover(plan.relaxed, sc, options.tolerances.relative);
  } catch (const RecoveryError& e) {
    throw PlanError(std::string("recovery failed: ") + e.what());
  }
  plan.feasibility = CheckFeasibility(*plan.recovered, sc, options.tolerances);
  if (!plan.feasibility->feasible) {
    throw PlanError(Describe(*plan.feasibility));
  }
  return plan;
}

MinTimeResult MinTime(const Scenario& scenario, const PlanOptions& options,
                      const MinTimeOptions& search) {
  if (!(search.t_tolerance > 0.0)) {
    throw std::invalid_argument("t_tolerance must be positive");
  }
  const Scenario sc = Prepared(scenario);
  MinTimeResult result;
  result.T_lower = KinematicLowerBound(sc);

  auto assess = [&](const std::string& stage, double T) {
    const FeasibilityAssessment a = AssessHorizon(sc, T, options);
    if (a.status == SolveStatus::kNumericalFailure) {
      std::ostringstream os;
      os << "feasibility check failed numerically at T = " << T;
      throw std::runtime_error(os.str());
    }
    result.history.push_back(
        {stage, T, a.feasible, a.margin, 0.0, StatusName(a.status)});
    return a.feasible;
  };

  // Bracket: T_lo infeasible (or the bound itself), T_hi feasible.
  double lo = result.T_lower;
  double hi = 0.0;
  if (assess("bracket", lo)) {
    hi = lo;
  } else if (search.T_hi) {
    hi = *search.T_hi;
    if (!assess("bracket", hi)) {
      throw NoFeasibleHorizon("supplied upper horizon is infeasible");
    }
  } else {
    double step = std::max(search.t_tolerance, 0.05 * lo);
    bool found = false;
    for (int i = 0; i < search.max_bracket_steps; ++i) {
      const double T = lo + step;
      if (assess("bracket", T)) {
        hi = T;
        found = true;
        break;
      }
      lo = T;
      step *= 2.0;
    }
    if (!found) {
      throw NoFeasibleHorizon("no feasible horizon found while bracketing");
    }
  }
  const double bracket_hi = hi;

  while (hi - lo > search.t_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (assess("bisect", mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  // Guard: the horizon just above the answer must stay feasible and the
  // answer itself must plan.
  bool ok = hi == result.T_lower || assess("verify", hi + search.t_tolerance);
  if (ok) {
    result.plan = PlanFixedT(sc, hi, options);
    ok = result.plan.optimal();
    if (!ok) result.note = "plan at the bisection result was not optimal";
  } else {
    result.note = "feasibility flips back above the bisection result";
  }

  if (!ok) {
    result.used_scan = true;
    bool found = false;
    for (double T = result.T_lower; T <= bracket_hi + 1e-9;
         T += search.t_tolerance) {
      if (!assess("scan", T)) continue;
      Plan plan = PlanFixedT(sc, T, options);
      if (plan.optimal()) {
        hi = T;
        result.plan = std::move(plan);
        found = true;
        break;
      }
    }
    if (!found) {
      throw NoFeasibleHorizon("scan found no horizon with an optimal plan");
    }
  }
  result.T_star = hi;
  return result;
}

MinEnergyResult MinEnergy(const Scenario& scenario, const PlanOptions& options,
                          const MinEnergyOptions& search) {
  if (!(search.t_tolerance > 0.0)) {
    throw std::invalid_argument("t_tolerance must be positive");
  }
  if (search.probe_points < 3) {
    throw std::invalid_argument("probe_points must be at least 3");
  }
  const Scenario sc = Prepared(scenario);
  MinEnergyResult result;

  if (search.T_star) {
    result.T_star = *search.T_star;
  } else {
    MinTimeOptions mt;
    mt.t_tolerance = search.t_tolerance;
    MinTimeResult min_time = MinTime(sc, options, mt);
    result.T_star = min_time.T_star;
    for (auto& step : min_time.history) {
      step.stage = "min-time/" + step.stage;
      result.history.push_back(step);
    }
  }

  if (search.T_cap) {
    result.T_cap = *search.T_cap;
  } else {
    // Double until infeasible, then bisect the upper edge.
    double good = result.T_star;
    double bad = 0.0;
    for (double T = 2.0 * result.T_star;
         T <= search.cap_limit * result.T_star; T *= 2.0) {
      const FeasibilityAssessment a = AssessHorizon(sc, T, options);
      result.history.push_back(
          {"cap", T, a.feasible, a.margin, 0.0, StatusName(a.status)});
      if (a.feasible) {
        good = T;
      } else {
        bad = T;
        break;
      }
    }
    if (bad == 0.0) {
      result.note = "no infeasible horizon below the cap limit";
      result.T_cap = good;
    } else {
      while (bad - good > search.t_tolerance) {
        const double mid = 0.5 * (good + bad);
        const FeasibilityAssessment a = AssessHorizon(sc, mid, options);
        result.history.push_back(
            {"cap", mid, a.feasible, a.margin, 0.0, StatusName(a.status)});
        (a.feasible ? good : bad) = mid;
      }
      result.T_cap = good;
    }
  }
  if (!(result.T_cap >= result.T_star)) {
    throw NoFeasibleHorizon("empty feasible window");
  }

  HorizonSolver solver(sc, options);
  auto consumption = [&](const std::string& stage, double T) {
    std::string status;
    const auto c = solver.Consumption(T, &status);
    result.history.push_back(
        {stage, T, c.has_value(), 0.0, c.value_or(0.0), status});
    return c.value_or(kInfinity);
  };

  // Coarse probe of the window.
  const int n = search.probe_points;
  std::vector<double> times(n);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    times[i] = result.T_star + (result.T_cap - result.T_star) * i / (n - 1);
    values[i] = consumption("probe", times[i]);
  }
  if (std::all_of(values.begin(), values.end(),
                  [](double v) { return v == kInfinity; })) {
    throw NoFeasibleHorizon("entire window is infeasible");
  }
  int reversals = 0;
  for (int i = 1; i + 1 < n; ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) ++reversals;
  }
  const int best = static_cast<int>(
      std::min_element(values.begin(), values.end()) - values.begin());

  double T_opt = times[best];
  if (reversals >= kMaxReversals) {
    result.used_scan = true;
    result.note = "consumption is not unimodal over the probe";
  } else {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = times[std::max(best - 1, 0)];
    double b = times[std::min(best + 1, n - 1)];
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = consumption("golden", c);
    double fd = consumption("golden", d);
    while (b - a > search.t_tolerance) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = consumption("golden", c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = consumption("golden", d);
      }
    }
    const double candidate = fc <= fd ? c : d;
    if (std::min(fc, fd) <= values[best]) T_opt = candidate;
  }

  result.T_opt = T_opt;
  result.plan = PlanFixedT(sc, T_opt, options, solver.Nearest(T_opt));
  return result;
}

std::vector<ParetoPoint> Pareto(const Scenario& scenario,
                                const PlanOptions& options,
                                const std::vector<double>& horizons) {
  if (!std::is_sorted(horizons.begin(), horizons.end())) {
    throw std::invalid_argument("horizons must be sorted ascending");
  }
  const Scenario sc = Prepared(scenario);
  std::vector<ParetoPoint> points;
  points.reserve(horizons.size());  // keeps `warm` valid
  const Trajectory* warm = nullptr;
  for (double T : horizons) {
    ParetoPoint point;
    point.T = T;
    try {
      point.plan = PlanFixedT(sc, T, options, warm);
      point.status = point.plan.report.status;
    } catch (const PlanError& e) {
      point.status = SolveStatus::kNumericalFailure;
      point.plan.horizon = T;
      point.plan.report.message = e.what();
    }
    point.consumption = point.plan.optimal() ? point.plan.Consumption() : 0.0;
    points.push_back(std::move(point));
    if (points.back().plan.optimal()) warm = &points.back().plan.relaxed;
  }
  return points;
}

}  // namespace ecoplan
