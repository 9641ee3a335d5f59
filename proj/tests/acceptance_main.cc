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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion], with criterion in 1..10; all when omitted.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecoplan/io.h"
#include "ecoplan/planner.h"
#include "ecoplan/recovery.h"
#include "ecoplan/solver.h"
#include "ecoplan/transcription.h"
#include "ecoplan/validation.h"
#include "support.h"

namespace ecoplan {
namespace {

constexpr int kGrid = 1000;
constexpr std::uint64_t kSeed = 20260101;
const std::vector<std::string> kScenarios = {"paperlike", "pinned", "cruise",
                                             "energy_bound"};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

double Seconds(const std::function<void()>& work) {
  const auto start = std::chrono::steady_clock::now();
  work();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

PlanOptions Options(int N) {
  PlanOptions options;
  options.N = N;
  return options;
}

std::string Num(double value, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << value;
  return os.str();
}

// Recovered trajectories are feasible to 1e-6 and keep E_N bit for bit.
void Tightness(Outcome& out) {
  for (const auto& name : kScenarios) {
    const Scenario sc = testing::Bundled(name);
    SolveResult result;
    Trajectory recovered;
    FeasibilityReport report;
    const double seconds = Seconds([&] {
      result = Solve(Transcribe(sc, kGrid));
      if (result.report.status == SolveStatus::kOptimal) {
        recovered = Recover(result.trajectory, sc);
        report = CheckFeasibility(recovered, sc);
      }
    });
    if (result.report.status != SolveStatus::kOptimal) {
      out.Require(false, name + " status " + StatusName(result.report.status));
      continue;
    }
    out.Require(report.feasible && report.MaxViolation() <= 1e-6,
                name + " max violation " + Num(report.MaxViolation(), 3));
    out.Require(recovered.FinalEnergy() == result.trajectory.FinalEnergy(),
                name + " E_N bitwise equal");
    out.Require(seconds < 30.0, name + " " + Num(seconds, 3) + " s");
  }
}

// Seeded random feasible schedules never beat the solver.
void Dominance(Outcome& out) {
  for (const auto& name : kScenarios) {
    const Scenario sc = testing::Bundled(name);
    const SolveResult result = Solve(Transcribe(sc, kGrid));
    if (result.report.status != SolveStatus::kOptimal) {
      out.Require(false, name + " status " + StatusName(result.report.status));
      continue;
    }
    const RandomScheduleSet set =
        RandomFeasibleSchedules(sc, kGrid, 100, kSeed);
    double best = -kInfinity;
    for (const auto& s : set.accepted) {
      best = std::max(best, s.simulation.trajectory.FinalEnergy());
    }
    const double excess = best - result.report.objective;
    out.Require(set.accepted.size() == 100,
                name + " " + std::to_string(set.accepted.size()) +
                    " schedules in " + std::to_string(set.attempts) +
                    " attempts");
    out.Require(excess <= 1e-4 * sc.E_init,
                name + " best random minus optimal " + Num(excess / 1e3, 4) +
                    " kJ");
  }
}

// Speed held at 20 m/s for 10 s costs 111.04 kJ.
void PinnedSpeed(Outcome& out) {
  const Plan plan =
      PlanFixedT(testing::Bundled("pinned"), 10.0, Options(kGrid));
  out.Require(plan.optimal(), "status " + StatusName(plan.report.status));
  const double kj = plan.Consumption() / 1e3;
  out.Require(std::abs(kj - 111.04) <= 0.005 * 111.04,
              "consumption " + Num(kj, 7) + " kJ against 111.04 kJ");
}

// With the horizon free, the middle of a long trip runs at cruise speed.
void Cruise(Outcome& out) {
  const Scenario sc = testing::Bundled("cruise");
  const double v_star = CruiseOracle(sc.vehicle, sc.engine);
  const MinEnergyResult best = MinEnergy(sc, Options(kGrid));
  if (!best.plan.recovered) {
    out.Require(false, "no recovered plan");
    return;
  }
  const Trajectory& traj = *best.plan.recovered;
  std::vector<double> middle;
  for (int k = 0; k <= traj.grid.N; ++k) {
    const double t = traj.grid.Time(k);
    if (t >= 0.2 * traj.grid.T && t <= 0.8 * traj.grid.T) {
      middle.push_back(traj.v[k]);
    }
  }
  std::nth_element(middle.begin(), middle.begin() + middle.size() / 2,
                   middle.end());
  const double median = middle[middle.size() / 2];
  out.Require(std::abs(median - v_star) <= 0.02 * v_star,
              "median mid speed " + Num(median) + " m/s against cruise " +
                  Num(v_star) + " m/s at T " + Num(best.T_opt, 5) + " s");
}

// At the shortest horizon the energy budget is exhausted, and bisection
// agrees with an exhaustive scan.
void Depletion(Outcome& out) {
  const Scenario sc = testing::Bundled("energy_bound");
  const PlanOptions options = Options(kGrid);
  MinTimeOptions search;
  search.t_tolerance = 0.02;
  const MinTimeResult r = MinTime(sc, options, search);
  double scanned = 0.0;
  for (int i = 0;; ++i) {
    const double T = std::ceil(r.T_lower * 10.0) / 10.0 + 0.1 * i;
    if (T > 4.0 * r.T_lower) break;
    if (AssessHorizon(sc, T, options).feasible) {
      scanned = T;
      break;
    }
  }
  out.Require(scanned > 0.0 && std::abs(r.T_star - scanned) <= 0.2 + 1e-9,
              "bisection " + Num(r.T_star) + " s, scan " + Num(scanned) +
                  " s");
  if (!r.plan.recovered) {
    out.Require(false, "no recovered plan");
    return;
  }
  const double left = r.plan.recovered->FinalEnergy() - sc.E_min;
  out.Require(left <= 1e-3 * sc.E_init,
              "E_N - E_min " + Num(left / 1e3, 4) + " kJ (limit " +
                  Num(1e-3 * sc.E_init / 1e3, 4) + " kJ)");
}

// With slack over the minimum time the plan ends with a coast.
void Coasting(Outcome& out) {
  const Scenario sc = testing::Bundled("paperlike");
  const PlanOptions options = Options(kGrid);
  const MinTimeResult fastest = MinTime(sc, options);
  const double T = 1.15 * fastest.T_star;
  const Plan plan = PlanFixedT(sc, T, options);
  if (!plan.recovered) {
    out.Require(false, "no recovered plan at T " + Num(T));
    return;
  }
  const Eigen::VectorXd& drive = plan.recovered->P_drv;
  const double peak = drive.maxCoeff();
  int tail = 0;
  for (int j = drive.size() - 1; j >= 0 && drive[j] < 0.01 * peak; --j) {
    ++tail;
  }
  const double span = tail * plan.recovered->grid.h;
  out.Require(span >= 0.05 * T, "terminal coast " + Num(span, 4) + " s of " +
                                    Num(T, 5) + " s (T_star " +
                                    Num(fastest.T_star, 5) + " s)");
}

// Consumption falls to the optimal horizon and rises after it.
void ParetoShape(Outcome& out) {
  const Scenario sc = testing::Bundled("paperlike");
  const PlanOptions options = Options(kGrid);
  const MinEnergyResult best = MinEnergy(sc, options);
  std::vector<double> horizons(20);
  for (int i = 0; i < 20; ++i) {
    horizons[i] = best.T_star + (best.T_cap - best.T_star) * i / 19.0;
  }
  const std::vector<ParetoPoint> front = Pareto(sc, options, horizons);
  const double tol = 1e-3 * sc.E_init;
  bool all_optimal = true;
  bool shaped = true;
  for (std::size_t i = 0; i < front.size(); ++i) {
    if (front[i].status != SolveStatus::kOptimal) all_optimal = false;
    if (i == 0) continue;
    const double step = front[i].consumption - front[i - 1].consumption;
    if (front[i].T <= best.T_opt && step > tol) shaped = false;
    if (front[i - 1].T >= best.T_opt && step < -tol) shaped = false;
  }
  out.Require(all_optimal, "every sweep point optimal");
  out.Require(shaped, "nonincreasing then nondecreasing");
  out.Require(best.T_star < best.T_opt && best.T_opt < best.T_cap,
              "T_opt " + Num(best.T_opt, 5) + " s inside (" +
                  Num(best.T_star, 5) + ", " + Num(best.T_cap, 5) + ") s");
}

// Central differences at random points of the differentiable domain
// scattered around the optimum.
double WorstDerivativeError(const DiscretizedProblem& problem,
                            const Eigen::VectorXd& center,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const VariableLayout& L = problem.layout();
  const Scales& s = problem.scales();
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd z = center;
    for (int k = 0; k <= problem.grid().N; ++k) {
      z[L.v(k)] += 1e-2 * s.speed * unit(rng);
      z[L.K(k)] = std::abs(z[L.K(k)] + 1e-2 * s.kinetic * unit(rng)) +
                  1e-3 * s.kinetic;
      z[L.E(k)] += 1e-2 * s.energy * unit(rng);
    }
    for (int j = 0; j < problem.grid().N; ++j) {
      z[L.P(j)] = std::abs(z[L.P(j)] + 1e-2 * s.power * unit(rng));
    }
    for (const auto& row : problem.inequalities()) {
      const LocalEvaluation ev = EvaluateInequality(problem, row, z);
      if (!ev.in_domain) continue;
      double norm = 0.0;
      for (int a = 0; a < row.num_vars; ++a) {
        norm = std::hypot(norm, ev.gradient[a]);
      }
      const double floor = 1e-8 * norm;
      for (int a = 0; a < row.num_vars; ++a) {
        // Central-difference step balancing truncation against rounding.
        const double h =
            std::cbrt(std::numeric_limits<double>::epsilon()) *
            std::max(1.0, std::abs(z[row.vars[a]]));
        Eigen::VectorXd up = z;
        Eigen::VectorXd down = z;
        up[row.vars[a]] += h;
        down[row.vars[a]] -= h;
        const LocalEvaluation eu = EvaluateInequality(problem, row, up);
        const LocalEvaluation ed = EvaluateInequality(problem, row, down);
        const double fd = (eu.value - ed.value) / (2.0 * h);
        worst = std::max(worst, std::abs(ev.gradient[a] - fd) /
                                    std::max(std::abs(ev.gradient[a]), floor));
        for (int b = 0; b < row.num_vars; ++b) {
          const double fd2 = (eu.gradient[b] - ed.gradient[b]) / (2.0 * h);
          const double scale =
              std::max(std::abs(ev.hessian(a, b)),
                       std::sqrt(std::abs(ev.hessian(a, a) *
                                          ev.hessian(b, b))));
          if (scale > 0.0) {
            worst = std::max(worst, std::abs(ev.hessian(a, b) - fd2) / scale);
          } else {
            // A vanishing curvature must leave the gradient unchanged.
            worst = std::max(worst, std::abs(fd2) * h /
                                        std::max(std::abs(ev.gradient[b]),
                                                 floor));
          }
        }
      }
    }
  }
  return worst;
}

void SolverHealth(Outcome& out) {
  std::mt19937_64 rng(kSeed);
  for (const auto& name : kScenarios) {
    const DiscretizedProblem problem =
        Transcribe(testing::Bundled(name), kGrid);
    const SolveResult result = Solve(problem);
    const SolveReport& r = result.report;
    out.Require(r.status == SolveStatus::kOptimal &&
                    r.newton_iterations <= r.settings.max_total_iterations,
                name + " " + StatusName(r.status) + " in " +
                    std::to_string(r.newton_iterations) + " Newton steps");
    const double feasibility =
        std::max(r.max_equality_residual, r.max_inequality_violation);
    out.Require(feasibility <= 1e-6,
                name + " feasibility residual " + Num(feasibility, 3));
    out.Require(r.stationarity_residual <= 1e-6,
                name + " stationarity " + Num(r.stationarity_residual, 3) +
                    " (relative " + Num(r.relative_stationarity, 3) + ")");
    const double worst = WorstDerivativeError(problem, result.point, rng);
    out.Require(worst <= 1e-5,
                name + " derivative error " + Num(worst, 3));
  }
  const Scenario sc = testing::Bundled("paperlike");
  auto fastest = [&](int N) {
    const DiscretizedProblem problem = Transcribe(sc, N);
    double best = kInfinity;
    for (int i = 0; i < 3; ++i) {
      best = std::min(best, Seconds([&] { Solve(problem); }));
    }
    return best;
  };
  const double t500 = fastest(500);
  const double t1000 = fastest(1000);
  out.Require(t1000 < 3.0 * t500, "N 500 -> 1000 time ratio " +
                                      Num(t1000 / t500, 3));
}

void SelfConvergence(Outcome& out) {
  for (const auto& name : kScenarios) {
    const Scenario sc = testing::Bundled(name);
    const SolveResult coarse = Solve(Transcribe(sc, 500));
    const SolveResult fine = Solve(Transcribe(sc, 2000));
    if (coarse.report.status != SolveStatus::kOptimal ||
        fine.report.status != SolveStatus::kOptimal) {
      out.Require(false, name + " not optimal");
      continue;
    }
    const double a = coarse.trajectory.Consumption();
    const double b = fine.trajectory.Consumption();
    const double change = std::abs(a - b) / b;
    out.Require(change < 2e-3,
                name + " change " + Num(100.0 * change, 3) + "%");
  }
}

// Solar input lowers consumption and a negative terrain power raises it.
void Extensions(Outcome& out) {
  const Scenario base = testing::Bundled("paperlike");
  auto consumption = [](const Scenario& sc) {
    const Plan plan = PlanFixedT(sc, sc.horizon, Options(kGrid));
    return plan.optimal() ? plan.Consumption()
                          : std::numeric_limits<double>::quiet_NaN();
  };
  Scenario sunny = base;
  sunny.solar = Signal(1000.0);
  Scenario uphill = base;
  uphill.terrain = Signal(-500.0);
  const double c0 = consumption(base);
  const double c_sun = consumption(Validate(sunny));
  const double c_hill = consumption(Validate(uphill));
  out.Require(c_sun < c0, "solar 1 kW: " + Num(c_sun / 1e3, 7) + " < " +
                              Num(c0 / 1e3, 7) + " kJ");
  out.Require(c_hill > c0, "terrain -0.5 kW: " + Num(c_hill / 1e3, 7) +
                               " > " + Num(c0 / 1e3, 7) + " kJ");
}

struct Criterion {
  const char* title;
  void (*run)(Outcome&);
};

const Criterion kCriteria[] = {
    {"tightness", Tightness},
    {"relaxation dominance", Dominance},
    {"pinned speed consumption", PinnedSpeed},
    {"cruise consistency", Cruise},
    {"min-time depletion", Depletion},
    {"coasting interval", Coasting},
    {"pareto shape", ParetoShape},
    {"solver health", SolverHealth},
    {"discretization self-convergence", SelfConvergence},
    {"extensions", Extensions},
};

}  // namespace
}  // namespace ecoplan

int main(int argc, char** argv) {
  using ecoplan::kCriteria;
  int first = 1;
  int last = 10;
  if (argc > 1) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > 10) {
      std::cerr << "usage: acceptance [1-10]\n";
      return 2;
    }
  }
  bool all = true;
  for (int i = first; i <= last; ++i) {
    ecoplan::Outcome out;
    try {
      kCriteria[i - 1].run(out);
    } catch (const std::exception& e) {
      out.Require(false, std::string("exception: ") + e.what());
    }
    std::string detail = out.detail.str();
    if (detail.size() >= 2) detail.resize(detail.size() - 2);
    std::cout << "criterion " << i << " (" << kCriteria[i - 1].title
              << "): " << (out.pass ? "PASS" : "FAIL") << "  " << detail
              << std::endl;
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
