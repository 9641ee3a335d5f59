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

#include <cmath>

#include <gtest/gtest.h>

#include "ecoplan/recovery.h"
#include "ecoplan/solver.h"
#include "ecoplan/transcription.h"
#include "support.h"

namespace ecoplan {
namespace {

ControlSchedule Constant(const Grid& grid, double drive, double brake) {
  ControlSchedule s;
  s.grid = grid;
  s.P_drv = Eigen::VectorXd::Constant(grid.N, drive);
  s.P_brk = Eigen::VectorXd::Constant(grid.N, brake);
  return s;
}

TEST(SimulateTest, IdleFromRest) {
  const Scenario sc = testing::Paperlike(100.0);
  const Simulation sim =
      SimulateForward(Constant(MakeGrid(100.0, 50), 0.0, 0.0), sc);
  const Trajectory& t = sim.trajectory;
  EXPECT_EQ(t.kind, TrajectoryKind::kSimulated);
  for (int k = 0; k <= 50; ++k) {
    EXPECT_EQ(t.x[k], 0.0);
    EXPECT_EQ(t.v[k], 0.0);
    EXPECT_NEAR(t.E[k], sc.E_init - 5000.0 * t.grid.Time(k), 1e-6);
  }
  EXPECT_EQ(sim.shed_energy, 0.0);
}

TEST(SimulateTest, HoldingTwentyMetersPerSecond) {
  const Scenario sc = testing::Pinned();
  // Drag plus rolling loss at 20 m/s.
  const double hold = 3928.4 + 2000.0;
  const Simulation sim =
      SimulateForward(Constant(MakeGrid(10.0, 100), hold, 0.0), sc);
  const Trajectory& t = sim.trajectory;
  EXPECT_NEAR(t.Consumption(), 111040.0, 1e-3 * 111040.0);
  EXPECT_NEAR(t.v[100], 20.0, 1e-6);
  EXPECT_NEAR(t.FinalPosition(), 200.0, 1e-5);
}

TEST(SimulateTest, ConsumptionIsTheIntegralOfTheEngineRate) {
  const Scenario sc = testing::Paperlike();
  const SolveResult result = Solve(Transcribe(sc, 300));
  ASSERT_EQ(result.report.status, SolveStatus::kOptimal);
  const ControlSchedule controls = ControlsOf(Recover(result.trajectory, sc));
  const Simulation sim = SimulateForward(controls, sc);
  double burnt = 0.0;
  for (int j = 0; j < controls.grid.N; ++j) {
    burnt += controls.grid.h * EngineRate(sc.engine, controls.P_drv[j]);
  }
  EXPECT_NEAR(sim.trajectory.Consumption(), burnt, 1e-6 * burnt);
}

TEST(SimulateTest, ReplayingRecoveredControlsReproducesEndpoints) {
  for (const char* name : {"paperlike", "cruise", "energy_bound"}) {
    const Scenario sc = testing::Bundled(name);
    const SolveResult result = Solve(Transcribe(sc, 1000));
    ASSERT_EQ(result.report.status, SolveStatus::kOptimal) << name;
    const Trajectory rec = Recover(result.trajectory, sc);
    const Simulation sim = SimulateForward(ControlsOf(rec), sc);
    EXPECT_NEAR(sim.trajectory.FinalPosition(), rec.FinalPosition(),
                5e-3 * rec.FinalPosition())
        << name;
    EXPECT_NEAR(sim.trajectory.Consumption(), rec.Consumption(),
                5e-3 * rec.Consumption())
        << name;
  }
}

TEST(SimulateTest, HalvingTheSubstepBarelyMovesAMovingVehicle) {
  const Scenario sc = testing::Pinned();
  const SolveResult result = Solve(Transcribe(sc, 100));
  ASSERT_EQ(result.report.status, SolveStatus::kOptimal);
  const ControlSchedule controls = ControlsOf(Recover(result.trajectory, sc));
  const Trajectory a = SimulateForward(controls, sc, 10).trajectory;
  const Trajectory b = SimulateForward(controls, sc, 20).trajectory;
  EXPECT_NEAR(a.FinalPosition(), b.FinalPosition(), 1e-8 * b.FinalPosition());
  EXPECT_NEAR(a.FinalEnergy(), b.FinalEnergy(), 1e-8 * b.FinalEnergy());
  EXPECT_NEAR(a.K[a.grid.N], b.K[b.grid.N], 1e-8 * b.K[b.grid.N]);
}

// Speed is the square root of kinetic energy, which is not smooth at rest,
// so from a standing start only convergence is expected.
TEST(SimulateTest, SubstepRefinementConvergesFromRest) {
  const Scenario sc = testing::Bundled("cruise");
  const SolveResult result = Solve(Transcribe(sc, 400));
  ASSERT_EQ(result.report.status, SolveStatus::kOptimal);
  const ControlSchedule controls = ControlsOf(Recover(result.trajectory, sc));
  const auto reach = [&](int substeps) {
    return SimulateForward(controls, sc, substeps).trajectory.FinalPosition();
  };
  const double x10 = reach(10);
  const double x20 = reach(20);
  const double x40 = reach(40);
  EXPECT_LT(std::abs(x40 - x20), 0.5 * std::abs(x20 - x10));
  EXPECT_NEAR(x10, x40, 1e-5 * x40);
}

TEST(SimulateTest, BrakingPastRestShedsEnergy) {
  Scenario sc = testing::Pinned();
  sc.v_min = Signal(0.0);
  sc = Validate(sc);
  const Simulation sim =
      SimulateForward(Constant(MakeGrid(10.0, 10), 0.0, 50000.0), sc);
  EXPECT_GT(sim.shed_energy, 0.0);
  EXPECT_GE(sim.trajectory.K.minCoeff(), 0.0);
}

TEST(SimulateTest, RejectsNegativeBrake) {
  const Scenario sc = testing::Paperlike();
  ControlSchedule s = Constant(MakeGrid(280.0, 10), 1000.0, 0.0);
  s.P_brk[4] = -1.0;
  try {
    SimulateForward(s, sc);
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("nonnegative"), std::string::npos);
  }
  EXPECT_THROW(SimulateForward(Constant(MakeGrid(280.0, 10), 0.0, 0.0), sc, 0),
               std::invalid_argument);
}

TEST(RandomScheduleTest, AcceptedSchedulesAreFeasible) {
  const Scenario sc = testing::Paperlike();
  const RandomScheduleSet set = RandomFeasibleSchedules(sc, 200, 10, 42);
  ASSERT_EQ(set.accepted.size(), 10u);
  EXPECT_TRUE(set.warning.empty());
  for (const auto& s : set.accepted) {
    EXPECT_NO_THROW(s.schedule.Validate(sc.engine));
    const Simulation again = SimulateForward(s.schedule, sc);
    EXPECT_EQ(again.trajectory.FinalEnergy(),
              s.simulation.trajectory.FinalEnergy());
    EXPECT_TRUE(CheckFeasibility(s.simulation.trajectory, sc).feasible);
  }
}

TEST(RandomScheduleTest, SameSeedSameSchedules) {
  const Scenario sc = testing::Bundled("energy_bound");
  const RandomScheduleSet a = RandomFeasibleSchedules(sc, 100, 5, 9);
  const RandomScheduleSet b = RandomFeasibleSchedules(sc, 100, 5, 9);
  const RandomScheduleSet c = RandomFeasibleSchedules(sc, 100, 5, 10);
  ASSERT_EQ(a.accepted.size(), b.accepted.size());
  EXPECT_EQ(a.attempts, b.attempts);
  for (std::size_t i = 0; i < a.accepted.size(); ++i) {
    EXPECT_TRUE((a.accepted[i].schedule.P_drv.array() ==
                 b.accepted[i].schedule.P_drv.array())
                    .all());
  }
  EXPECT_FALSE((a.accepted[0].schedule.P_drv.array() ==
                c.accepted[0].schedule.P_drv.array())
                   .all());
}

TEST(RandomScheduleTest, NeverBeatTheOptimum) {
  for (const char* name : {"paperlike", "pinned", "energy_bound"}) {
    const Scenario sc = testing::Bundled(name);
    const int N = 200;
    const SolveResult result = Solve(Transcribe(sc, N));
    ASSERT_EQ(result.report.status, SolveStatus::kOptimal);
    const RandomScheduleSet set = RandomFeasibleSchedules(sc, N, 30, 1);
    ASSERT_EQ(set.accepted.size(), 30u) << name;
    for (const auto& s : set.accepted) {
      EXPECT_LE(s.simulation.trajectory.FinalEnergy(),
                result.report.objective + 1e-4 * sc.E_init)
          << name;
    }
  }
}

TEST(RandomScheduleTest, ShortfallIsReported) {
  // 5 km in 200 s needs more than 90 km/h on average.
  Scenario sc = testing::Paperlike(200.0);
  const RandomScheduleSet set = RandomFeasibleSchedules(sc, 100, 5, 3, 20);
  EXPECT_EQ(set.attempts, 20);
  EXPECT_LT(set.accepted.size(), 5u);
  EXPECT_FALSE(set.warning.empty());
}

TEST(CruiseTest, ConsumptionPerMeterAtTwentyMetersPerSecond) {
  // 11.104 kW over 20 m/s.
  EXPECT_NEAR(CruiseConsumption(testing::ExampleVehicle(),
                                testing::ExampleEngine(), 20.0),
              555.2, 0.05);
}

TEST(CruiseTest, GoldenSectionMatchesGridScan) {
  const VehicleParams veh = testing::ExampleVehicle();
  const EngineModel engine = testing::ExampleEngine();
  const double v_star = CruiseOracle(veh, engine);
  double best_v = 0.0;
  double best = kInfinity;
  for (int i = 0; i <= 100000; ++i) {
    const double v = 0.5 + (80.0 - 0.5) * i / 100000.0;
    const double e = CruiseConsumption(veh, engine, v);
    if (e < best) {
      best = e;
      best_v = v;
    }
  }
  EXPECT_NEAR(v_star, best_v, 0.01);
}

TEST(CruiseTest, HigherIdleCostRaisesCruiseSpeed) {
  const VehicleParams veh = testing::ExampleVehicle();
  const double base = CruiseOracle(veh, testing::ExampleEngine());
  const double doubled =
      CruiseOracle(veh, EngineModel::Quadratic(0.005e-3, 1.0, 10000.0, 0.0));
  EXPECT_GT(doubled, base);
}

TEST(CruiseTest, EdgeMinimumThrows) {
  // Without idle cost the best speed per meter tends to zero.
  EXPECT_THROW(CruiseOracle(testing::ExampleVehicle(),
                            EngineModel::Quadratic(0.005e-3, 1.0, 0.0, 0.0)),
               std::domain_error);
}

}  // namespace
}  // namespace ecoplan
