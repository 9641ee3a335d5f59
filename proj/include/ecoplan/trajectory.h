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

#ifndef ECOPLAN_TRAJECTORY_H_
#define ECOPLAN_TRAJECTORY_H_

#include <string>

#include <Eigen/Dense>

#include "ecoplan/transcription.h"

namespace ecoplan {

enum class TrajectoryKind { kRelaxed, kRecovered, kSimulated };

std::string KindName(TrajectoryKind kind);
TrajectoryKind ParseKind(const std::string& name);

// Sampled speed profile. Node quantities have N+1 entries, interval
// quantities (drive and brake power) N.
struct Trajectory {
  Grid grid;
  Eigen::VectorXd x;      // m
  Eigen::VectorXd v;      // m/s
  Eigen::VectorXd K;      // J
  Eigen::VectorXd E;      // J
  Eigen::VectorXd P_drv;  // W
  Eigen::VectorXd P_brk;  // W
  TrajectoryKind kind = TrajectoryKind::kRelaxed;

  double FinalEnergy() const { return E[E.size() - 1]; }
  double FinalPosition() const { return x[x.size() - 1]; }
  double Consumption() const { return E[0] - FinalEnergy(); }
};

// Allocates a zero trajectory on `grid`.
Trajectory MakeTrajectory(const Grid& grid, TrajectoryKind kind);

// Packs a trajectory into the transcription's variable layout.
Eigen::VectorXd ToPoint(const DiscretizedProblem& problem,
                        const Trajectory& trajectory);

}  // namespace ecoplan

#endif  // ECOPLAN_TRAJECTORY_H_
