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

#include "ecoplan/trajectory.h"

#include <stdexcept>

namespace ecoplan {

std::string KindName(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kRelaxed:
      return "relaxed";
    case TrajectoryKind::kRecovered:
      return "recovered";
    case TrajectoryKind::kSimulated:
      return "simulated";
  }
  return "unknown";
}

TrajectoryKind ParseKind(const std::string& name) {
  if (name == "relaxed") return TrajectoryKind::kRelaxed;
  if (name == "recovered") return TrajectoryKind::kRecovered;
  if (name == "simulated") return TrajectoryKind::kSimulated;
  throw std::invalid_argument("unknown trajectory kind '" + name + "'");
}

Trajectory MakeTrajectory(const Grid& grid, TrajectoryKind kind) {
  Trajectory traj;
  traj.grid = grid;
  traj.x = Eigen::VectorXd::Zero(grid.N + 1);
  traj.v = Eigen::VectorXd::Zero(grid.N + 1);
  traj.K = Eigen::VectorXd::Zero(grid.N + 1);
  traj.E = Eigen::VectorXd::Zero(grid.N + 1);
  traj.P_drv = Eigen::VectorXd::Zero(grid.N);
  traj.P_brk = Eigen::VectorXd::Zero(grid.N);
  traj.kind = kind;
  return traj;
}

Eigen::VectorXd ToPoint(const DiscretizedProblem& problem,
                        const Trajectory& traj) {
  const VariableLayout& L = problem.layout();
  if (traj.grid.N != L.N) {
    throw std::invalid_argument("trajectory grid does not match the problem");
  }
  Eigen::VectorXd z(L.size());
  for (int k = 0; k <= L.N; ++k) {
    z[L.x(k)] = traj.x[k];
    z[L.v(k)] = traj.v[k];
    z[L.K(k)] = traj.K[k];
    z[L.E(k)] = traj.E[k];
  }
  for (int j = 0; j < L.N; ++j) z[L.P(j)] = traj.P_drv[j];
  return z;
}

}  // namespace ecoplan
