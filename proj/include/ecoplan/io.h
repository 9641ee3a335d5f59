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

// File formats: scenario JSON (units in the key names, converted to SI
// here), trajectory / controls / Pareto CSV, report JSON and minimal SVG
// line plots.

#ifndef ECOPLAN_IO_H_
#define ECOPLAN_IO_H_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecoplan/model.h"
#include "ecoplan/planner.h"
#include "ecoplan/recovery.h"
#include "ecoplan/solver.h"
#include "ecoplan/trajectory.h"
#include "ecoplan/validation.h"

namespace ecoplan {

// Malformed input. `where` is "line L, column C" for syntax errors or a
// dotted key path ("engine.alpha_per_kW") for content errors.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string source, std::string where,
              const std::string& message);

  const std::string& source() const { return source_; }
  const std::string& where() const { return where_; }

 private:
  std::string source_;
  std::string where_;
};

// Parses and validates a scenario. A missing horizon.T_s leaves the horizon
// at 0 so a caller can supply it; validation then runs only when
// `require_horizon` is set. Scenario invariant failures surface as
// FormatError with the offending key path.
Scenario ParseScenario(const std::string& text, const std::string& source,
                       bool require_horizon = true);
Scenario LoadScenario(const std::string& path, bool require_horizon = true);

// Validates a scenario (on [0, 1] when it has no horizon) and reports
// failures as FormatError against the file key.
Scenario CheckScenario(const Scenario& scenario, const std::string& source);

inline constexpr char kTrajectoryHeader[] =
    "t_s,x_m,v_mps,K_kJ,Pdrv_kW,Pbrk_kW,E_kJ,kind";
inline constexpr char kControlsHeader[] = "t_s,Pdrv_kW,Pbrk_kW";
inline constexpr char kParetoHeader[] = "T_s,consumption_kJ,status";

// One row per node; interval quantities sit on their left node and the
// last node repeats the final interval.
void WriteTrajectoryCsv(std::ostream& os, const Trajectory& trajectory);
Trajectory ReadTrajectoryCsv(std::istream& is, const std::string& source);

void WriteControlsCsv(std::ostream& os, const ControlSchedule& schedule);
// Rows at uniformly spaced interval start times beginning at 0; a final row
// at T is accepted and ignored. Throws FormatError unless the rows cover
// [0, T] exactly.
ControlSchedule ReadControlsCsv(std::istream& is, double T,
                                const std::string& source);

void WriteParetoCsv(std::ostream& os, const std::vector<ParetoPoint>& points);

nlohmann::ordered_json ToJson(const SolveReport& report);
nlohmann::ordered_json ToJson(const FeasibilityReport& report);
nlohmann::ordered_json ToJson(const std::vector<SearchStep>& history);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers_only = false;
};

// A polyline chart with axes, tick labels and a legend.
void WriteSvgPlot(std::ostream& os, const std::string& title,
                  const std::string& x_label, const std::string& y_label,
                  const std::vector<PlotSeries>& series);

}  // namespace ecoplan

#endif  // ECOPLAN_IO_H_
