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

#include "ecoplan/io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace ecoplan {
namespace {

using Json = nlohmann::json;

constexpr double kKilo = 1e3;
constexpr double kKmh = 1.0 / 3.6;

// Key path and line/column helpers for diagnostics.
std::string Join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string LineColumn(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const std::string& where,
                         const std::string& message) const {
    throw FormatError(source_, where, message);
  }

  const Json& Object(const Json& parent, const std::string& path,
                     const std::string& key,
                     const std::set<std::string>& allowed) const {
    const std::string here = Join(path, key);
    if (!parent.contains(key)) Fail(here, "missing section");
    const Json& node = parent.at(key);
    if (!node.is_object()) Fail(here, "must be an object");
    RejectUnknown(node, here, allowed);
    return node;
  }

  void RejectUnknown(const Json& node, const std::string& path,
                     const std::set<std::string>& allowed) const {
    for (const auto& item : node.items()) {
      if (!allowed.count(item.key())) {
        Fail(Join(path, item.key()), "unknown key");
      }
    }
  }

  double Number(const Json& parent, const std::string& path,
                const std::string& key) const {
    const std::string here = Join(path, key);
    if (!parent.contains(key)) Fail(here, "missing value");
    const Json& node = parent.at(key);
    if (!node.is_number()) Fail(here, "must be a number");
    const double value = node.get<double>();
    if (!std::isfinite(value)) Fail(here, "must be finite");
    return value;
  }

  std::optional<double> OptionalNumber(const Json& parent,
                                       const std::string& path,
                                       const std::string& key) const {
    if (!parent.contains(key) || parent.at(key).is_null()) {
      return std::nullopt;
    }
    return Number(parent, path, key);
  }

  // [[t_s, value], ...] or {"interpolation": ..., "points": [...]}.
  Signal ReadSignal(const Json& node, const std::string& path,
                    double unit) const {
    Signal::Interpolation interpolation =
        Signal::Interpolation::kPiecewiseConstant;
    const Json* points = &node;
    if (node.is_object()) {
      RejectUnknown(node, path, {"interpolation", "points"});
      if (node.contains("interpolation")) {
        const Json& kind = node.at("interpolation");
        const std::string here = Join(path, "interpolation");
        if (!kind.is_string()) Fail(here, "must be a string");
        const std::string name = kind.get<std::string>();
        if (name == "linear") {
          interpolation = Signal::Interpolation::kPiecewiseLinear;
        } else if (name != "constant") {
          Fail(here, "must be \"constant\" or \"linear\"");
        }
      }
      if (!node.contains("points")) Fail(Join(path, "points"), "missing");
      points = &node.at("points");
    }
    if (!points->is_array() || points->empty()) {
      Fail(path, "must be a nonempty list of [t_s, value] pairs");
    }
    std::vector<Signal::Breakpoint> breakpoints;
    for (std::size_t i = 0; i < points->size(); ++i) {
      const Json& pair = (*points)[i];
      const std::string here = path + "[" + std::to_string(i) + "]";
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number()) {
        Fail(here, "must be a [t_s, value] pair of numbers");
      }
      breakpoints.push_back(
          {pair[0].get<double>(), pair[1].get<double>() * unit});
    }
    try {
      return Signal(std::move(breakpoints), interpolation);
    } catch (const ScenarioError& e) {
      Fail(path, e.what());
    }
  }

 private:
  std::string source_;
};

// Model-level field names mapped back to file keys.
std::string FileKey(const std::string& field) {
  static const std::map<std::string, std::string> kKeys = {
      {"vehicle.mass", "vehicle.mass_kg"},
      {"vehicle.rho", "vehicle.rho"},
      {"vehicle.area", "vehicle.area_m2"},
      {"vehicle.cd", "vehicle.cd"},
      {"vehicle.crr", "vehicle.crr_N_per_mps"},
      {"horizon.T", "horizon.T_s"},
      {"bounds.x_init", "bounds.x_init_m"},
      {"bounds.x_end", "bounds.x_end_m"},
      {"bounds.E_init", "bounds.E_init_kJ"},
      {"bounds.E_min", "bounds.E_min_kJ"},
      {"bounds.E_max", "bounds.E_max_kJ"},
      {"bounds.v_init", "bounds.v_init_mps"},
  };
  const auto it = kKeys.find(field);
  return it == kKeys.end() ? field : it->second;
}

std::string Format(double value) {
  std::ostringstream os;
  os << std::setprecision(17) << value;
  return os.str();
}

Json Finite(double value) {
  return std::isfinite(value) ? Json(value) : Json(nullptr);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseNumber(const std::string& text, const std::string& source,
                   int line, const std::string& column) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw FormatError(source, "line " + std::to_string(line),
                      "column " + column + ": '" + text +
                          "' is not a finite number");
  }
  return value;
}

std::string ReadLine(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Parsed numeric rows of a CSV file with a fixed header.
std::vector<std::vector<std::string>> ReadRows(std::istream& is,
                                               const std::string& header,
                                               const std::string& source) {
  const std::string first = ReadLine(is);
  if (first != header) {
    throw FormatError(source, "line 1", "expected header '" + header + "'");
  }
  const std::size_t width = SplitCsv(header).size();
  std::vector<std::vector<std::string>> rows;
  int number = 1;
  while (is.peek() != EOF) {
    const std::string line = ReadLine(is);
    ++number;
    if (line.empty()) continue;
    auto fields = SplitCsv(line);
    if (fields.size() != width) {
      throw FormatError(source, "line " + std::to_string(number),
                        "expected " + std::to_string(width) + " fields");
    }
    fields.push_back(std::to_string(number));
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

FormatError::FormatError(std::string source, std::string where,
                         const std::string& message)
    : std::runtime_error(source + ": " + where + ": " + message),
      source_(std::move(source)),
      where_(std::move(where)) {}

Scenario ParseScenario(const std::string& text, const std::string& source,
                       bool require_horizon) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string detail = e.what();
    const std::size_t colon = detail.find(": ");
    detail = colon == std::string::npos
                 ? "invalid JSON"
                 : "invalid JSON, " + detail.substr(colon + 2);
    throw FormatError(source, LineColumn(text, e.byte == 0 ? 0 : e.byte - 1),
                      detail);
  }
  const Reader r(source);
  if (!root.is_object()) r.Fail("(root)", "must be an object");
  r.RejectUnknown(root, "",
                  {"vehicle", "engine", "bounds", "horizon", "signals",
                   "description"});

  Scenario sc;
  const Json& veh = r.Object(root, "", "vehicle",
                             {"mass_kg", "rho", "area_m2", "cd",
                              "crr_N_per_mps"});
  sc.vehicle.mass = r.Number(veh, "vehicle", "mass_kg");
  sc.vehicle.air_density = r.Number(veh, "vehicle", "rho");
  sc.vehicle.frontal_area = r.Number(veh, "vehicle", "area_m2");
  sc.vehicle.drag_coefficient = r.Number(veh, "vehicle", "cd");
  sc.vehicle.rolling_resistance = r.Number(veh, "vehicle", "crr_N_per_mps");

  const Json& eng = r.Object(root, "", "engine",
                             {"type", "alpha_per_kW", "beta", "gamma_kW",
                              "points", "p_min_kW", "p_max_kW"});
  if (!eng.contains("type") || !eng.at("type").is_string()) {
    r.Fail("engine.type", "must be \"quadratic\" or \"pwl\"");
  }
  const std::string type = eng.at("type").get<std::string>();
  try {
    if (type == "quadratic") {
      if (eng.contains("points")) r.Fail("engine.points", "unknown key");
      const auto p_max = r.OptionalNumber(eng, "engine", "p_max_kW");
      sc.engine = EngineModel::Quadratic(
          r.Number(eng, "engine", "alpha_per_kW") / kKilo,
          r.Number(eng, "engine", "beta"),
          r.Number(eng, "engine", "gamma_kW") * kKilo,
          r.Number(eng, "engine", "p_min_kW") * kKilo,
          p_max ? *p_max * kKilo : kInfinity);
    } else if (type == "pwl") {
      for (const char* key : {"alpha_per_kW", "beta", "gamma_kW"}) {
        if (eng.contains(key)) r.Fail(Join("engine", key), "unknown key");
      }
      if (!eng.contains("points") || !eng.at("points").is_array()) {
        r.Fail("engine.points", "must be a list of [p_kW, rate_kW] pairs");
      }
      std::vector<EngineModel::Point> points;
      const Json& list = eng.at("points");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const Json& pair = list[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number()) {
          r.Fail("engine.points[" + std::to_string(i) + "]",
                 "must be a [p_kW, rate_kW] pair of numbers");
        }
        points.push_back(
            {pair[0].get<double>() * kKilo, pair[1].get<double>() * kKilo});
      }
      sc.engine = EngineModel::PiecewiseLinear(std::move(points));
      const auto p_min = r.OptionalNumber(eng, "engine", "p_min_kW");
      const auto p_max = r.OptionalNumber(eng, "engine", "p_max_kW");
      if (p_min && std::abs(*p_min * kKilo - sc.engine.p_min()) > 1e-9) {
        r.Fail("engine.p_min_kW", "must equal the first breakpoint power");
      }
      if (p_max && std::abs(*p_max * kKilo - sc.engine.p_max()) > 1e-9) {
        r.Fail("engine.p_max_kW", "must equal the last breakpoint power");
      }
    } else {
      r.Fail("engine.type", "must be \"quadratic\" or \"pwl\"");
    }
    sc.engine.Validate();
  } catch (const ScenarioError& e) {
    r.Fail("engine", e.what());
  }

  const Json& bounds = r.Object(root, "", "bounds",
                                {"E_init_kJ", "E_min_kJ", "E_max_kJ",
                                 "x_init_m", "x_end_m", "v_init_mps"});
  sc.E_init = r.Number(bounds, "bounds", "E_init_kJ") * kKilo;
  sc.E_min = r.Number(bounds, "bounds", "E_min_kJ") * kKilo;
  sc.E_max = r.Number(bounds, "bounds", "E_max_kJ") * kKilo;
  sc.x_init = r.Number(bounds, "bounds", "x_init_m");
  sc.x_end = r.Number(bounds, "bounds", "x_end_m");
  sc.v_init = r.Number(bounds, "bounds", "v_init_mps");

  if (root.contains("horizon")) {
    const Json& horizon = r.Object(root, "", "horizon", {"T_s"});
    sc.horizon = r.OptionalNumber(horizon, "horizon", "T_s").value_or(0.0);
  }

  const Json& signals =
      r.Object(root, "", "signals",
               {"v_min", "v_max", "a_max", "solar", "terrain"});
  for (const char* key : {"v_min", "v_max", "a_max"}) {
    if (!signals.contains(key)) r.Fail(Join("signals", key), "missing");
  }
  sc.v_min = r.ReadSignal(signals.at("v_min"), "signals.v_min", kKmh);
  sc.v_max = r.ReadSignal(signals.at("v_max"), "signals.v_max", kKmh);
  sc.a_max = r.ReadSignal(signals.at("a_max"), "signals.a_max", 1.0);
  if (signals.contains("solar")) {
    sc.solar = r.ReadSignal(signals.at("solar"), "signals.solar", kKilo);
  }
  if (signals.contains("terrain")) {
    sc.terrain = r.ReadSignal(signals.at("terrain"), "signals.terrain", kKilo);
  }

  if (sc.horizon <= 0.0 && require_horizon) {
    r.Fail("horizon.T_s", "missing (pass a horizon explicitly)");
  }
  return CheckScenario(sc, source);
}

Scenario CheckScenario(const Scenario& scenario, const std::string& source) {
  try {
    if (scenario.horizon > 0.0) return Validate(scenario);
    Scenario checked = Validate(scenario.WithHorizon(1.0));
    checked.horizon = 0.0;
    return checked;
  } catch (const ScenarioError& e) {
    std::string message = e.what();
    const std::string prefix = e.field() + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    throw FormatError(source, FileKey(e.field()), message);
  }
}

Scenario LoadScenario(const std::string& path, bool require_horizon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, "file", "cannot be opened");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str(), path, require_horizon);
}

void WriteTrajectoryCsv(std::ostream& os, const Trajectory& traj) {
  os << kTrajectoryHeader << '\n';
  const int N = traj.grid.N;
  const std::string kind = KindName(traj.kind);
  for (int k = 0; k <= N; ++k) {
    const int j = std::min(k, N - 1);
    os << Format(traj.grid.Time(k)) << ',' << Format(traj.x[k]) << ','
       << Format(traj.v[k]) << ',' << Format(traj.K[k] / kKilo) << ','
       << Format(traj.P_drv[j] / kKilo) << ','
       << Format(traj.P_brk[j] / kKilo) << ',' << Format(traj.E[k] / kKilo)
       << ',' << kind << '\n';
  }
}

Trajectory ReadTrajectoryCsv(std::istream& is, const std::string& source) {
  const auto rows = ReadRows(is, kTrajectoryHeader, source);
  if (rows.size() < 3) {
    throw FormatError(source, "rows", "need at least three nodes");
  }
  const int N = static_cast<int>(rows.size()) - 1;
  std::vector<std::vector<double>> values;
  TrajectoryKind kind = TrajectoryKind::kRelaxed;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const int line = std::stoi(row.back());
    std::vector<double> numbers;
    static const char* kColumns[] = {"t_s",     "x_m",     "v_mps", "K_kJ",
                                     "Pdrv_kW", "Pbrk_kW", "E_kJ"};
    for (int c = 0; c < 7; ++c) {
      numbers.push_back(ParseNumber(row[c], source, line, kColumns[c]));
    }
    try {
      const TrajectoryKind row_kind = ParseKind(row[7]);
      if (i == 0) kind = row_kind;
      if (row_kind != kind) {
        throw FormatError(source, "line " + std::to_string(line),
                          "mixed trajectory kinds");
      }
    } catch (const std::invalid_argument& e) {
      throw FormatError(source, "line " + std::to_string(line), e.what());
    }
    if (i > 0 && !(numbers[0] > values.back()[0])) {
      throw FormatError(source, "line " + std::to_string(line),
                        "t_s must be strictly increasing");
    }
    values.push_back(std::move(numbers));
  }
  if (values.front()[0] != 0.0) {
    throw FormatError(source, "line 2", "t_s must start at 0");
  }
  Trajectory traj = MakeTrajectory(MakeGrid(values.back()[0], N), kind);
  for (int k = 0; k <= N; ++k) {
    traj.x[k] = values[k][1];
    traj.v[k] = values[k][2];
    traj.K[k] = values[k][3] * kKilo;
    traj.E[k] = values[k][6] * kKilo;
    if (k < N) {
      traj.P_drv[k] = values[k][4] * kKilo;
      traj.P_brk[k] = values[k][5] * kKilo;
    }
  }
  return traj;
}

void WriteControlsCsv(std::ostream& os, const ControlSchedule& schedule) {
  os << kControlsHeader << '\n';
  for (int j = 0; j < schedule.grid.N; ++j) {
    os << Format(schedule.grid.Time(j)) << ','
       << Format(schedule.P_drv[j] / kKilo) << ','
       << Format(schedule.P_brk[j] / kKilo) << '\n';
  }
}

ControlSchedule ReadControlsCsv(std::istream& is, double T,
                                const std::string& source) {
  const auto rows = ReadRows(is, kControlsHeader, source);
  std::vector<double> times;
  std::vector<double> drive;
  std::vector<double> brake;
  for (const auto& row : rows) {
    const int line = std::stoi(row.back());
    times.push_back(ParseNumber(row[0], source, line, "t_s"));
    drive.push_back(ParseNumber(row[1], source, line, "Pdrv_kW") * kKilo);
    brake.push_back(ParseNumber(row[2], source, line, "Pbrk_kW") * kKilo);
    if (brake.back() < 0.0) {
      throw FormatError(source, "line " + std::to_string(line),
                        "Pbrk_kW must be nonnegative");
    }
  }
  const double slack = 1e-9 * std::max(T, 1.0);
  if (times.empty() || std::abs(times.front()) > slack) {
    throw FormatError(source, "t_s", "controls must start at t = 0");
  }
  if (std::abs(times.back() - T) <= slack && times.size() > 1) {
    times.pop_back();
    drive.pop_back();
    brake.pop_back();
  }
  const int N = static_cast<int>(times.size());
  if (N < 2) throw FormatError(source, "rows", "need at least two intervals");
  const Grid grid = MakeGrid(T, N);
  for (int j = 0; j < N; ++j) {
    if (std::abs(times[j] - grid.Time(j)) > 1e-6 * grid.h) {
      throw FormatError(source, "t_s",
                        "controls must be uniformly spaced and cover [0, " +
                            Format(T) + "]");
    }
  }
  ControlSchedule schedule;
  schedule.grid = grid;
  schedule.P_drv = Eigen::Map<Eigen::VectorXd>(drive.data(), N);
  schedule.P_brk = Eigen::Map<Eigen::VectorXd>(brake.data(), N);
  return schedule;
}

void WriteParetoCsv(std::ostream& os, const std::vector<ParetoPoint>& points) {
  os << kParetoHeader << '\n';
  for (const auto& p : points) {
    os << Format(p.T) << ',';
    if (p.status == SolveStatus::kOptimal) os << Format(p.consumption / kKilo);
    os << ',' << StatusName(p.status) << '\n';
  }
}

nlohmann::ordered_json ToJson(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["status"] = StatusName(report.status);
  j["objective_J"] = Finite(report.objective);
  j["duality_gap_J"] = Finite(report.duality_gap);
  j["max_equality_residual"] = Finite(report.max_equality_residual);
  j["max_inequality_violation"] = Finite(report.max_inequality_violation);
  j["stationarity_residual"] = Finite(report.stationarity_residual);
  j["relative_stationarity"] = Finite(report.relative_stationarity);
  j["newton_iterations"] = report.newton_iterations;
  j["phase1_iterations"] = report.phase1_iterations;
  j["polish_iterations"] = report.polish_iterations;
  j["phase1_slack"] = Finite(report.phase1_slack);
  j["used_phase1"] = report.used_phase1;
  j["warm_started"] = report.warm_started;
  j["num_variables"] = report.num_variables;
  j["num_inequalities"] = report.num_inequalities;
  j["message"] = report.message;
  nlohmann::ordered_json settings;
  settings["eps_gap"] = report.settings.eps_gap;
  settings["eps_feas"] = report.settings.eps_feas;
  settings["mu"] = report.settings.mu;
  settings["max_newton"] = report.settings.max_newton;
  settings["slope_fraction"] = report.settings.slope_fraction;
  settings["shrink"] = report.settings.shrink;
  settings["max_total_iterations"] = report.settings.max_total_iterations;
  settings["relaxation"] = report.settings.EffectiveRelaxation();
  j["settings"] = settings;
  auto history = nlohmann::ordered_json::array();
  for (const auto& it : report.history) {
    history.push_back({{"t", it.t},
                       {"objective_J", it.objective},
                       {"gap_J", it.gap},
                       {"upper_bound_J", it.upper_bound},
                       {"newton_iterations", it.newton_iterations}});
  }
  j["history"] = history;
  return j;
}

nlohmann::ordered_json ToJson(const FeasibilityReport& report) {
  nlohmann::ordered_json j;
  j["feasible"] = report.feasible;
  j["tolerance"] = report.tolerance;
  j["max_violation"] = Finite(report.MaxViolation());
  j["acceleration_excess_mps2"] = Finite(report.acceleration_excess);
  j["min_brake_power_W"] = Finite(report.min_brake_power);
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["checked"] = c.checked;
    item["max_violation"] = c.checked ? Finite(c.max_violation) : Json();
    item["worst_index"] = c.worst_index;
    checks.push_back(item);
  }
  j["checks"] = checks;
  return j;
}

nlohmann::ordered_json ToJson(const std::vector<SearchStep>& history) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& s : history) {
    j.push_back({{"stage", s.stage},
                 {"T_s", s.T},
                 {"feasible", s.feasible},
                 {"margin", Finite(s.margin)},
                 {"consumption_kJ", s.consumption / kKilo},
                 {"status", s.status}});
  }
  return j;
}

void WriteSvgPlot(std::ostream& os, const std::string& title,
                  const std::string& x_label, const std::string& y_label,
                  const std::vector<PlotSeries>& series) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 400.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd"};

  double x0 = kInfinity, x1 = -kInfinity, y0 = kInfinity, y1 = -kInfinity;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) {
    x0 = std::isfinite(x0) ? x0 - 1.0 : 0.0;
    x1 = x0 + 2.0;
  }
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 1.0 : 0.0;
    y1 = y0 + 2.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double w = kWidth - kLeft - kRight;
  const double h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * h; };

  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
     << "font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
     << "font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << w
     << "\" height=\"" << h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kTop + h + 15
       << "\" text-anchor=\"middle\">" << std::setprecision(4)
       << std::defaultfloat << xv << std::fixed << std::setprecision(2)
       << "</text>\n";
    os << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\">" << std::setprecision(4)
       << std::defaultfloat << yv << std::fixed << std::setprecision(2)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + w / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text transform=\"translate(15," << kTop + h / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& line = series[s];
    const char* color = kColors[s % 5];
    if (line.markers_only) {
      for (std::size_t i = 0; i < line.x.size() && i < line.y.size(); ++i) {
        os << "<circle cx=\"" << px(line.x[i]) << "\" cy=\"" << py(line.y[i])
           << "\" r=\"4\" fill=\"" << color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < line.x.size() && i < line.y.size(); ++i) {
        if (!std::isfinite(line.y[i])) continue;
        os << px(line.x[i]) << ',' << py(line.y[i]) << ' ';
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 15 + 14 * s
       << "\" fill=\"" << color << "\">" << line.label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace ecoplan
