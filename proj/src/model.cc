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

#include "ecoplan/model.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace ecoplan {
namespace {

std::string Describe(const std::string& field, double value,
                     const std::string& message) {
  std::ostringstream os;
  os << field << ": " << message << " (got " << value << ")";
  return os.str();
}

void Require(bool ok, const std::string& field, double value,
             const std::string& message) {
  if (!ok) throw ScenarioError(field, value, message);
}

void RequirePositive(double value, const std::string& field,
                     const std::string& what) {
  Require(std::isfinite(value) && value > 0.0, field, value,
          what + " must be positive");
}

// Slack used when checking orderings stated on measured data.
constexpr double kRelativeSlack = 1e-12;

// Times at which a pair of signals can attain its extreme difference.
std::vector<double> CriticalTimes(const Signal& a, const Signal& b, double T) {
  std::vector<double> times = {0.0, T};
  for (const Signal* s : {&a, &b}) {
    for (const auto& bp : s->breakpoints()) {
      if (bp.time >= 0.0 && bp.time <= T) times.push_back(bp.time);
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

}  // namespace

ScenarioError::ScenarioError(std::string field, double value,
                             const std::string& message)
    : std::invalid_argument(Describe(field, value, message)),
      field_(std::move(field)),
      value_(value) {}

// ---------------------------------------------------------------------------
// Engine

EngineModel EngineModel::Quadratic(double alpha, double beta, double gamma,
                                   double p_min, double p_max) {
  EngineModel engine;
  engine.kind_ = Kind::kQuadratic;
  engine.alpha_ = alpha;
  engine.beta_ = beta;
  engine.gamma_ = gamma;
  engine.p_min_ = p_min;
  engine.p_max_ = p_max;
  return engine;
}

EngineModel EngineModel::PiecewiseLinear(std::vector<Point> points) {
  EngineModel engine;
  engine.kind_ = Kind::kPiecewiseLinear;
  engine.points_ = std::move(points);
  if (!engine.points_.empty()) {
    engine.p_min_ = engine.points_.front().power;
    engine.p_max_ = engine.points_.back().power;
  }
  return engine;
}

std::vector<EngineModel::AffinePiece> EngineModel::Pieces() const {
  std::vector<AffinePiece> pieces;
  if (kind_ != Kind::kPiecewiseLinear) return pieces;
  for (size_t i = 0; i + 1 < points_.size(); ++i) {
    const double slope = (points_[i + 1].rate - points_[i].rate) /
                         (points_[i + 1].power - points_[i].power);
    pieces.push_back({slope, points_[i].rate - slope * points_[i].power});
  }
  return pieces;
}

void EngineModel::Validate() const {
  Require(!std::isnan(p_min_) && std::isfinite(p_min_), "engine.p_min", p_min_,
          "minimum drive power must be finite");
  Require(!std::isnan(p_max_), "engine.p_max", p_max_, "must be a number");
  Require(p_min_ <= p_max_, "engine.p_max", p_max_,
          "must not be below p_min");
  if (kind_ == Kind::kQuadratic) {
    Require(std::isfinite(alpha_) && alpha_ >= 0.0, "engine.alpha", alpha_,
            "must be nonnegative for a convex characteristic");
    Require(std::isfinite(beta_), "engine.beta", beta_, "must be finite");
    Require(std::isfinite(gamma_), "engine.gamma", gamma_, "must be finite");
    const double slope_at_min = 2.0 * alpha_ * p_min_ + beta_;
    Require(slope_at_min > 0.0, "engine.beta", beta_,
            "characteristic must be strictly increasing on its domain "
            "(2 alpha p_min + beta > 0)");
    return;
  }
  Require(points_.size() >= 2, "engine.points",
          static_cast<double>(points_.size()),
          "need at least two breakpoints");
  for (const auto& pt : points_) {
    Require(std::isfinite(pt.power) && std::isfinite(pt.rate),
            "engine.points", pt.power, "breakpoints must be finite");
  }
  double previous_slope = -kInfinity;
  for (size_t i = 0; i + 1 < points_.size(); ++i) {
    const double dp = points_[i + 1].power - points_[i].power;
    Require(dp > 0.0, "engine.points", points_[i + 1].power,
            "breakpoint powers must be strictly increasing");
    const double slope = (points_[i + 1].rate - points_[i].rate) / dp;
    Require(slope > 0.0, "engine.points", slope,
            "slopes must be strictly positive");
    Require(slope >= previous_slope -
                         kRelativeSlack * std::max(1.0, std::abs(slope)),
            "engine.points", slope, "slopes must be nondecreasing (convexity)");
    previous_slope = slope;
  }
}

double EngineRateExtended(const EngineModel& engine, double p) {
  if (engine.kind() == EngineModel::Kind::kQuadratic) {
    return (engine.alpha() * p + engine.beta()) * p + engine.gamma();
  }
  const auto& pts = engine.points();
  // Locate the segment; end segments extend linearly.
  size_t i = 0;
  while (i + 2 < pts.size() && p > pts[i + 1].power) ++i;
  const double w = (p - pts[i].power) / (pts[i + 1].power - pts[i].power);
  return pts[i].rate + w * (pts[i + 1].rate - pts[i].rate);
}

double EngineRate(const EngineModel& engine, double p) {
  if (!(p >= engine.p_min() && p <= engine.p_max())) {
    throw std::domain_error("engine power outside [p_min, p_max]");
  }
  if (engine.kind() == EngineModel::Kind::kPiecewiseLinear) {
    for (const auto& pt : engine.points()) {
      if (pt.power == p) return pt.rate;
    }
  }
  return EngineRateExtended(engine, p);
}

double EngineInverse(const EngineModel& engine, double q, double tolerance) {
  const double q_lo = EngineRate(engine, engine.p_min());
  const double q_hi = engine.bounded_above()
                          ? EngineRate(engine, engine.p_max())
                          : kInfinity;
  if (!(q >= q_lo - tolerance && q <= q_hi + tolerance)) {
    throw std::domain_error("engine rate outside the range of f^eng");
  }
  if (q <= q_lo) return engine.p_min();
  if (q >= q_hi) return engine.p_max();

  if (engine.kind() == EngineModel::Kind::kQuadratic) {
    // Increasing root of alpha p^2 + beta p + (gamma - q) = 0 written so that
    // alpha = 0 and small alpha stay accurate.
    const double a = engine.alpha();
    const double b = engine.beta();
    const double c = q - engine.gamma();
    const double disc = b * b + 4.0 * a * c;
    const double p = 2.0 * c / (b + std::sqrt(std::max(disc, 0.0)));
    return std::clamp(p, engine.p_min(), engine.p_max());
  }
  const auto& pts = engine.points();
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (q <= pts[i + 1].rate) {
      const double w = (q - pts[i].rate) / (pts[i + 1].rate - pts[i].rate);
      return pts[i].power + w * (pts[i + 1].power - pts[i].power);
    }
  }
  return engine.p_max();
}

// ---------------------------------------------------------------------------
// Signal

Signal::Signal(double constant) : breakpoints_{{0.0, constant}} {}

Signal::Signal(std::vector<Breakpoint> breakpoints,
               Interpolation interpolation)
    : breakpoints_(std::move(breakpoints)), interpolation_(interpolation) {
  if (breakpoints_.empty()) {
    throw ScenarioError("signal", 0.0, "needs at least one breakpoint");
  }
  for (size_t i = 0; i < breakpoints_.size(); ++i) {
    const auto& bp = breakpoints_[i];
    if (!std::isfinite(bp.time) || !std::isfinite(bp.value)) {
      throw ScenarioError("signal", bp.time, "breakpoints must be finite");
    }
    if (i > 0 && !(bp.time > breakpoints_[i - 1].time)) {
      throw ScenarioError("signal", bp.time,
                          "breakpoint times must be strictly increasing");
    }
  }
}

Signal Signal::WithHorizon(double horizon) const {
  Signal copy = *this;
  copy.horizon_ = horizon;
  return copy;
}

double Signal::Evaluate(double t) const {
  const auto& bps = breakpoints_;
  if (t <= bps.front().time) return bps.front().value;
  if (t >= bps.back().time) return bps.back().value;
  // First breakpoint strictly after t.
  const auto it = std::upper_bound(
      bps.begin(), bps.end(), t,
      [](double time, const Breakpoint& bp) { return time < bp.time; });
  const auto& right = *it;
  const auto& left = *(it - 1);
  if (interpolation_ == Interpolation::kPiecewiseConstant) return left.value;
  const double w = (t - left.time) / (right.time - left.time);
  return left.value + w * (right.value - left.value);
}

double Signal::LeftLimit(double t) const {
  if (interpolation_ == Interpolation::kPiecewiseLinear) return Evaluate(t);
  const auto& bps = breakpoints_;
  if (t <= bps.front().time) return bps.front().value;
  const auto it = std::lower_bound(
      bps.begin(), bps.end(), t,
      [](const Breakpoint& bp, double time) { return bp.time < time; });
  return (it - 1)->value;
}

double Signal::Max() const {
  double best = -kInfinity;
  for (const auto& bp : breakpoints_) best = std::max(best, bp.value);
  return best;
}

double Sample(const Signal& signal, double t) {
  // Grid times are computed as k*h, so allow rounding at the right end.
  const double slack = 1e-9 * std::max(1.0, std::abs(signal.horizon()));
  if (!(t >= -slack && t <= signal.horizon() + slack)) {
    throw std::out_of_range("signal sampled outside [0, T]");
  }
  return signal.Evaluate(t);
}

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::WithHorizon(double T) const {
  Scenario copy = *this;
  copy.horizon = T;
  copy.v_min = v_min.WithHorizon(T);
  copy.v_max = v_max.WithHorizon(T);
  copy.a_max = a_max.WithHorizon(T);
  if (solar) copy.solar = solar->WithHorizon(T);
  if (terrain) copy.terrain = terrain->WithHorizon(T);
  return copy;
}

Scenario Validate(Scenario scenario) {
  const VehicleParams& veh = scenario.vehicle;
  RequirePositive(veh.mass, "vehicle.mass", "mass");
  RequirePositive(veh.air_density, "vehicle.rho", "air density");
  RequirePositive(veh.frontal_area, "vehicle.area", "frontal area");
  RequirePositive(veh.drag_coefficient, "vehicle.cd", "drag coefficient");
  RequirePositive(veh.rolling_resistance, "vehicle.crr",
                  "rolling resistance constant");
  scenario.engine.Validate();

  const double T = scenario.horizon;
  RequirePositive(T, "horizon.T", "horizon");
  Require(std::isfinite(scenario.x_init), "bounds.x_init", scenario.x_init,
          "must be finite");
  Require(std::isfinite(scenario.x_end) && scenario.x_end > scenario.x_init,
          "bounds.x_end", scenario.x_end, "must exceed x_init");
  Require(std::isfinite(scenario.E_min), "bounds.E_min", scenario.E_min,
          "must be finite");
  Require(std::isfinite(scenario.E_max), "bounds.E_max", scenario.E_max,
          "must be finite");
  Require(scenario.E_min <= scenario.E_init, "bounds.E_init", scenario.E_init,
          "must not be below E_min");
  Require(scenario.E_init <= scenario.E_max, "bounds.E_init", scenario.E_init,
          "must not exceed E_max");

  scenario = scenario.WithHorizon(T);
  for (const auto* sig : {&scenario.v_min, &scenario.v_max, &scenario.a_max}) {
    Require(sig->breakpoints().front().time <= 0.0, "signals",
            sig->breakpoints().front().time,
            "first breakpoint must be at t = 0 to cover [0, T]");
  }
  for (const double t : CriticalTimes(scenario.v_min, scenario.v_max, T)) {
    for (const double lo :
         {Sample(scenario.v_min, t), scenario.v_min.LeftLimit(t)}) {
      Require(lo >= 0.0, "signals.v_min", lo,
              "must be nonnegative (vehicle cannot move backward)");
    }
    const double lo = Sample(scenario.v_min, t);
    const double hi = Sample(scenario.v_max, t);
    Require(lo <= hi, "signals.v_max", hi, "must not be below v_min");
    const double lo_left = scenario.v_min.LeftLimit(t);
    const double hi_left = scenario.v_max.LeftLimit(t);
    Require(lo_left <= hi_left, "signals.v_max", hi_left,
            "must not be below v_min");
  }
  for (const auto& bp : scenario.a_max.breakpoints()) {
    Require(bp.value >= 0.0, "signals.a_max", bp.value,
            "must be nonnegative");
  }
  Require(std::isfinite(scenario.v_init) && scenario.v_init >= 0.0,
          "bounds.v_init", scenario.v_init, "must be nonnegative");
  Require(scenario.v_init >= Sample(scenario.v_min, 0.0), "bounds.v_init",
          scenario.v_init, "must not be below v_min(0)");
  Require(scenario.v_init <= Sample(scenario.v_max, 0.0), "bounds.v_init",
          scenario.v_init, "must not exceed v_max(0)");
  for (const auto* sig : {&scenario.solar, &scenario.terrain}) {
    if (*sig) {
      Require((*sig)->breakpoints().front().time <= 0.0, "signals",
              (*sig)->breakpoints().front().time,
              "first breakpoint must be at t = 0 to cover [0, T]");
    }
  }
  return scenario;
}

// ---------------------------------------------------------------------------
// Resistive losses

double DragPower(const VehicleParams& params, double v) {
  return params.DragFactor() * v * v * v;
}

double RollingPower(const VehicleParams& params, double v) {
  return params.rolling_resistance * v * v;
}

double DragPowerFromKinetic(const VehicleParams& params, double K) {
  const double u = 2.0 * K / params.mass;
  return params.DragFactor() * u * std::sqrt(u);
}

double RollingPowerFromKinetic(const VehicleParams& params, double K) {
  return 2.0 * params.rolling_resistance * K / params.mass;
}

LossDerivatives ResistiveLoss(const VehicleParams& params, double K) {
  const double m = params.mass;
  const double c = params.DragFactor() * std::pow(2.0 / m, 1.5);
  const double r = 2.0 * params.rolling_resistance / m;
  const double root = std::sqrt(std::max(K, 0.0));
  LossDerivatives out;
  out.value = c * K * root + r * K;
  out.first = 1.5 * c * root + r;
  out.second = root > 0.0 ? 0.75 * c / root : kInfinity;
  return out;
}

}  // namespace ecoplan
