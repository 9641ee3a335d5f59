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

#ifndef ECOPLAN_MODEL_H_
#define ECOPLAN_MODEL_H_

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecoplan {

// All quantities are SI: m, s, kg, J, W.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Raised when a scenario (or one of its parts) violates an invariant. `field`
// names the offending member, `value` its offending value.
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(std::string field, double value, const std::string& message);

  const std::string& field() const { return field_; }
  double value() const { return value_; }

 private:
  std::string field_;
  double value_;
};

struct VehicleParams {
  double mass = 0.0;                // kg
  double air_density = 0.0;         // kg/m^3
  double frontal_area = 0.0;        // m^2
  double drag_coefficient = 0.0;    // dimensionless
  double rolling_resistance = 0.0;  // N per m/s

  // 1/2 rho A C_D, the cubic drag coefficient in W/(m/s)^3.
  double DragFactor() const {
    return 0.5 * air_density * frontal_area * drag_coefficient;
  }
};

// Increasing convex map from drive power to internal-energy consumption rate.
class EngineModel {
 public:
  enum class Kind { kQuadratic, kPiecewiseLinear };

  struct Point {
    double power;  // W
    double rate;   // W
  };

  // rate = slope * p + intercept; the pieces of a piecewise-linear engine.
  struct AffinePiece {
    double slope;
    double intercept;
  };

  EngineModel() = default;

  // alpha in 1/W, beta dimensionless, gamma in W. p_max may be kInfinity.
  static EngineModel Quadratic(double alpha, double beta, double gamma,
                               double p_min, double p_max = kInfinity);
  // Breakpoints sorted by power; the domain is [first.power, last.power].
  static EngineModel PiecewiseLinear(std::vector<Point> points);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  const std::vector<Point>& points() const { return points_; }
  double p_min() const { return p_min_; }
  double p_max() const { return p_max_; }
  bool bounded_above() const { return p_max_ < kInfinity; }

  // Affine pieces whose pointwise maximum equals the characteristic on its
  // domain. Empty for quadratic engines.
  std::vector<AffinePiece> Pieces() const;

  // Throws ScenarioError if the engine is not increasing and convex.
  void Validate() const;

 private:
  Kind kind_ = Kind::kQuadratic;
  double alpha_ = 0.0;
  double beta_ = 1.0;
  double gamma_ = 0.0;
  std::vector<Point> points_;
  double p_min_ = 0.0;
  double p_max_ = kInfinity;
};

// f^eng(p). Throws std::domain_error outside [p_min, p_max].
double EngineRate(const EngineModel& engine, double p);
// f^eng extended past its domain (end pieces for piecewise-linear engines).
// Used where iterates may sit marginally outside the domain.
double EngineRateExtended(const EngineModel& engine, double p);
// Unique p with f^eng(p) = q. Throws std::domain_error when q is outside the
// range of f^eng by more than `tolerance` (absolute, W); within tolerance the
// result is clamped to the domain.
double EngineInverse(const EngineModel& engine, double q,
                     double tolerance = 0.0);

// Time-varying scalar limit given by breakpoints.
class Signal {
 public:
  enum class Interpolation { kPiecewiseConstant, kPiecewiseLinear };

  struct Breakpoint {
    double time;
    double value;
  };

  Signal() : Signal(0.0) {}
  explicit Signal(double constant);
  Signal(std::vector<Breakpoint> breakpoints,
         Interpolation interpolation = Interpolation::kPiecewiseConstant);

  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  Interpolation interpolation() const { return interpolation_; }
  // Right end of the sampling domain [0, horizon]; kInfinity until attached
  // to a scenario.
  double horizon() const { return horizon_; }
  Signal WithHorizon(double horizon) const;

  // Value just before t (differs from Sample only at jumps).
  double LeftLimit(double t) const;
  double Max() const;

 private:
  friend double Sample(const Signal& signal, double t);
  double Evaluate(double t) const;

  std::vector<Breakpoint> breakpoints_;
  Interpolation interpolation_ = Interpolation::kPiecewiseConstant;
  double horizon_ = kInfinity;
};

// Throws std::out_of_range for t outside [0, horizon]. The final value holds
// after the last breakpoint.
double Sample(const Signal& signal, double t);

struct Scenario {
  VehicleParams vehicle;
  EngineModel engine;
  double horizon = 0.0;  // T, s
  double x_init = 0.0;
  double x_end = 0.0;
  double v_init = 0.0;
  double E_init = 0.0;
  double E_min = 0.0;
  double E_max = 0.0;
  Signal v_min;
  Signal v_max;
  Signal a_max;
  std::optional<Signal> solar;    // W into the internal energy
  std::optional<Signal> terrain;  // W into the kinetic energy

  // Copy with horizon T and every signal's domain set to [0, T].
  Scenario WithHorizon(double T) const;

  double SolarAt(double t) const { return solar ? Sample(*solar, t) : 0.0; }
  double TerrainAt(double t) const {
    return terrain ? Sample(*terrain, t) : 0.0;
  }
};

// Returns the scenario with signal domains bound to its horizon, or throws
// ScenarioError naming the first violated invariant.
Scenario Validate(Scenario scenario);

double DragPower(const VehicleParams& params, double v);
double RollingPower(const VehicleParams& params, double v);

// Drag and rolling losses written in the kinetic energy K = 1/2 m v^2.
double DragPowerFromKinetic(const VehicleParams& params, double K);
double RollingPowerFromKinetic(const VehicleParams& params, double K);

// g(K) = drag + rolling loss as a function of K, with its first two
// derivatives. Convex on K >= 0.
struct LossDerivatives {
  double value;
  double first;
  double second;
};
LossDerivatives ResistiveLoss(const VehicleParams& params, double K);

}  // namespace ecoplan

#endif  // ECOPLAN_MODEL_H_
