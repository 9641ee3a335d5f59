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

// Scenarios shared by the tests, built in code from the published example
// parameters so they do not depend on the file loader.

#ifndef ECOPLAN_TESTS_SUPPORT_H_
#define ECOPLAN_TESTS_SUPPORT_H_

#include <string>

#include "ecoplan/io.h"
#include "ecoplan/model.h"

namespace ecoplan::testing {

inline constexpr double kKmh = 1.0 / 3.6;

// m = 1500 kg, rho = 1.22 kg/m^3, A = 2.3 m^2, C_D = 0.35,
// C_rr = 0.005 kN/(m/s).
inline VehicleParams ExampleVehicle() { return {1500.0, 1.22, 2.3, 0.35, 5.0}; }

// 0.005 p^2 + p + 5 in kW on [0, inf).
inline EngineModel ExampleEngine() {
  return EngineModel::Quadratic(0.005e-3, 1.0, 5000.0, 0.0);
}

// Example bounds (4000 kJ battery, 5 km route, start from rest) with the
// surrogate speed-limit profile.
inline Scenario Paperlike(double T = 280.0) {
  Scenario sc;
  sc.vehicle = ExampleVehicle();
  sc.engine = ExampleEngine();
  sc.horizon = T;
  sc.x_init = 0.0;
  sc.x_end = 5000.0;
  sc.v_init = 0.0;
  sc.E_init = 4.0e6;
  sc.E_min = 0.0;
  sc.E_max = 4.0e6;
  sc.v_min = Signal({{0.0, 0.0}, {150.0, 30.0 * kKmh}, {200.0, 0.0}});
  sc.v_max = Signal({{0.0, 110.0 * kKmh}, {50.0, 60.0 * kKmh},
                     {100.0, 110.0 * kKmh}});
  sc.a_max = Signal(1.0);
  return Validate(sc);
}

// Speed held at 20 m/s for 10 s.
inline Scenario Pinned() {
  Scenario sc = Paperlike(10.0);
  sc.x_end = 190.0;
  sc.v_init = 20.0;
  sc.v_min = Signal(20.0);
  sc.v_max = Signal(20.0);
  return Validate(sc);
}

inline std::string ScenarioPath(const std::string& name) {
  return std::string(ECOPLAN_SCENARIO_DIR) + "/" + name + ".json";
}

inline Scenario Bundled(const std::string& name) {
  return LoadScenario(ScenarioPath(name));
}

}  // namespace ecoplan::testing

#endif  // ECOPLAN_TESTS_SUPPORT_H_
