// Copyright 2026 The nonholo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NONHOLO__PARAMS_HPP_
#define NONHOLO__PARAMS_HPP_

#include "nonholo/angles.hpp"
#include "nonholo/errors.hpp"

#include <cmath>
#include <string>

namespace nonholo
{

inline constexpr double kGravity = 9.81;

/// Geometry and inertia of the single-track vehicle.
///
/// m_R and m_F are effective masses: for the wheel variants they already
/// include the spin inertia contribution I/r². The Ritz-like mass
/// combinations m1..m4 are computed on demand.
struct VehicleParams
{
  double l = 2.57;
  double d = 1.54;
  double m = 1770.0;
  double m_R = 10.0;
  double m_F = 10.0;
  double J_G = 1343.0;
  double J_R = 0.25;
  double J_F = 0.25;
  double I_R = 0.5;
  double I_F = 0.5;
  double r = 0.33;
  double gamma_max = deg2rad(30.0);

  bool operator==(const VehicleParams &) const = default;

  double m1() const { return m + m_R + m_F; }
  double m2() const { return (J_G + m * d * d + J_R + J_F + m_F * l * l) / (l * l); }
  double m3() const { return m_R - (l - d) / d * m_F; }
  double m4() const { return m_F + d / l * m; }

  /// Raw wheel masses, i.e. effective mass minus the spin-inertia share.
  double raw_m_R() const { return m_R - I_R / (r * r); }
  double raw_m_F() const { return m_F - I_F / (r * r); }

  void validate() const
  {
    const auto positive = [](double v, const char * name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("vehicle parameter '") + name + "' must be positive");
      }
    };
    positive(l, "l");
    positive(d, "d");
    positive(m, "m");
    positive(m_R, "m_R");
    positive(m_F, "m_F");
    positive(J_G, "J_G");
    positive(J_R, "J_R");
    positive(J_F, "J_F");
    positive(I_R, "I_R");
    positive(I_F, "I_F");
    positive(r, "r");
    positive(gamma_max, "gamma_max");
    if (!(d < l)) throw ConfigError("vehicle parameter 'd' must be smaller than 'l'");
    if (!(gamma_max < kPi / 2.0)) {
      throw ConfigError("vehicle parameter 'gamma_max' must be below pi/2");
    }
  }
};

}  // namespace nonholo

#endif  // NONHOLO__PARAMS_HPP_
