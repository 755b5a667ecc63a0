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

#ifndef NONHOLO__ANGLES_HPP_
#define NONHOLO__ANGLES_HPP_

#include <cmath>
#include <numbers>

namespace nonholo
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle difference by subtracting the nearest multiple of 2π.
/// std::round breaks ties away from zero, so +π maps to −π.
inline double wrap_angle(double angle)
{
  return angle - kTwoPi * std::round(angle / kTwoPi);
}

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace nonholo

#endif  // NONHOLO__ANGLES_HPP_
