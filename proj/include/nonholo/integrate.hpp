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

#ifndef NONHOLO__INTEGRATE_HPP_
#define NONHOLO__INTEGRATE_HPP_

#include "nonholo/errors.hpp"

#include <cmath>
#include <cstddef>

namespace nonholo
{

/// One classical Runge-Kutta step of x' = f(t, x).
template <typename Vec, typename Rhs>
Vec rk4_step(const Rhs & f, double t, const Vec & x, double dt)
{
  const Vec k1 = f(t, x);
  const Vec k2 = f(t + 0.5 * dt, Vec(x + 0.5 * dt * k1));
  const Vec k3 = f(t + 0.5 * dt, Vec(x + 0.5 * dt * k2));
  const Vec k4 = f(t + dt, Vec(x + dt * k3));
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of fixed steps covering duration; the last step lands on it.
inline std::size_t step_count(double duration, double dt)
{
  if (!(dt > 0.0)) throw Error("time step must be positive");
  if (!(duration >= dt)) throw Error("duration must be at least one time step");
  return static_cast<std::size_t>(std::llround(std::ceil(duration / dt - 1e-9)));
}

/// Fixed-step RK4 from t = 0.
///
/// before_step(k, t, x) runs ahead of every step and once more on the final
/// state with k == steps; it is the hook for holding inputs and logging.
template <typename Vec, typename Rhs, typename Hook>
Vec integrate(const Rhs & f, Vec x, double dt, double duration, Hook && before_step)
{
  const std::size_t steps = step_count(duration, dt);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    before_step(k, t, static_cast<const Vec &>(x));
    x = rk4_step(f, t, x, dt);
  }
  before_step(steps, static_cast<double>(steps) * dt, static_cast<const Vec &>(x));
  return x;
}

}  // namespace nonholo

#endif  // NONHOLO__INTEGRATE_HPP_
