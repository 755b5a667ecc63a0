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

#ifndef NONHOLO__PATHFRAME_HPP_
#define NONHOLO__PATHFRAME_HPP_

#include "nonholo/models.hpp"
#include "nonholo/path.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace nonholo
{

enum class TrackPoint { RearAxle, CenterOfMass };

/// Path-frame state. Slots 0..2 hold (s, e, θ) of the tracked point; the
/// remaining slots follow layout_of(variant) exactly as in AbsState.
struct RelState
{
  ModelVariant variant = ModelVariant::SkateKinematic;
  TrackPoint point = TrackPoint::RearAxle;
  StateVec q;
  double V = 0.0;

  static constexpr int s = 0;
  static constexpr int e = 1;
  static constexpr int theta = 2;
};

inline bool supports_path_frame(ModelVariant v)
{
  return v != ModelVariant::SkateForceAltPseudo && v != ModelVariant::SkateForceLagrange;
}

/// Rates of (s, e, θ) for a tracked point moving with speed v and steering γ.
inline FrameRates tracked_point_rates(
  TrackPoint point, double v, double gamma, double kappa, double e, double theta,
  const VehicleParams & p)
{
  const double g = 1.0 - kappa * e;
  if (!(g > 1e-9)) throw TubeSingularity("path frame: 1 - kappa * e left the tube");
  const double tg = std::tan(gamma);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  double along = ct;
  double across = st;
  if (point == TrackPoint::CenterOfMass) {
    along = ct - p.d / p.l * tg * st;
    across = st + p.d / p.l * tg * ct;
  }
  const double s_dot = v * along / g;
  return {s_dot, v * across, v / p.l * tg - kappa * s_dot};
}

/// Derivative of a path-frame state; κ is the table curvature at s.
inline StateVec pathframe_rhs(
  const RelState & state, const DriveInput & u, const PathTable & path, const VehicleParams & p,
  const Resistance * env = nullptr)
{
  if (!supports_path_frame(state.variant)) {
    throw Error(
      "path-frame form is not provided for " + std::string(variant_name(state.variant)));
  }
  const StateLayout lay = layout_of(state.variant);
  if (state.q.size() != lay.dim) throw Error("path-frame state has the wrong dimension");

  AbsState dyn;
  dyn.variant = state.variant;
  dyn.q = state.q;
  dyn.q[0] = 0.0;
  dyn.q[1] = 0.0;
  dyn.q[2] = 0.0;
  dyn.V = state.V;
  StateVec dq = eom_rhs(dyn, u, p, env);

  const double gamma = steering_angle(dyn, u);
  const double v = lay.constrained_speed ? state.V : state.q[lay.sigma1];
  const double kappa = path.curvature(state.q[RelState::s]);
  const FrameRates r = tracked_point_rates(
    state.point, v, gamma, kappa, state.q[RelState::e], state.q[RelState::theta], p);
  dq[0] = r.s_dot;
  dq[1] = r.e_dot;
  dq[2] = r.theta_dot;
  return dq;
}

/// Earth-frame position of the tracked point.
inline std::pair<double, double> tracked_position(
  TrackPoint point, double x_G, double y_G, double psi, const VehicleParams & p)
{
  if (point == TrackPoint::CenterOfMass) return {x_G, y_G};
  return {x_G - p.d * std::cos(psi), y_G - p.d * std::sin(psi)};
}

/// Converts an absolute state to path coordinates of the tracked point.
inline RelState to_path_frame(
  const AbsState & a, TrackPoint point, const PathTable & path, const VehicleParams & p,
  std::optional<double> hint = std::nullopt)
{
  const double psi = a.q[StateLayout::psi];
  const auto [px, py] = tracked_position(point, a.q[0], a.q[1], psi, p);
  const PathQuery pq = project(px, py, psi, path, hint);
  RelState r;
  r.variant = a.variant;
  r.point = point;
  r.q = a.q;
  r.q[RelState::s] = pq.s_C;
  r.q[RelState::e] = pq.e_C;
  r.q[RelState::theta] = pq.theta_C;
  r.V = a.V;
  return r;
}

/// Inverse of to_path_frame.
inline AbsState to_absolute(const RelState & r, const PathTable & path, const VehicleParams & p)
{
  const Pose2 pose = from_path_coordinates(
    path, r.q[RelState::s], r.q[RelState::e], r.q[RelState::theta]);
  AbsState a;
  a.variant = r.variant;
  a.q = r.q;
  a.q[StateLayout::psi] = pose.psi;
  if (r.point == TrackPoint::CenterOfMass) {
    a.q[0] = pose.x;
    a.q[1] = pose.y;
  } else {
    a.q[0] = pose.x + p.d * std::cos(pose.psi);
    a.q[1] = pose.y + p.d * std::sin(pose.psi);
  }
  a.V = r.V;
  return a;
}

}  // namespace nonholo

#endif  // NONHOLO__PATHFRAME_HPP_
