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

#ifndef NONHOLO__MODELS_HPP_
#define NONHOLO__MODELS_HPP_

#include "nonholo/angles.hpp"
#include "nonholo/errors.hpp"
#include "nonholo/params.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>

namespace nonholo
{

/// Fixed-capacity state vector; the largest model has eight states.
using StateVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

enum class ModelVariant {
  SkateKinematic,
  SkateForce,
  SkateTorqueSteer,
  SkateForceTorqueSteer,
  WheelKinematic,
  WheelTorque,
  WheelTorqueSteer,
  WheelTorqueTorqueSteer,
  SkateForceAltPseudo,
  SkateForceLagrange,
};

inline constexpr std::array<ModelVariant, 10> kAllVariants = {
  ModelVariant::SkateKinematic,         ModelVariant::SkateForce,
  ModelVariant::SkateTorqueSteer,       ModelVariant::SkateForceTorqueSteer,
  ModelVariant::WheelKinematic,         ModelVariant::WheelTorque,
  ModelVariant::WheelTorqueSteer,       ModelVariant::WheelTorqueTorqueSteer,
  ModelVariant::SkateForceAltPseudo,    ModelVariant::SkateForceLagrange,
};

inline std::string_view variant_name(ModelVariant v)
{
  switch (v) {
    case ModelVariant::SkateKinematic: return "skate_kinematic";
    case ModelVariant::SkateForce: return "skate_force";
    case ModelVariant::SkateTorqueSteer: return "skate_torque_steer";
    case ModelVariant::SkateForceTorqueSteer: return "skate_force_torque_steer";
    case ModelVariant::WheelKinematic: return "wheel_kinematic";
    case ModelVariant::WheelTorque: return "wheel_torque";
    case ModelVariant::WheelTorqueSteer: return "wheel_torque_steer";
    case ModelVariant::WheelTorqueTorqueSteer: return "wheel_torque_torque_steer";
    case ModelVariant::SkateForceAltPseudo: return "skate_force_alt_pseudo";
    case ModelVariant::SkateForceLagrange: return "skate_force_lagrange";
  }
  return "unknown";
}

inline ModelVariant parse_variant(std::string_view name)
{
  for (auto v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

/// Positions of the named states inside a variant's state vector; -1 marks
/// a state the variant does not carry.
///
/// The slot called sigma1 holds the variant's longitudinal pseudo velocity:
/// σ1 for the Appellian models, σ̂ = σ1 / cos γ for the alternative choice
/// and σ̄ = ψ̇ for the Lagrangian form.
struct StateLayout
{
  int dim;
  int gamma = -1;
  int sigma1 = -1;
  int sigma2 = -1;
  int phi_R = -1;
  int phi_F = -1;
  bool constrained_speed = false;
  bool wheels = false;
  bool torque_steer = false;

  static constexpr int x = 0;
  static constexpr int y = 1;
  static constexpr int psi = 2;
};

inline StateLayout layout_of(ModelVariant v)
{
  StateLayout s{3};
  switch (v) {
    case ModelVariant::SkateKinematic:
      s.constrained_speed = true;
      break;
    case ModelVariant::SkateForce:
    case ModelVariant::SkateForceAltPseudo:
    case ModelVariant::SkateForceLagrange:
      s.dim = 4;
      s.sigma1 = 3;
      break;
    case ModelVariant::SkateTorqueSteer:
      s.dim = 5;
      s.gamma = 3;
      s.sigma2 = 4;
      s.constrained_speed = true;
      s.torque_steer = true;
      break;
    case ModelVariant::SkateForceTorqueSteer:
      s.dim = 6;
      s.gamma = 3;
      s.sigma1 = 4;
      s.sigma2 = 5;
      s.torque_steer = true;
      break;
    case ModelVariant::WheelKinematic:
      s.dim = 5;
      s.phi_R = 3;
      s.phi_F = 4;
      s.constrained_speed = true;
      s.wheels = true;
      break;
    case ModelVariant::WheelTorque:
      s.dim = 6;
      s.sigma1 = 3;
      s.phi_R = 4;
      s.phi_F = 5;
      s.wheels = true;
      break;
    case ModelVariant::WheelTorqueSteer:
      s.dim = 7;
      s.gamma = 3;
      s.sigma2 = 4;
      s.phi_R = 5;
      s.phi_F = 6;
      s.constrained_speed = true;
      s.wheels = true;
      s.torque_steer = true;
      break;
    case ModelVariant::WheelTorqueTorqueSteer:
      s.dim = 8;
      s.gamma = 3;
      s.sigma1 = 4;
      s.sigma2 = 5;
      s.phi_R = 6;
      s.phi_F = 7;
      s.wheels = true;
      s.torque_steer = true;
      break;
  }
  return s;
}

/// Absolute-frame state: the vector laid out per layout_of(variant), plus
/// the prescribed speed for constrained-speed variants.
struct AbsState
{
  ModelVariant variant = ModelVariant::SkateKinematic;
  StateVec q;
  double V = 0.0;

  static AbsState zero(ModelVariant v, double speed = 0.0)
  {
    AbsState s;
    s.variant = v;
    s.q = StateVec::Zero(layout_of(v).dim);
    s.V = speed;
    return s;
  }
};

/// Inputs of every model. Fields a variant does not use must stay zero.
struct DriveInput
{
  double gamma = 0.0;
  double gamma_dot = 0.0;
  double gamma_ddot = 0.0;
  double F_R = 0.0;
  double F_F = 0.0;
  double T_R = 0.0;
  double T_F = 0.0;
  double T_s = 0.0;
};

/// Environment terms entering the pseudo force of the force-driven models.
struct Resistance
{
  double zeta = 0.0;
  double rho = 0.0;
  double g = kGravity;
  double theta = 0.0;
  double v_w = 0.0;
};

namespace detail
{

inline constexpr double kGuard = 1e-9;

inline void check_steer(double gamma)
{
  if (!(std::abs(gamma) < kPi / 2.0 - kGuard)) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "steering angle %.6g rad at the pi/2 singularity", gamma);
    throw SteeringSingularity(buf);
  }
}

inline void reject(bool used, double value, const char * field, ModelVariant v)
{
  if (!used && value != 0.0) {
    throw UnusedInput(
      std::string("input '") + field + "' is not used by " + std::string(variant_name(v)));
  }
}

}  // namespace detail

/// Throws UnusedInput if a field irrelevant to the variant is non-zero.
inline void check_inputs(ModelVariant v, const DriveInput & u)
{
  const StateLayout lay = layout_of(v);
  const bool assigned = !lay.torque_steer;
  const bool force_skate = v == ModelVariant::SkateForce || v == ModelVariant::SkateForceTorqueSteer ||
                           v == ModelVariant::SkateForceAltPseudo ||
                           v == ModelVariant::SkateForceLagrange;
  const bool torque_wheel = v == ModelVariant::WheelTorque || v == ModelVariant::WheelTorqueTorqueSteer;
  const bool needs_rates = assigned && !lay.constrained_speed;
  detail::reject(assigned, u.gamma, "gamma", v);
  detail::reject(needs_rates, u.gamma_dot, "gamma_dot", v);
  detail::reject(needs_rates, u.gamma_ddot, "gamma_ddot", v);
  detail::reject(force_skate, u.F_R, "F_R", v);
  detail::reject(force_skate, u.F_F, "F_F", v);
  detail::reject(torque_wheel, u.T_R, "T_R", v);
  detail::reject(torque_wheel, u.T_F, "T_F", v);
  detail::reject(lay.torque_steer, u.T_s, "T_s", v);
}

/// Steering angle of a state: from the state for torque-steer variants,
/// from the input otherwise.
inline double steering_angle(const AbsState & s, const DriveInput & u)
{
  const StateLayout lay = layout_of(s.variant);
  return lay.gamma >= 0 ? s.q[lay.gamma] : u.gamma;
}

/// Longitudinal speed σ1 of any variant.
inline double longitudinal_speed(const AbsState & s, const DriveInput & u, const VehicleParams & p)
{
  const StateLayout lay = layout_of(s.variant);
  if (lay.constrained_speed) return s.V;
  const double pv = s.q[lay.sigma1];
  if (s.variant == ModelVariant::SkateForceAltPseudo) return pv * std::cos(u.gamma);
  if (s.variant == ModelVariant::SkateForceLagrange) return pv * p.l / std::tan(u.gamma);
  return pv;
}

inline double resistance_pseudo_force(
  double F_R, double F_F, double gamma, double sigma1, const Resistance & env,
  const VehicleParams & p)
{
  const double m1 = p.m1();
  const double wind = env.v_w + sigma1;
  return F_R + F_F / std::cos(gamma) - env.zeta * m1 * env.g * std::cos(env.theta) -
         m1 * env.g * std::sin(env.theta) - env.rho * wind * wind;
}

/// State derivative of the closed-form equations of motion.
///
/// For assigned-steering variants γ, γ̇ and γ̈ come from the input; they
/// must be mutually consistent for the result to be meaningful. When env is
/// given the longitudinal pseudo force includes rolling, grade and drag
/// resistance.
inline StateVec eom_rhs(
  const AbsState & state, const DriveInput & u, const VehicleParams & p,
  const Resistance * env = nullptr)
{
  const ModelVariant v = state.variant;
  const StateLayout lay = layout_of(v);
  const StateVec & q = state.q;
  if (q.size() != lay.dim) {
    throw Error(
      "state of " + std::string(variant_name(v)) + " must have " + std::to_string(lay.dim) +
      " entries");
  }
  check_inputs(v, u);
  if (lay.constrained_speed && !(state.V > 0.0)) {
    throw Error("constrained-speed variants need V > 0");
  }

  const double gamma = steering_angle(state, u);
  const double psi = q[StateLayout::psi];
  const double l = p.l;
  const double cp = std::cos(psi);
  const double sp = std::sin(psi);
  const double m1 = p.m1();
  const double m2 = p.m2();

  StateVec dq = StateVec::Zero(lay.dim);

  if (v == ModelVariant::SkateForceAltPseudo) {
    // No tan γ here: valid through γ = 0 and up to |γ| = π/2.
    const double sh = q[3];
    const double cg = std::cos(gamma);
    const double sg = std::sin(gamma);
    dq[0] = sh * (cp * cg - p.d / l * sp * sg);
    dq[1] = sh * (sp * cg + p.d / l * cp * sg);
    dq[2] = sh * sg / l;
    const double front = env ? resistance_pseudo_force(u.F_R, u.F_F, gamma, sh * cg, *env, p) * cg
                             : u.F_R * cg + u.F_F;
    dq[3] = (front + (m1 - m2) * sh * u.gamma_dot * sg * cg - p.J_F / l * u.gamma_ddot * sg) /
            (m1 * cg * cg + m2 * sg * sg);
    return dq;
  }

  detail::check_steer(gamma);
  const double tg = std::tan(gamma);
  const double cg = std::cos(gamma);
  const double c2 = cg * cg;

  if (v == ModelVariant::SkateForceLagrange) {
    if (!(std::abs(gamma) > detail::kGuard)) {
      throw LagrangeSingularity("Lagrangian form is singular at gamma = 0");
    }
    const double sb = q[3];
    const double sg = std::sin(gamma);
    const double sigma1 = sb * l / tg;
    const double Pi = env ? resistance_pseudo_force(u.F_R, u.F_F, gamma, sigma1, *env, p)
                          : u.F_R + u.F_F / cg;
    dq[0] = (l * cp / tg - p.d * sp) * sb;
    dq[1] = (l * sp / tg + p.d * cp) * sb;
    dq[2] = sb;
    dq[3] = (Pi * tg / l + m1 * u.gamma_dot * sb / (sg * cg) -
             p.J_F / (l * l) * u.gamma_ddot * tg * tg) /
            (m1 + m2 * tg * tg);
    return dq;
  }

  const double sigma1 = lay.constrained_speed ? state.V : q[lay.sigma1];
  dq[0] = sigma1 * (cp - p.d / l * sp * tg);
  dq[1] = sigma1 * (sp + p.d / l * cp * tg);
  dq[2] = sigma1 / l * tg;

  if (lay.wheels) {
    dq[lay.phi_R] = sigma1 / p.r;
    dq[lay.phi_F] = sigma1 / (p.r * cg);
  }

  if (lay.constrained_speed) {
    if (lay.torque_steer) {
      const double s2 = q[lay.sigma2];
      dq[lay.gamma] = s2;
      dq[lay.sigma2] = u.T_s / p.J_F - state.V * s2 / (l * c2);
    }
    return dq;
  }

  double drive = lay.wheels ? (u.T_R + u.T_F / cg) / p.r : u.F_R + u.F_F / cg;
  if (env) {
    const double F_R = lay.wheels ? u.T_R / p.r : u.F_R;
    const double F_F = lay.wheels ? u.T_F / p.r : u.F_F;
    drive = resistance_pseudo_force(F_R, F_F, gamma, sigma1, *env, p);
  }

  if (!lay.torque_steer) {
    dq[lay.sigma1] = (drive - m2 * tg / c2 * sigma1 * u.gamma_dot - p.J_F / l * u.gamma_ddot * tg) /
                     (m1 + m2 * tg * tg);
    return dq;
  }

  const double s2 = q[lay.sigma2];
  const double mj = m2 - p.J_F / (l * l);
  const double den = m1 + mj * tg * tg;
  dq[lay.gamma] = s2;
  dq[lay.sigma1] = (drive - mj * tg / c2 * sigma1 * s2 - u.T_s / l * tg) / den;
  dq[lay.sigma2] = (-drive * tg / l - m1 / (l * c2) * sigma1 * s2 +
                    u.T_s / p.J_F * (m1 + m2 * tg * tg)) /
                   den;
  return dq;
}

/// Left-hand sides of the kinematic constraints that apply to the variant:
/// the two lateral no-slip conditions, the rolling conditions for wheel
/// variants and the prescribed speed for constrained-speed variants.
inline StateVec constraint_residuals(
  const AbsState & state, const StateVec & dq, const DriveInput & u, const VehicleParams & p)
{
  const StateLayout lay = layout_of(state.variant);
  const double gamma = steering_angle(state, u);
  const double psi = state.q[StateLayout::psi];
  const double xd = dq[0];
  const double yd = dq[1];
  const double pd = dq[2];
  const double a = psi + gamma;
  const int count = 2 + (lay.wheels ? 2 : 0) + (lay.constrained_speed ? 1 : 0);
  StateVec r(count);
  int k = 0;
  r[k++] = xd * std::sin(psi) - yd * std::cos(psi) + p.d * pd;
  r[k++] = xd * std::sin(a) - yd * std::cos(a) - (p.l - p.d) * pd * std::cos(gamma);
  if (lay.wheels) {
    r[k++] = xd * std::cos(psi) + yd * std::sin(psi) - p.r * dq[lay.phi_R];
    r[k++] = xd * std::cos(a) + yd * std::sin(a) + (p.l - p.d) * pd * std::sin(gamma) -
             p.r * dq[lay.phi_F];
  }
  if (lay.constrained_speed) {
    r[k++] = xd * std::cos(psi) + yd * std::sin(psi) - state.V;
  }
  return r;
}

struct ConstraintForces
{
  double F_tilde_R = 0.0;
  double F_tilde_F = 0.0;
  double mu_R = 0.0;
  double mu_F = 0.0;
  double lambda1() const { return -F_tilde_R; }
  double lambda2() const { return -F_tilde_F; }
};

/// Lateral forces at the skates of the force-driven assigned-steering model
/// together with their force-to-weight ratios.
inline ConstraintForces constraining_forces(
  double gamma, double sigma1, double F_R, double F_F, double gamma_dot, double gamma_ddot,
  const VehicleParams & p, double g = kGravity)
{
  detail::check_steer(gamma);
  const double l = p.l;
  const double m1 = p.m1();
  const double m2 = p.m2();
  const double m4 = p.m4();
  const double tg = std::tan(gamma);
  const double cg = std::cos(gamma);
  const double c2 = cg * cg;
  const double D = m1 + m2 * tg * tg;
  const double Pi = F_R + F_F / cg;

  ConstraintForces f;
  f.F_tilde_R = -(m2 - m4) * tg / D * Pi + (m1 - m4) * sigma1 * sigma1 / l * tg +
                m4 * sigma1 * gamma_dot / c2 -
                (m1 + m4 * tg * tg) / D * (m2 * sigma1 * gamma_dot / c2 + p.J_F / l * gamma_ddot);
  f.F_tilde_F = (m2 * F_R * tg / cg + (m2 - m1) * F_F * tg + m1 * m2 * sigma1 * gamma_dot / (c2 * cg) +
                 m1 * p.J_F / l * gamma_ddot / cg) /
                  D +
                m4 * sigma1 * sigma1 * tg / (l * cg);
  f.mu_R = f.F_tilde_R * l / (m1 * g * (l - p.d));
  f.mu_F = f.F_tilde_F * l / (m1 * g * p.d);
  return f;
}

/// Splits a resultant driving force between the axles; β = 1 is rear drive.
inline std::pair<double, double> drivetrain_split(double F_res, double beta)
{
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw BadSplit("drivetrain split ratio must lie in [0, 1]");
  }
  return {beta * F_res, (1.0 - beta) * F_res};
}

/// Lateral acceleration of the rear axle centre, speed² tan γ / l.
inline double lateral_acceleration(double speed, double gamma, double l)
{
  return speed * speed * std::tan(gamma) / l;
}

enum class PseudoVelocityChoice { sigma1, psidot, xGdot, yGdot, frontwheel };

/// Determinant of the linear map from the pseudo velocity to the velocity
/// vector; it vanishes where that pseudo velocity cannot describe the motion.
inline double pseudo_velocity_determinant(
  PseudoVelocityChoice choice, double psi, double gamma, const VehicleParams & p)
{
  switch (choice) {
    case PseudoVelocityChoice::sigma1:
      return p.l * std::cos(gamma);
    case PseudoVelocityChoice::psidot:
      return std::sin(gamma);
    case PseudoVelocityChoice::xGdot:
      return p.l * std::cos(psi) * std::cos(gamma) - p.d * std::sin(psi) * std::sin(gamma);
    case PseudoVelocityChoice::yGdot:
      return p.l * std::sin(psi) * std::cos(gamma) + p.d * std::cos(psi) * std::sin(gamma);
    case PseudoVelocityChoice::frontwheel:
      return p.l;
  }
  return 0.0;
}

/// Position and velocity of the rear axle centre R from the state of G.
struct RearAxle
{
  double x;
  double y;
  double x_dot;
  double y_dot;
};

inline RearAxle rear_axle(const AbsState & s, const StateVec & dq, const VehicleParams & p)
{
  const double psi = s.q[StateLayout::psi];
  const double c = std::cos(psi);
  const double sn = std::sin(psi);
  return {
    s.q[0] - p.d * c, s.q[1] - p.d * sn, dq[0] + p.d * sn * dq[2], dq[1] - p.d * c * dq[2]};
}

}  // namespace nonholo

#endif  // NONHOLO__MODELS_HPP_
