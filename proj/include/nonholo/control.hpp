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

#ifndef NONHOLO__CONTROL_HPP_
#define NONHOLO__CONTROL_HPP_

#include "nonholo/angles.hpp"
#include "nonholo/errors.hpp"
#include "nonholo/params.hpp"
#include "nonholo/path.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace nonholo
{

/// Wrapper index; kInfiniteOrder selects the hard clamp.
inline constexpr int kInfiniteOrder = 0;

struct WrapperSpec
{
  int n = 2;
  double g_sat = 1.0;

  bool infinite() const { return n == kInfiniteOrder; }

  void validate() const
  {
    if (!infinite() && n < 2) throw Error("wrapper order must be >= 2 or infinite");
    if (!(g_sat > 0.0)) throw Error("wrapper bound g_sat must be positive");
  }

  /// Scale c such that ∫₀^∞ (1 + (c x)²)^(−n/2) dx = g_sat.
  double scale() const
  {
    if (n == 2) return kPi / (2.0 * g_sat);
    if (n == 3) return 1.0 / g_sat;
    const double half_integral = 0.5 * std::sqrt(kPi) *
                                 std::exp(std::lgamma(0.5 * (n - 1)) - std::lgamma(0.5 * n));
    return half_integral / g_sat;
  }
};

/// g_n(x): odd, increasing, slope one at the origin and bounded by g_sat.
inline double wrapper(const WrapperSpec & spec, double x)
{
  spec.validate();
  if (spec.infinite()) return std::clamp(x, -spec.g_sat, spec.g_sat);
  const double c = spec.scale();
  const double q = 1.0 + (c * x) * (c * x);
  // Closed forms for the two lowest orders, then the reduction formula
  // g_k = (k−3)/(k−2) g_{k−2} + x / ((k−2) q^(k/2−1)) with the same c.
  double g = spec.n % 2 == 0 ? std::atan(c * x) / c : x / std::sqrt(q);
  for (int k = spec.n % 2 == 0 ? 4 : 5; k <= spec.n; k += 2) {
    g = (k - 3.0) / (k - 2.0) * g + x / ((k - 2.0) * std::pow(q, 0.5 * k - 1.0));
  }
  return g;
}

inline double wrapper_deriv(const WrapperSpec & spec, double x)
{
  spec.validate();
  if (spec.infinite()) return std::abs(x) < spec.g_sat ? 1.0 : 0.0;
  const double c = spec.scale();
  return std::pow(1.0 + (c * x) * (c * x), -0.5 * spec.n);
}

inline double wrapper_deriv2(const WrapperSpec & spec, double x)
{
  spec.validate();
  if (spec.infinite()) return 0.0;
  const double c = spec.scale();
  const double q = 1.0 + (c * x) * (c * x);
  return -spec.n * c * c * x * std::pow(q, -0.5 * spec.n - 1.0);
}

enum class SteerLaw { linear, nonlinear, wrapped };

inline const char * law_name(SteerLaw law)
{
  switch (law) {
    case SteerLaw::linear: return "linear";
    case SteerLaw::nonlinear: return "nonlinear";
    case SteerLaw::wrapped: return "wrapped";
  }
  return "wrapped";
}

inline SteerLaw parse_law(const std::string & name)
{
  if (name == "linear") return SteerLaw::linear;
  if (name == "nonlinear") return SteerLaw::nonlinear;
  if (name == "wrapped") return SteerLaw::wrapped;
  throw ConfigError("unknown steering law '" + name + "'");
}

struct ControlGains
{
  double k1 = -0.5;
  double k2 = 0.02;
  double k_s = -6.0;
  double T_sat = 1.0;
  double k_a = -5.0;
  double a_lat_max = 4.0;
  double a_long_max = 6.0;
  double v_max = 30.0;
  double t_L = 0.0;
  double preview_dist = 50.0;
  int wrapper_n = 2;
  SteerLaw law = SteerLaw::wrapped;

  bool operator==(const ControlGains &) const = default;
};

struct SteerCommand
{
  double gamma_des = 0.0;
  double gamma_ff = 0.0;
  double gamma_fb = 0.0;
  double gamma_dot = 0.0;
  double gamma_ddot = 0.0;
};

inline double feedforward_steer(double kappa_ref, double l) { return std::atan(kappa_ref * l); }

/// Argument of the outer wrapper, γ¹_fb.
inline double feedback_argument(double e, double theta, const ControlGains & g)
{
  if (g.law == SteerLaw::linear) return g.k1 * theta + g.k1 * g.k2 * e;
  return g.k1 * (theta + std::atan(g.k2 * e));
}

inline double feedback_steer(double e, double theta, const ControlGains & g, double gamma_sat)
{
  const double x = feedback_argument(e, theta, g);
  if (g.law != SteerLaw::wrapped) return x;
  return wrapper({g.wrapper_n, gamma_sat}, x);
}

/// Desired relative yaw of the nonlinear law: the θ at which its feedback
/// vanishes. Not defined for the other laws.
inline std::optional<double> desired_heading(double e, const ControlGains & g)
{
  if (g.law != SteerLaw::nonlinear) return std::nullopt;
  return -std::atan(g.k2 * e);
}

inline double steering_saturation(
  double speed, const ControlGains & g, double l, double gamma_max)
{
  if (speed <= 0.0) return gamma_max;
  return std::min(gamma_max, std::atan(g.a_lat_max * l / (speed * speed)));
}

inline double steering_torque(double gamma, double gamma_des, const ControlGains & g)
{
  return wrapper({2, g.T_sat}, g.k_s * (gamma - gamma_des));
}

inline double target_speed(double kappa_m, const ControlGains & g)
{
  if (kappa_m <= 0.0) return g.v_max;
  return std::min(g.v_max, std::sqrt(g.a_lat_max / kappa_m));
}

inline double longitudinal_accel(double sigma1, double v_des, const ControlGains & g)
{
  return wrapper({2, g.a_long_max}, g.k_a * (sigma1 - v_des));
}

struct DrivingForce
{
  double F_R;
  double iota;
  double a1;
  double a2;
};

/// Rear driving force that makes the assigned-steering force model obey
/// σ̇1 = a_des exactly.
inline DrivingForce driving_force(
  double a_des, double gamma, double gamma_dot, double gamma_ddot, double sigma1,
  const VehicleParams & p)
{
  if (!(std::abs(gamma) < kPi / 2.0 - 1e-9)) {
    throw SteeringSingularity("driving force: steering angle at the pi/2 singularity");
  }
  const double m1 = p.m1();
  const double m2 = p.m2();
  const double tg = std::tan(gamma);
  const double cg = std::cos(gamma);
  DrivingForce f;
  f.iota = m2 / m1 * tg * tg;
  f.a1 = m2 / m1 * std::sin(gamma) / (cg * cg * cg) * gamma_dot * sigma1;
  f.a2 = p.J_F / (m1 * p.l) * gamma_ddot * tg;
  f.F_R = m1 * ((1.0 + f.iota) * a_des + f.a1 + f.a2);
  return f;
}

/// Source of κ(s) and its arc-length derivatives for the derivative chain.
/// The closed-form profile is used when present; otherwise the table's
/// piecewise-linear curvature (zero second derivative).
struct CurvatureSource
{
  const PathTable * table = nullptr;
  std::optional<CurvatureProfile> profile;

  double kappa(double s) const
  {
    return profile ? curvature_at(*profile, s) : table->curvature(s);
  }
  double d1(double s) const
  {
    return profile ? curvature_rate(*profile, s) : table->curvature_slope(s);
  }
  double d2(double s) const { return profile ? curvature_accel(*profile, s) : 0.0; }
};

/// Inputs of the steering derivative chain: path-frame state of R, speed,
/// its rate and the saturation level used by the wrapper.
struct ChainInput
{
  double s = 0.0;
  double e = 0.0;
  double theta = 0.0;
  double sigma1 = 0.0;
  double sigma1_dot = 0.0;
  double gamma_sat = 0.0;
  /// Look-ahead distance per unit speed (t_L); the preview point moves with
  /// ṡ + σ̇1 t_L.
  double t_L = 0.0;
};

struct ChainResult
{
  SteerCommand cmd;
  double s_dot, e_dot, theta_dot;
  double s_ddot, e_ddot, theta_ddot;
  double kappa, kappa_dot, kappa_ddot;
};

/// Steering angle of the feedforward plus feedback law and its first two
/// time derivatives along the kinematic point-R flow with γ equal to the
/// command. γ_sat is held constant over the differentiation.
inline ChainResult steer_derivative_chain(
  const ChainInput & in, const CurvatureSource & src, const ControlGains & g, double l)
{
  ChainResult r{};
  const double kappa_c = src.kappa(in.s);
  const double s_L = in.s + in.sigma1 * in.t_L;
  const double kappa_L = src.kappa(s_L);

  const double x1 = feedback_argument(in.e, in.theta, g);
  const bool wrapped = g.law == SteerLaw::wrapped;
  const WrapperSpec ws{g.wrapper_n, wrapped ? in.gamma_sat : 1.0};
  const double gff = feedforward_steer(kappa_L, l);
  const double gfb = wrapped ? wrapper(ws, x1) : x1;
  const double gamma = gff + gfb;
  if (!(std::abs(gamma) < kPi / 2.0 - 1e-9)) {
    throw SteeringSingularity("derivative chain: commanded steering at pi/2");
  }

  const double v = in.sigma1;
  const double vd = in.sigma1_dot;
  const double e = in.e;
  const double ct = std::cos(in.theta);
  const double st = std::sin(in.theta);
  const double tg = std::tan(gamma);
  const double cg = std::cos(gamma);
  const double G = 1.0 - kappa_c * e;
  if (!(G > 1e-9)) throw TubeSingularity("derivative chain: 1 - kappa * e left the tube");

  // First derivatives along the point-R flow.
  const double s_dot = v * ct / G;
  const double e_dot = v * st;
  const double theta_dot = v / l * tg - kappa_c * s_dot;
  const double kc_dot = src.d1(in.s) * s_dot;
  const double sL_dot = s_dot + vd * in.t_L;
  const double kL_dot = src.d1(s_L) * sL_dot;

  const double q2 = 1.0 + g.k2 * g.k2 * e * e;
  double x1_dot = 0.0;
  if (g.law == SteerLaw::linear) {
    x1_dot = g.k1 * theta_dot + g.k1 * g.k2 * e_dot;
  } else {
    x1_dot = g.k1 * (theta_dot + g.k2 * e_dot / q2);
  }
  const double lk = 1.0 + l * l * kappa_L * kappa_L;
  const double gp = wrapped ? wrapper_deriv(ws, x1) : 1.0;
  const double gpp = wrapped ? wrapper_deriv2(ws, x1) : 0.0;
  const double gamma_dot = l * kL_dot / lk + gp * x1_dot;

  // Second derivatives.
  const double H = e_dot * kappa_c + e * kc_dot;
  const double s_ddot = (vd * ct - v * theta_dot * st) / G + v * ct * H / (G * G);
  const double e_ddot = vd * st + v * theta_dot * ct;
  const double theta_ddot = vd * tg / l + v * gamma_dot / (l * cg * cg) -
                            v * kappa_c * ct * H / (G * G) -
                            (vd * kappa_c * ct + v * kc_dot * ct - v * kappa_c * theta_dot * st) / G;
  const double kc_ddot = src.d2(in.s) * s_dot * s_dot + src.d1(in.s) * s_ddot;
  const double sL_ddot = s_ddot;
  const double kL_ddot = src.d2(s_L) * sL_dot * sL_dot + src.d1(s_L) * sL_ddot;

  double x1_ddot = 0.0;
  if (g.law == SteerLaw::linear) {
    x1_ddot = g.k1 * theta_ddot + g.k1 * g.k2 * e_ddot;
  } else {
    x1_ddot = g.k1 * (theta_ddot + (g.k2 * e_ddot * q2 - 2.0 * g.k2 * g.k2 * g.k2 * e * e_dot * e_dot) /
                                     (q2 * q2));
  }
  const double gamma_ddot = (l * kL_ddot * lk - 2.0 * l * l * l * kappa_L * kL_dot * kL_dot) / (lk * lk) +
                            gpp * x1_dot * x1_dot + gp * x1_ddot;

  r.cmd = {gamma, gff, gfb, gamma_dot, gamma_ddot};
  r.s_dot = s_dot;
  r.e_dot = e_dot;
  r.theta_dot = theta_dot;
  r.s_ddot = s_ddot;
  r.e_ddot = e_ddot;
  r.theta_ddot = theta_ddot;
  r.kappa = kappa_c;
  r.kappa_dot = kc_dot;
  r.kappa_ddot = kc_ddot;
  return r;
}

}  // namespace nonholo

#endif  // NONHOLO__CONTROL_HPP_
