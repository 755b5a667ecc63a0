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

#ifndef NONHOLO__SIM_HPP_
#define NONHOLO__SIM_HPP_

#include "nonholo/control.hpp"
#include "nonholo/integrate.hpp"
#include "nonholo/models.hpp"
#include "nonholo/path.hpp"
#include "nonholo/pathframe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nonholo
{

enum class ControlMode { none, steer_only, steer_torque, steer_longitudinal };
enum class IntegrationFrame { absolute, path };
enum class InputHold { continuous, zoh };

inline const char * mode_name(ControlMode m)
{
  switch (m) {
    case ControlMode::none: return "none";
    case ControlMode::steer_only: return "steer_only";
    case ControlMode::steer_torque: return "steer_torque";
    case ControlMode::steer_longitudinal: return "steer_longitudinal";
  }
  return "none";
}

inline ControlMode parse_mode(const std::string & s)
{
  if (s == "none") return ControlMode::none;
  if (s == "steer_only") return ControlMode::steer_only;
  if (s == "steer_torque") return ControlMode::steer_torque;
  if (s == "steer_longitudinal") return ControlMode::steer_longitudinal;
  throw ConfigError("unknown controller mode '" + s + "'");
}

/// Inputs used when no controller is active: γ(t) = γ0 + A sin(ω t), a
/// constant resultant driving force split by β and a constant steering
/// torque.
struct OpenLoop
{
  double gamma0 = 0.0;
  double gamma_amp = 0.0;
  double gamma_omega = 0.0;
  double force = 0.0;
  double T_s = 0.0;

  bool operator==(const OpenLoop &) const = default;
};

struct Scenario
{
  std::string name = "custom";
  ModelVariant variant = ModelVariant::SkateKinematic;
  TrackPoint point = TrackPoint::RearAxle;
  CurvatureProfile profile = CurvatureProfile::periodic(250.0, 4);
  double path_step = kDefaultPathStep;
  /// Length of open (straight) paths; 0 picks V · duration + 200 m.
  double path_length = 0.0;
  double s0 = 0.0;
  double e0 = 0.0;
  double theta0 = 0.0;
  /// Prescribed speed, or the initial σ1 for force-driven variants.
  double V = 20.0;
  double beta = 1.0;
  VehicleParams params;
  ControlGains gains;
  ControlMode mode = ControlMode::steer_only;
  OpenLoop open_loop;
  double dt = 1e-3;
  double duration = 30.0;
  IntegrationFrame frame = IntegrationFrame::absolute;
  InputHold hold = InputHold::continuous;
  int record_every = 1;

  bool operator==(const Scenario &) const = default;

  void validate() const
  {
    params.validate();
    profile.validate();
    if (!(dt > 0.0)) throw ConfigError("sim.dt must be positive");
    if (!(duration >= dt)) throw ConfigError("sim.duration must be at least dt");
    if (!(V > 0.0)) throw ConfigError("sim.V must be positive");
    if (record_every < 1) throw ConfigError("sim.record_every must be >= 1");
    if (!(path_step > 0.0)) throw ConfigError("path.step must be positive");
    if (!(beta >= 0.0 && beta <= 1.0)) throw BadSplit("drivetrain split ratio must lie in [0, 1]");
    const StateLayout lay = layout_of(variant);
    const bool alt = variant == ModelVariant::SkateForceAltPseudo ||
                     variant == ModelVariant::SkateForceLagrange;
    if (alt && mode != ControlMode::none) {
      throw ConfigError("alternative pseudo-velocity variants run open loop only (mode = none)");
    }
    if (mode == ControlMode::steer_torque && !lay.torque_steer) {
      throw ConfigError("steer_torque mode needs a torque-steer variant");
    }
    if ((mode == ControlMode::steer_only || mode == ControlMode::steer_longitudinal) &&
        lay.torque_steer) {
      throw ConfigError("torque-steer variants need steer_torque mode");
    }
    if (mode == ControlMode::steer_longitudinal && lay.constrained_speed) {
      throw ConfigError("steer_longitudinal mode needs a force- or torque-driven variant");
    }
    if (frame == IntegrationFrame::path && !supports_path_frame(variant)) {
      throw ConfigError("path-frame integration is not available for this variant");
    }
    if (point == TrackPoint::CenterOfMass && mode != ControlMode::none &&
        !lay.constrained_speed) {
      throw ConfigError("centre-of-mass tracking is supported for constrained-speed variants only");
    }
  }
};

inline constexpr std::array<std::string_view, 24> kTraceColumns = {
  "t",       "x_G",     "y_G",     "psi",       "gamma",    "sigma1", "sigma2", "s_C",
  "e_C",     "theta_C", "gamma_des", "gamma_ff", "gamma_fb", "T_s",   "F_R",    "a_des",
  "v_des",   "a_lat",   "iota",    "a1",        "a2",       "mu_R",   "mu_F",   "resid_max"};

enum TraceCol : std::size_t {
  kT, kXG, kYG, kPsi, kGamma, kSigma1, kSigma2, kSC, kEC, kThetaC, kGammaDes, kGammaFF,
  kGammaFB, kTs, kFR, kADes, kVDes, kALat, kIota, kA1, kA2, kMuR, kMuF, kResid
};

using TraceRow = std::array<double, kTraceColumns.size()>;

struct SimTrace
{
  std::vector<TraceRow> rows;
  StateVec final_state;
  std::shared_ptr<const PathTable> path;

  static std::size_t index(std::string_view name)
  {
    for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
      if (kTraceColumns[i] == name) return i;
    }
    throw Error("unknown trace column '" + std::string(name) + "'");
  }

  std::vector<double> column(std::string_view name) const
  {
    const std::size_t i = index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto & r : rows) out.push_back(r[i]);
    return out;
  }
};

inline void write_trace_csv(std::ostream & out, const SimTrace & trace)
{
  for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
    out << (i ? "," : "") << kTraceColumns[i];
  }
  out << '\n';
  char buf[32];
  for (const auto & r : trace.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      if (std::isfinite(r[i])) {
        std::snprintf(buf, sizeof(buf), "%.12g", r[i]);
        out << buf;
      }
    }
    out << '\n';
  }
}

/// Everything the controller produced at one evaluation.
struct ControlOutput
{
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  DriveInput u;
  double s_C = kNaN;
  double e_C = kNaN;
  double theta_C = kNaN;
  double gamma_des = kNaN;
  double gamma_ff = kNaN;
  double gamma_fb = kNaN;
  double gamma_dot = kNaN;
  double gamma_ddot = kNaN;
  double T_s = kNaN;
  double F_R = kNaN;
  double F_F = 0.0;
  double a_des = kNaN;
  double v_des = kNaN;
  double iota = kNaN;
  double a1 = kNaN;
  double a2 = kNaN;
};

inline bool is_force_assigned(ModelVariant v)
{
  return v == ModelVariant::SkateForce || v == ModelVariant::WheelTorque ||
         v == ModelVariant::SkateForceAltPseudo || v == ModelVariant::SkateForceLagrange;
}

/// Binds a scenario to its path and runs it.
class Simulator
{
public:
  explicit Simulator(const Scenario & sc) : sc_(sc), lay_(layout_of(sc.variant))
  {
    sc_.validate();
    std::optional<double> length;
    if (!sc_.profile.closed_length()) {
      length = sc_.path_length > 0.0 ? sc_.path_length : sc_.V * sc_.duration + 200.0;
    }
    path_ = std::make_shared<const PathTable>(build_path(sc_.profile, sc_.path_step, {}, length));
    window_.window = std::max(1.0, 4.0 * sc_.path_step);
  }

  const PathTable & path() const { return *path_; }
  const Scenario & scenario() const { return sc_; }

  /// Initial state vector in the integration frame.
  StateVec initial_state() const
  {
    const Pose2 pose = from_path_coordinates(*path_, sc_.s0, sc_.e0, sc_.theta0);
    AbsState a = AbsState::zero(sc_.variant, lay_.constrained_speed ? sc_.V : 0.0);
    double x = pose.x;
    double y = pose.y;
    if (sc_.point == TrackPoint::RearAxle) {
      x += sc_.params.d * std::cos(pose.psi);
      y += sc_.params.d * std::sin(pose.psi);
    }
    a.q[0] = x;
    a.q[1] = y;
    a.q[2] = pose.psi;
    if (lay_.sigma1 >= 0) {
      const double g0 = sc_.open_loop.gamma0;
      double pv = sc_.V;
      if (sc_.variant == ModelVariant::SkateForceAltPseudo) pv = sc_.V / std::cos(g0);
      if (sc_.variant == ModelVariant::SkateForceLagrange) pv = sc_.V * std::tan(g0) / sc_.params.l;
      a.q[lay_.sigma1] = pv;
    }
    if (sc_.frame == IntegrationFrame::absolute) return a.q;
    return to_path_frame(a, sc_.point, *path_, sc_.params).q;
  }

  AbsState absolute(const StateVec & q) const
  {
    if (sc_.frame == IntegrationFrame::absolute) {
      AbsState a;
      a.variant = sc_.variant;
      a.q = q;
      a.V = sc_.V;
      return a;
    }
    return to_absolute(rel(q), *path_, sc_.params);
  }

  /// Path coordinates (s, e, θ) of the tracked point; the hint keeps the
  /// projection on the branch followed so far.
  std::array<double, 3> observe(const StateVec & q, std::optional<double> hint) const
  {
    if (sc_.frame == IntegrationFrame::path) return {q[0], q[1], q[2]};
    const auto [px, py] = tracked_position(sc_.point, q[0], q[1], q[2], sc_.params);
    const PathQuery pq = project(px, py, q[2], *path_, hint, window_);
    return {pq.s_C, pq.e_C, pq.theta_C};
  }

  ControlOutput control(double t, const StateVec & q, std::optional<double> hint, bool diagnostics)
    const
  {
    ControlOutput out;
    DriveInput & u = out.u;
    const VehicleParams & p = sc_.params;
    const ControlGains & g = sc_.gains;

    if (sc_.mode == ControlMode::none) {
      const OpenLoop & ol = sc_.open_loop;
      const double w = ol.gamma_omega;
      if (!lay_.torque_steer) {
        u.gamma = ol.gamma0 + ol.gamma_amp * std::sin(w * t);
        out.gamma_des = u.gamma;
        if (!lay_.constrained_speed) {
          u.gamma_dot = ol.gamma_amp * w * std::cos(w * t);
          u.gamma_ddot = -ol.gamma_amp * w * w * std::sin(w * t);
        }
        out.gamma_dot = ol.gamma_amp * w * std::cos(w * t);
        out.gamma_ddot = -ol.gamma_amp * w * w * std::sin(w * t);
      } else {
        u.T_s = ol.T_s;
        out.T_s = ol.T_s;
      }
      if (!lay_.constrained_speed) {
        const auto [fr, ff] = drivetrain_split(ol.force, sc_.beta);
        set_drive(u, fr, ff);
        out.F_R = fr;
        out.F_F = ff;
      }
      return out;
    }

    const auto obs = observe(q, hint);
    out.s_C = obs[0];
    out.e_C = obs[1];
    out.theta_C = obs[2];
    const double speed = lay_.constrained_speed ? sc_.V : q[lay_.sigma1];
    const double gamma_sat = steering_saturation(speed, g, p.l, p.gamma_max);
    const double kappa_L = path_->curvature(out.s_C + speed * g.t_L);
    out.gamma_ff = feedforward_steer(kappa_L, p.l);
    out.gamma_fb = feedback_steer(out.e_C, out.theta_C, g, gamma_sat);
    out.gamma_des = out.gamma_ff + out.gamma_fb;

    double a_des = 0.0;
    if (sc_.mode == ControlMode::steer_longitudinal) {
      const double kappa_m = path_->max_abs_curvature(out.s_C, out.s_C + g.preview_dist);
      out.v_des = target_speed(kappa_m, g);
      a_des = longitudinal_accel(speed, out.v_des, g);
      out.a_des = a_des;
    }

    if (!lay_.torque_steer) {
      u.gamma = out.gamma_des;
      const bool force = is_force_assigned(sc_.variant);
      if (force || diagnostics) {
        ChainInput ci;
        ci.s = out.s_C;
        ci.e = out.e_C;
        ci.theta = out.theta_C;
        ci.sigma1 = speed;
        ci.sigma1_dot = a_des;
        ci.gamma_sat = gamma_sat;
        ci.t_L = g.t_L;
        const ChainResult cr =
          steer_derivative_chain(ci, CurvatureSource{path_.get(), path_->profile()}, g, p.l);
        out.gamma_dot = cr.cmd.gamma_dot;
        out.gamma_ddot = cr.cmd.gamma_ddot;
        // For constrained-speed variants this is the force that holds V.
        const DrivingForce df =
          driving_force(a_des, out.gamma_des, out.gamma_dot, out.gamma_ddot, speed, p);
        out.F_R = df.F_R;
        out.iota = df.iota;
        out.a1 = df.a1;
        out.a2 = df.a2;
        if (force) {
          u.gamma_dot = out.gamma_dot;
          u.gamma_ddot = out.gamma_ddot;
          set_drive(u, df.F_R, 0.0);
        }
      }
      return out;
    }

    const double gamma = q[lay_.gamma];
    out.T_s = steering_torque(gamma, out.gamma_des, g);
    u.T_s = out.T_s;
    if (!lay_.constrained_speed) {
      // Speed hold: the pseudo force that makes σ̇1 vanish.
      const double tg = std::tan(gamma);
      const double cg = std::cos(gamma);
      const double mj = p.m2() - p.J_F / (p.l * p.l);
      const double Pi = mj * tg / (cg * cg) * speed * q[lay_.sigma2] + out.T_s * tg / p.l;
      out.F_R = Pi;
      set_drive(u, Pi, 0.0);
    }
    return out;
  }

  StateVec rhs(double t, const StateVec & q, std::optional<double> hint) const
  {
    const DriveInput u = held_ ? held_->u : control(t, q, hint, false).u;
    if (sc_.frame == IntegrationFrame::absolute) return eom_rhs(absolute(q), u, sc_.params);
    return pathframe_rhs(rel(q), u, *path_, sc_.params);
  }

  SimTrace run()
  {
    SimTrace trace;
    trace.path = path_;
    StateVec q = initial_state();
    std::optional<double> hint;
    if (sc_.mode != ControlMode::none && sc_.frame == IntegrationFrame::absolute) {
      hint = observe(q, std::nullopt)[0];
    }
    const std::size_t steps = step_count(sc_.duration, sc_.dt);
    trace.rows.reserve(steps / static_cast<std::size_t>(sc_.record_every) + 2);
    const auto f = [&](double t, const StateVec & x) { return rhs(t, x, hint); };
    double t = 0.0;
    try {
      for (std::size_t k = 0; k <= steps; ++k) {
        t = static_cast<double>(k) * sc_.dt;
        const bool record = k % static_cast<std::size_t>(sc_.record_every) == 0 || k == steps;
        if (sc_.hold == InputHold::zoh || record) {
          held_.reset();
          const ControlOutput co = control(t, q, hint, record);
          if (record) trace.rows.push_back(make_row(t, q, co));
          if (sc_.hold == InputHold::zoh) held_ = co;
        }
        if (k == steps) break;
        if (sc_.variant == ModelVariant::SkateForceLagrange) check_steer_sign(t, q, hint);
        q = rk4_step(f, t, q, sc_.dt);
        if (hint) hint = observe(q, hint)[0];
      }
    } catch (const GuardError & e) {
      held_.reset();
      throw GuardTripped(t, e.guard(), e.what());
    }
    held_.reset();
    trace.final_state = q;
    return trace;
  }

private:
  /// The Lagrangian form is singular on γ = 0. Sampled steering rarely hits
  /// zero exactly, so a sign change between the stage times of a step counts
  /// as reaching it.
  void check_steer_sign(double t, const StateVec & q, std::optional<double> hint) const
  {
    const double g0 = control(t, q, hint, false).u.gamma;
    for (double frac : {0.5, 1.0}) {
      const double g1 = control(t + frac * sc_.dt, q, hint, false).u.gamma;
      if (g0 == 0.0 || g0 * g1 <= 0.0) {
        throw LagrangeSingularity("steering angle reaches zero within the step");
      }
    }
  }

  RelState rel(const StateVec & q) const
  {
    RelState r;
    r.variant = sc_.variant;
    r.point = sc_.point;
    r.q = q;
    r.V = sc_.V;
    return r;
  }

  void set_drive(DriveInput & u, double F_R, double F_F) const
  {
    if (lay_.wheels) {
      u.T_R = sc_.params.r * F_R;
      u.T_F = sc_.params.r * F_F;
    } else {
      u.F_R = F_R;
      u.F_F = F_F;
    }
  }

  TraceRow make_row(double t, const StateVec & q, const ControlOutput & co) const
  {
    constexpr double nan = ControlOutput::kNaN;
    TraceRow r;
    r.fill(nan);
    const VehicleParams & p = sc_.params;
    const AbsState a = absolute(q);
    const double gamma = steering_angle(a, co.u);
    const double speed = longitudinal_speed(a, co.u, p);
    r[kT] = t;
    r[kXG] = a.q[0];
    r[kYG] = a.q[1];
    r[kPsi] = a.q[2];
    r[kGamma] = gamma;
    r[kSigma1] = speed;
    if (lay_.sigma2 >= 0) r[kSigma2] = a.q[lay_.sigma2];
    r[kSC] = co.s_C;
    r[kEC] = co.e_C;
    r[kThetaC] = co.theta_C;
    r[kGammaDes] = co.gamma_des;
    r[kGammaFF] = co.gamma_ff;
    r[kGammaFB] = co.gamma_fb;
    r[kTs] = co.T_s;
    r[kFR] = co.F_R;
    r[kADes] = co.a_des;
    r[kVDes] = co.v_des;
    r[kALat] = lateral_acceleration(speed, gamma, p.l);
    r[kIota] = co.iota;
    r[kA1] = co.a1;
    r[kA2] = co.a2;
    if (!lay_.torque_steer && std::isfinite(co.F_R) && std::isfinite(co.gamma_dot)) {
      const ConstraintForces cf =
        constraining_forces(gamma, speed, co.F_R, co.F_F, co.gamma_dot, co.gamma_ddot, p);
      r[kMuR] = cf.mu_R;
      r[kMuF] = cf.mu_F;
    }
    const StateVec dq = eom_rhs(a, co.u, p);
    r[kResid] = constraint_residuals(a, dq, co.u, p).cwiseAbs().maxCoeff();
    return r;
  }

  Scenario sc_;
  StateLayout lay_;
  std::shared_ptr<const PathTable> path_;
  ProjectOptions window_;
  std::optional<ControlOutput> held_;
};

inline SimTrace run_scenario(const Scenario & s) { return Simulator(s).run(); }

inline constexpr std::array<std::string_view, 7> kFigureNames = {
  "fig13", "fig14", "fig16", "fig17", "fig18", "fig20", "fig21"};

/// Built-in scenarios with the default vehicle and gains.
inline Scenario named_scenario(std::string_view name)
{
  Scenario s;
  s.name = std::string(name);
  s.e0 = -10.0;
  if (name == "fig13") {
    s.profile = CurvatureProfile::straight();
    s.duration = 30.0;
  } else if (name == "fig14") {
    s.profile = CurvatureProfile::circle(1.0 / 200.0);
    s.theta0 = deg2rad(20.0);
    s.duration = 30.0;
  } else if (name == "fig16") {
    s.duration = 100.0;
  } else if (name == "fig17" || name == "fig18") {
    s.variant = ModelVariant::SkateTorqueSteer;
    s.mode = ControlMode::steer_torque;
    s.duration = 100.0;
    if (name == "fig18") s.gains.t_L = 0.3;
  } else if (name == "fig20" || name == "fig21") {
    s.variant = ModelVariant::SkateForce;
    s.mode = ControlMode::steer_longitudinal;
    s.duration = 120.0;
    if (name == "fig21") {
      s.profile = CurvatureProfile::periodic(50.0, 4);
      s.gains.a_lat_max = 12.0;
      s.duration = 60.0;
    }
  } else {
    throw ConfigError("unknown figure '" + std::string(name) + "'");
  }
  return s;
}

/// Root mean square of e_C over rows with t in [t0, t1].
inline double rms_lateral_error(const SimTrace & tr, double t0, double t1)
{
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto & r : tr.rows) {
    if (r[kT] < t0 || r[kT] > t1 || !std::isfinite(r[kEC])) continue;
    acc += r[kEC] * r[kEC];
    ++n;
  }
  return n ? std::sqrt(acc / static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace nonholo

#endif  // NONHOLO__SIM_HPP_
