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

#ifndef NONHOLO__ANALYSIS_HPP_
#define NONHOLO__ANALYSIS_HPP_

#include "nonholo/errors.hpp"
#include "nonholo/sim.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace nonholo
{

struct LinearModel
{
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<std::string> labels;
};

struct StabilityVerdict
{
  std::vector<std::complex<double>> eigenvalues;
  bool stable = false;
  bool criterion_stable = false;
  bool agree = false;
  double max_real = 0.0;
};

inline std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd & A)
{
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()[i]);
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.real() > b.real(); });
  return out;
}

/// Lateral error dynamics (ẽ, θ̃) of the kinematic closed loop about the
/// on-path motion with curvature κ*. With with_s the arc-length deviation
/// s̃ is prepended. B maps the curvature perturbation κ̃ and is zero.
inline LinearModel linearize_kinematic(
  double kappa_star, double V, double l, double k1, double k2, bool with_s = false)
{
  const double lk = 1.0 + kappa_star * kappa_star * l * l;
  Eigen::Matrix2d lat;
  lat << 0.0, V, V / l * k1 * k2 * lk - V * kappa_star * kappa_star, V / l * k1 * lk;
  LinearModel m;
  if (!with_s) {
    m.A = lat;
    m.B = Eigen::MatrixXd::Zero(2, 1);
    m.labels = {"e", "theta"};
    return m;
  }
  m.A = Eigen::MatrixXd::Zero(3, 3);
  m.A(0, 1) = V * kappa_star;
  m.A.block(1, 1, 2, 2) = lat;
  m.B = Eigen::MatrixXd::Zero(3, 1);
  m.labels = {"s", "e", "theta"};
  return m;
}

/// Closed-form stability condition of the kinematic loop.
inline bool routh_hurwitz_kinematic(double kappa_star, double l, double k1, double k2)
{
  const double k2l = kappa_star * kappa_star * l;
  return k1 < 0.0 && k1 * k2 < k2l / (1.0 + kappa_star * l * kappa_star * l);
}

inline StabilityVerdict kinematic_stability(
  double kappa_star, double V, double l, double k1, double k2)
{
  StabilityVerdict v;
  v.eigenvalues = eigenvalues(linearize_kinematic(kappa_star, V, l, k1, k2).A);
  v.max_real = v.eigenvalues.front().real();
  v.stable = v.max_real < 0.0;
  v.criterion_stable = routh_hurwitz_kinematic(kappa_star, l, k1, k2);
  v.agree = v.stable == v.criterion_stable;
  return v;
}

/// Torque-steered closed loop linearized about on-path motion; states
/// (ẽ, θ̃, γ̃, σ̃2). B has the κ̃ column and, with look-ahead, the column of
/// the curvature slope κ̃′ scaled by V t_L.
inline LinearModel linearize_steering(
  double kappa_star, double V, double l, double J_F, double k_s, double k1, double k2,
  double t_L = 0.0)
{
  const double lk = 1.0 + kappa_star * kappa_star * l * l;
  LinearModel m;
  m.A = Eigen::MatrixXd::Zero(4, 4);
  m.A(0, 1) = V;
  m.A(1, 0) = -V * kappa_star * kappa_star;
  m.A(1, 2) = V / l * lk;
  m.A(2, 3) = 1.0;
  m.A(3, 0) = -k_s * k1 * k2 / J_F;
  m.A(3, 1) = -k_s * k1 / J_F;
  m.A(3, 2) = k_s / J_F;
  m.A(3, 3) = -V / l * lk;
  m.B = Eigen::MatrixXd::Zero(4, 2);
  m.B(1, 0) = -V;
  m.B(3, 0) = -k_s * l / (J_F * lk);
  m.B(3, 1) = m.B(3, 0) * V * t_L;
  m.labels = {"e", "theta", "gamma", "sigma2"};
  return m;
}

/// Longitudinal closed loop about σ1* = sqrt(a_lat_max / |κ*|); states
/// (s̃, ẽ, θ̃, σ̃1). B columns: κ̃_C and the preview maximum κ̃_m.
inline LinearModel linearize_longitudinal(
  double kappa_star, double l, double k1, double k2, double k_a, double a_lat_max)
{
  const double ak = std::abs(kappa_star);
  if (ak == 0.0) {
    throw DegenerateEquilibrium("longitudinal linearization needs kappa_star != 0");
  }
  const double v = std::sqrt(a_lat_max / ak);
  const LinearModel lat = linearize_kinematic(kappa_star, v, l, k1, k2);
  LinearModel m;
  m.A = Eigen::MatrixXd::Zero(4, 4);
  m.A(0, 1) = v * kappa_star;
  m.A(0, 3) = 1.0;
  m.A.block(1, 1, 2, 2) = lat.A;
  m.A(3, 3) = k_a;
  m.B = Eigen::MatrixXd::Zero(4, 2);
  m.B(3, 1) = k_a / (2.0 * ak) * v;
  m.labels = {"s", "e", "theta", "sigma1"};
  return m;
}

inline double equilibrium_speed(double kappa_star, double a_lat_max)
{
  if (kappa_star == 0.0) throw DegenerateEquilibrium("no finite equilibrium speed at kappa = 0");
  return std::sqrt(a_lat_max / std::abs(kappa_star));
}

enum class EquivalencePair { skate_wheel, appell_lagrange, alt_pseudo };

inline const char * pair_name(EquivalencePair p)
{
  switch (p) {
    case EquivalencePair::skate_wheel: return "skate_wheel";
    case EquivalencePair::appell_lagrange: return "appell_lagrange";
    case EquivalencePair::alt_pseudo: return "alt_pseudo";
  }
  return "";
}

struct EquivalenceReport
{
  EquivalencePair pair;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::size_t samples = 0;
};

namespace detail
{

inline ModelVariant wheel_counterpart(ModelVariant v)
{
  switch (v) {
    case ModelVariant::SkateKinematic: return ModelVariant::WheelKinematic;
    case ModelVariant::SkateForce: return ModelVariant::WheelTorque;
    case ModelVariant::SkateTorqueSteer: return ModelVariant::WheelTorqueSteer;
    case ModelVariant::SkateForceTorqueSteer: return ModelVariant::WheelTorqueTorqueSteer;
    default:
      throw ConfigError("skate_wheel equivalence needs one of the four plain skate variants");
  }
}

}  // namespace detail

/// Runs both members of a model pair on the same scenario and reports the
/// largest deviation of the common states (x_G, y_G, ψ, σ1 and, for
/// torque steering, γ, σ2) over the recorded rows.
inline EquivalenceReport verify_equivalence(
  EquivalencePair pair, const Scenario & base, double tol)
{
  Scenario a = base;
  Scenario b = base;
  switch (pair) {
    case EquivalencePair::skate_wheel:
      b.variant = detail::wheel_counterpart(a.variant);
      break;
    case EquivalencePair::appell_lagrange:
      a.variant = ModelVariant::SkateForce;
      b.variant = ModelVariant::SkateForceLagrange;
      break;
    case EquivalencePair::alt_pseudo:
      a.variant = ModelVariant::SkateForce;
      b.variant = ModelVariant::SkateForceAltPseudo;
      break;
  }
  SimTrace ta;
  SimTrace tb;
  try {
    ta = run_scenario(a);
    tb = run_scenario(b);
  } catch (const GuardTripped & e) {
    throw SingularEncounter(std::string(pair_name(pair)) + ": " + e.what());
  }
  EquivalenceReport rep;
  rep.pair = pair;
  rep.tolerance = tol;
  const std::size_t n = std::min(ta.rows.size(), tb.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c : {kXG, kYG, kPsi, kGamma, kSigma1, kSigma2}) {
      const double x = ta.rows[i][c];
      const double y = tb.rows[i][c];
      if (!std::isfinite(x) && !std::isfinite(y)) continue;
      rep.max_deviation = std::max(rep.max_deviation, std::abs(x - y));
    }
  }
  rep.samples = n;
  rep.passed = rep.max_deviation < tol;
  return rep;
}

}  // namespace nonholo

#endif  // NONHOLO__ANALYSIS_HPP_
