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

#include "nonholo/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nonholo;

namespace
{

/// Central-difference Jacobian of the path-frame closed loop at q0, over the
/// state slots listed in idx.
Eigen::MatrixXd closed_loop_jacobian(const Scenario & sc, const StateVec & q0, const std::vector<int> & idx)
{
  const Simulator sim(sc);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = 1e-6;
    StateVec qp = q0;
    StateVec qm = q0;
    qp[idx[j]] += h;
    qm[idx[j]] -= h;
    const StateVec fp = sim.rhs(0.0, qp, std::nullopt);
    const StateVec fm = sim.rhs(0.0, qm, std::nullopt);
    for (Eigen::Index i = 0; i < n; ++i) J(i, j) = (fp[idx[i]] - fm[idx[i]]) / (2.0 * h);
  }
  return J;
}

double relative_gap(const Eigen::MatrixXd & A, const Eigen::MatrixXd & B)
{
  return (A - B).cwiseAbs().maxCoeff() / std::max(1.0, A.cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Kinematic, StraightPathEigenvalues)
{
  const auto ev = eigenvalues(linearize_kinematic(0.0, 20.0, 2.57, -0.5, 0.02).A);
  ASSERT_EQ(ev.size(), 2u);
  const double a1 = 20.0 * 0.5 / 2.57;
  const double a0 = 400.0 * 0.5 * 0.02 / 2.57;
  const double d = std::sqrt(a1 * a1 - 4 * a0);
  EXPECT_NEAR(ev[0].real(), (-a1 + d) / 2, 1e-12);
  EXPECT_NEAR(ev[1].real(), (-a1 - d) / 2, 1e-12);
  EXPECT_NEAR(ev[0].real(), -0.4527, 1e-4);
  EXPECT_NEAR(ev[1].real(), -3.4384, 1e-4);
}

TEST(Kinematic, ZeroGainIsMarginal)
{
  const auto ev = eigenvalues(linearize_kinematic(0.0, 20.0, 2.57, 0.0, 0.02).A);
  for (const auto & z : ev) EXPECT_EQ(std::abs(z), 0.0);
}

TEST(Kinematic, CurvatureDoesNotEnterTheErrorDynamics)
{
  for (double k : {0.0, 0.005, 0.0125}) {
    const LinearModel m = linearize_kinematic(k, 20.0, 2.57, -0.5, 0.02, true);
    EXPECT_EQ(m.A.rows(), 3);
    EXPECT_TRUE(m.B.isZero());
  }
}

TEST(Kinematic, RouthHurwitzExamples)
{
  EXPECT_TRUE(routh_hurwitz_kinematic(0.0, 2.57, -0.5, 0.02));
  EXPECT_TRUE(routh_hurwitz_kinematic(0.01, 2.57, -0.5, 0.02));
  EXPECT_FALSE(routh_hurwitz_kinematic(0.0, 2.57, 0.1, 0.02));
}

TEST(Kinematic, VerdictFlipsAtTheBoundary)
{
  const double k = 0.01;
  const double l = 2.57;
  const double bound = k * k * l / (1.0 + k * k * l * l);
  EXPECT_NEAR(bound, 2.5683e-4, 1e-8);
  const double k1 = -0.5;
  for (double off : {-1e-6, 1e-6}) {
    const StabilityVerdict v = kinematic_stability(k, 20.0, l, k1, (bound + off) / k1);
    EXPECT_TRUE(v.agree);
    EXPECT_EQ(v.stable, off < 0.0);
  }
}

TEST(Kinematic, GridAgreement)
{
  for (double kappa : {0.0, 1.0 / 200.0, 0.004 * kPi}) {
    const double bound = kappa * kappa * 2.57 / (1.0 + kappa * kappa * 2.57 * 2.57);
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double k1 = -2.0 + 2.5 * i / 49.0;
        const double k2 = -0.05 + 0.15 * j / 49.0;
        if (std::abs(k1) < 1e-8 || std::abs(k1 * k2 - bound) < 1e-8) continue;
        EXPECT_TRUE(kinematic_stability(kappa, 20.0, 2.57, k1, k2).agree) << k1 << " " << k2 << " " << kappa;
      }
    }
  }
}

TEST(Kinematic, MatchesFiniteDifferenceOfClosedLoop)
{
  for (double kappa : {0.0, 1.0 / 200.0}) {
    Scenario sc;
    sc.profile = kappa == 0.0 ? CurvatureProfile::straight() : CurvatureProfile::circle(kappa);
    sc.frame = IntegrationFrame::path;
    sc.duration = 1.0;
    StateVec q0 = StateVec::Zero(3);
    q0[0] = 100.0;
    const Eigen::MatrixXd J = closed_loop_jacobian(sc, q0, {1, 2});
    const LinearModel m = linearize_kinematic(kappa, sc.V, sc.params.l, sc.gains.k1, sc.gains.k2);
    EXPECT_LT(relative_gap(m.A, J), 1e-6) << "kappa=" << kappa << "\n" << J;
  }
}

TEST(Steering, MatchesFiniteDifferenceOfClosedLoop)
{
  for (double kappa : {0.0, 1.0 / 200.0, 0.01}) {
    Scenario sc = named_scenario("fig17");
    sc.profile = kappa == 0.0 ? CurvatureProfile::straight() : CurvatureProfile::circle(kappa);
    sc.frame = IntegrationFrame::path;
    sc.duration = 1.0;
    StateVec q0 = StateVec::Zero(5);
    q0[0] = 100.0;
    q0[3] = std::atan(kappa * sc.params.l);
    const Eigen::MatrixXd J = closed_loop_jacobian(sc, q0, {1, 2, 3, 4});
    const LinearModel m = linearize_steering(
      kappa, sc.V, sc.params.l, sc.params.J_F, sc.gains.k_s, sc.gains.k1, sc.gains.k2);
    EXPECT_LT(relative_gap(m.A, J), 1e-6) << "kappa=" << kappa << "\n" << J << "\n\n" << m.A;
  }
}

TEST(Steering, DefaultGainsAreStableAndLookAheadOnlyChangesB)
{
  const VehicleParams p;
  const ControlGains g;
  const LinearModel a = linearize_steering(0.0, 20.0, p.l, p.J_F, g.k_s, g.k1, g.k2, 0.0);
  const LinearModel b = linearize_steering(0.0, 20.0, p.l, p.J_F, g.k_s, g.k1, g.k2, 0.3);
  for (const auto & z : eigenvalues(a.A)) EXPECT_LT(z.real(), 0.0);
  EXPECT_EQ(a.A, b.A);
  EXPECT_NE(a.B, b.B);
  const LinearModel c = linearize_steering(0.0, 20.0, p.l, p.J_F, 0.0, g.k1, g.k2);
  EXPECT_TRUE(c.A.row(3).head(3).isZero());
}

TEST(Longitudinal, MatchesFiniteDifferenceOfClosedLoop)
{
  const double kappa = 0.004 * kPi;
  Scenario sc = named_scenario("fig20");
  sc.profile = CurvatureProfile::circle(kappa);
  sc.frame = IntegrationFrame::path;
  sc.duration = 1.0;
  const double v = equilibrium_speed(kappa, sc.gains.a_lat_max);
  EXPECT_NEAR(v, 17.84, 5e-3);
  StateVec q0 = StateVec::Zero(4);
  q0[0] = 100.0;
  q0[3] = v;
  const Eigen::MatrixXd J = closed_loop_jacobian(sc, q0, {0, 1, 2, 3});
  const LinearModel m = linearize_longitudinal(kappa, sc.params.l, sc.gains.k1, sc.gains.k2, sc.gains.k_a,
                                               sc.gains.a_lat_max);
  EXPECT_LT(relative_gap(m.A, J), 1e-6) << J << "\n\n" << m.A;
  EXPECT_DOUBLE_EQ(m.A(3, 3), -5.0);
  const LinearModel lat = linearize_kinematic(kappa, v, sc.params.l, sc.gains.k1, sc.gains.k2);
  EXPECT_EQ(m.A.block(1, 1, 2, 2), lat.A);
}

TEST(Longitudinal, DegenerateOnStraightPath)
{
  EXPECT_THROW(linearize_longitudinal(0.0, 2.57, -0.5, 0.02, -5.0, 4.0), DegenerateEquilibrium);
  EXPECT_THROW(equilibrium_speed(0.0, 4.0), DegenerateEquilibrium);
}

TEST(Equivalence, SkateWheelOnFigureScenario)
{
  Scenario s = named_scenario("fig16");
  s.duration = 5.0;
  const EquivalenceReport r = verify_equivalence(EquivalencePair::skate_wheel, s, 1e-9);
  EXPECT_TRUE(r.passed) << r.max_deviation;
  EXPECT_GT(r.samples, 100u);
}

TEST(Equivalence, LagrangeThroughZeroSteerIsSingular)
{
  Scenario s;
  s.profile = CurvatureProfile::straight();
  s.mode = ControlMode::none;
  s.open_loop.gamma0 = 0.05;
  s.open_loop.gamma_amp = 0.1;
  s.open_loop.gamma_omega = 1.0;
  s.open_loop.force = 100.0;
  s.duration = 5.0;
  EXPECT_THROW(verify_equivalence(EquivalencePair::appell_lagrange, s, 1e-6), SingularEncounter);
}
