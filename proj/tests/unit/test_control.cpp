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

#include "nonholo/control.hpp"
#include "nonholo/integrate.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Core>

#include <cmath>
#include <random>

using namespace nonholo;

class WrapperOrder : public ::testing::TestWithParam<int>
{
};

TEST_P(WrapperOrder, MatchesQuadrature)
{
  const int n = GetParam();
  for (double g_sat : {0.2, 1.0, 3.0}) {
    for (double x : {-7.0, -1.1, -0.2, 0.0, 0.05, 0.6, 2.5, 9.0}) {
      EXPECT_NEAR(wrapper({n, g_sat}, x), oracle::wrapper_by_quadrature(n, g_sat, x), 1e-10);
    }
  }
}

TEST_P(WrapperOrder, ShapeProperties)
{
  const WrapperSpec w{GetParam(), 0.7};
  double prev = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -5.0 + 10.0 * i / 400.0;
    const double g = wrapper(w, x);
    EXPECT_EQ(g, -wrapper(w, -x));
    EXPECT_LT(std::abs(g), w.g_sat);
    EXPECT_LE(std::abs(g), std::abs(x) + 1e-15);
    EXPECT_GT(g, prev);
    prev = g;
  }
  EXPECT_DOUBLE_EQ(wrapper_deriv(w, 0.0), 1.0);
  EXPECT_NEAR(wrapper(w, 1e9), w.g_sat, 1e-6);
}

TEST_P(WrapperOrder, DerivativesMatchFiniteDifferences)
{
  const WrapperSpec w{GetParam(), 0.7};
  for (double x : {-2.0, -0.3, 0.0, 0.4, 1.7}) {
    const auto g = [&](double y) { return wrapper(w, y); };
    const auto gp = [&](double y) { return wrapper_deriv(w, y); };
    EXPECT_NEAR(wrapper_deriv(w, x), oracle::first_difference(g, x, 1e-5), 1e-9);
    EXPECT_NEAR(wrapper_deriv2(w, x), oracle::first_difference(gp, x, 1e-5), 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, WrapperOrder, ::testing::Values(2, 3, 4, 5, 6, 7, 8, 11, 30));

TEST(Wrapper, LowOrderClosedForms)
{
  for (double x : {-3.0, -0.5, 0.25, 4.0}) {
    EXPECT_NEAR(wrapper({2, 0.5}, x), 2.0 * 0.5 / kPi * std::atan(kPi * x / (2.0 * 0.5)), 1e-15);
    EXPECT_NEAR(wrapper({3, 0.5}, x), x / std::sqrt(1.0 + x * x / 0.25), 1e-15);
  }
}

TEST(Wrapper, InfiniteOrderIsTheClamp)
{
  for (double x : {-2.0, -1.0, -0.3, 0.0, 0.9, 1.0, 5.0}) {
    EXPECT_EQ(wrapper({kInfiniteOrder, 1.0}, x), std::clamp(x, -1.0, 1.0));
  }
  EXPECT_THROW(wrapper({1, 1.0}, 0.3), Error);
  EXPECT_THROW(wrapper({2, 0.0}, 0.3), Error);
}

TEST(SteeringLaw, FeedbackVanishesOnThePath)
{
  const ControlGains g;
  for (SteerLaw law : {SteerLaw::linear, SteerLaw::nonlinear, SteerLaw::wrapped}) {
    ControlGains h = g;
    h.law = law;
    EXPECT_EQ(feedback_steer(0.0, 0.0, h, 0.3), 0.0);
    EXPECT_EQ(parse_law(law_name(law)), law);
  }
  EXPECT_THROW(parse_law("pid"), ConfigError);
}

TEST(SteeringLaw, WrappedFeedbackIsBounded)
{
  const ControlGains g;
  const double sat = steering_saturation(20.0, g, 2.57, deg2rad(30.0));
  EXPECT_NEAR(sat, std::atan(4.0 * 2.57 / 400.0), 1e-15);
  for (double e : {-50.0, -10.0, 10.0, 50.0}) {
    for (double th : {-1.0, 0.0, 1.0}) EXPECT_LT(std::abs(feedback_steer(e, th, g, sat)), sat);
  }
  EXPECT_EQ(steering_saturation(0.5, g, 2.57, deg2rad(30.0)), deg2rad(30.0));
}

TEST(SteeringLaw, DesiredHeadingOnlyForNonlinearLaw)
{
  ControlGains g;
  EXPECT_FALSE(desired_heading(1.0, g).has_value());
  g.law = SteerLaw::nonlinear;
  EXPECT_NEAR(*desired_heading(10.0, g), -std::atan(0.2), 1e-15);
  EXPECT_NEAR(feedback_steer(10.0, *desired_heading(10.0, g), g, 1.0), 0.0, 1e-15);
}

TEST(Longitudinal, TargetSpeedAndAcceleration)
{
  const ControlGains g;
  EXPECT_EQ(target_speed(0.0, g), g.v_max);
  EXPECT_NEAR(target_speed(0.01, g), 20.0, 1e-12);
  EXPECT_EQ(target_speed(1e-5, g), g.v_max);
  EXPECT_EQ(longitudinal_accel(15.0, 15.0, g), 0.0);
  EXPECT_LT(std::abs(longitudinal_accel(0.0, 30.0, g)), g.a_long_max);
  EXPECT_GT(longitudinal_accel(0.0, 30.0, g), 0.0);
  EXPECT_NEAR(steering_torque(0.1, 0.1, g), 0.0, 0.0);
  EXPECT_LT(std::abs(steering_torque(1.0, 0.0, g)), g.T_sat);
}

TEST(Longitudinal, DrivingForceRatios)
{
  const VehicleParams p;
  const DrivingForce f = driving_force(1.0, 0.2, 0.1, -0.3, 15.0, p);
  const double tg = std::tan(0.2);
  EXPECT_NEAR(f.iota, p.m2() / p.m1() * tg * tg, 1e-15);
  EXPECT_NEAR(f.F_R, p.m1() * ((1 + f.iota) * 1.0 + f.a1 + f.a2), 1e-9);
  EXPECT_EQ(driving_force(1.0, 0.0, 0.0, 0.0, 15.0, p).F_R, p.m1());
}

namespace
{

using V4 = Eigen::Vector4d;

/// Closed-loop kinematic flow of (s, e, θ, σ1) under the chain's own
/// steering command, with constant longitudinal acceleration.
struct Flow
{
  CurvatureProfile prof;
  ControlGains g;
  double l = 2.57;
  double accel = 0.0;

  ChainResult chain(const V4 & x) const
  {
    ChainInput in{x[0], x[1], x[2], x[3], accel, 0.12, g.t_L};
    return steer_derivative_chain(in, CurvatureSource{nullptr, prof}, g, l);
  }

  V4 operator()(double, const V4 & x) const
  {
    const double gam = chain(x).cmd.gamma_des;
    const double k = curvature_at(prof, x[0]);
    const double sd = x[3] * std::cos(x[2]) / (1.0 - k * x[1]);
    V4 d;
    d << sd, x[3] * std::sin(x[2]), x[3] / l * std::tan(gam) - k * sd, accel;
    return d;
  }
};

}  // namespace

TEST(DerivativeChain, MatchesFiniteDifferencesForEveryLaw)
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> us(0.0, 1000.0);
  std::uniform_real_distribution<double> ue(-6.0, 6.0);
  std::uniform_real_distribution<double> uth(-0.5, 0.5);
  std::uniform_real_distribution<double> uv(5.0, 25.0);
  for (SteerLaw law : {SteerLaw::linear, SteerLaw::nonlinear, SteerLaw::wrapped}) {
    for (int n : {2, 3, 6}) {
      for (double t_L : {0.0, 0.3}) {
        Flow f;
        f.prof = CurvatureProfile::periodic(250.0, 4);
        f.g.law = law;
        f.g.wrapper_n = n;
        f.g.t_L = t_L;
        f.g.k1 = -0.1;
        f.accel = 0.8;
        for (int i = 0; i < 5; ++i) {
          V4 x;
          x << us(rng), ue(rng), uth(rng), uv(rng);
          const double h = 1e-4;
          const auto gam = [&](double dt) { return f.chain(rk4_step(f, 0.0, x, dt)).cmd.gamma_des; };
          const ChainResult c = f.chain(x);
          const double g0 = c.cmd.gamma_des;
          EXPECT_NEAR(c.cmd.gamma_dot, (gam(h) - gam(-h)) / (2 * h), 1e-7);
          EXPECT_NEAR(c.cmd.gamma_ddot, (gam(h) - 2 * g0 + gam(-h)) / (h * h), 1e-4);
        }
      }
    }
  }
}

TEST(DerivativeChain, TableCurvatureOnStraightPath)
{
  const PathTable t = build_path(CurvatureProfile::straight(), 0.1, {}, 500.0);
  ControlGains g;
  ChainInput in{10.0, 0.0, 0.0, 20.0, 0.0, 0.1, 0.0};
  const ChainResult c = steer_derivative_chain(in, CurvatureSource{&t, std::nullopt}, g, 2.57);
  EXPECT_EQ(c.cmd.gamma_des, 0.0);
  EXPECT_EQ(c.cmd.gamma_dot, 0.0);
  EXPECT_EQ(c.cmd.gamma_ddot, 0.0);
}
