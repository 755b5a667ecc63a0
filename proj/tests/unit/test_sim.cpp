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

#include "nonholo/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

using namespace nonholo;

TEST(Integrator, StepCount)
{
  EXPECT_EQ(step_count(30.0, 1e-3), 30000u);
  EXPECT_EQ(step_count(1.0, 0.3), 4u);
  EXPECT_THROW(step_count(1.0, 0.0), Error);
  EXPECT_THROW(step_count(1e-4, 1e-3), Error);
}

TEST(Integrator, FourthOrderOnLinearSystem)
{
  using V2 = Eigen::Vector2d;
  const auto f = [](double, const V2 & x) { return V2(x[1], -x[0]); };
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    const V2 x = integrate(f, V2(1.0, 0.0), dt, 5.0, [](std::size_t, double, const V2 &) {});
    const double err = std::hypot(x[0] - std::cos(5.0), x[1] + std::sin(5.0));
    if (prev > 0.0) EXPECT_NEAR(prev / err, 16.0, 1.0);
    prev = err;
  }
}

TEST(Simulator, ConvergesWithFourthOrderInDt)
{
  Scenario s = named_scenario("fig14");
  s.duration = 4.0;
  const auto final_at = [&](double dt) {
    Scenario t = s;
    t.dt = dt;
    t.record_every = 1000000;
    return run_scenario(t).final_state;
  };
  const StateVec ref = final_at(0.0025);
  const double e1 = (final_at(0.04) - ref).norm();
  const double e2 = (final_at(0.02) - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Simulator, Deterministic)
{
  Scenario s = named_scenario("fig20");
  s.duration = 5.0;
  const SimTrace a = run_scenario(s);
  const SimTrace b = run_scenario(s);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  EXPECT_EQ(std::memcmp(a.rows.data(), b.rows.data(), a.rows.size() * sizeof(TraceRow)), 0);
}

TEST(Simulator, RecordsRequestedRows)
{
  Scenario s = named_scenario("fig13");
  s.duration = 1.0;
  s.record_every = 10;
  const SimTrace tr = run_scenario(s);
  EXPECT_EQ(tr.rows.size(), 101u);
  EXPECT_DOUBLE_EQ(tr.rows.back()[kT], 1.0);
  EXPECT_NEAR(tr.rows.front()[kEC], -10.0, 1e-9);
  EXPECT_NEAR(tr.rows.front()[kThetaC], 0.0, 1e-12);
}

TEST(Simulator, CircleSteadyState)
{
  const SimTrace tr = run_scenario(named_scenario("fig14"));
  const auto & r = tr.rows.back();
  EXPECT_LT(std::abs(r[kEC]), 1e-4);
  EXPECT_NEAR(r[kGammaDes], std::atan(2.57 / 200.0), 1e-6);
  EXPECT_NEAR(r[kALat], 2.0, 1e-3);
}

TEST(Simulator, CentreOfMassTracking)
{
  Scenario s = named_scenario("fig13");
  s.point = TrackPoint::CenterOfMass;
  const SimTrace straight = run_scenario(s);
  EXPECT_LT(std::abs(straight.rows.back()[kEC]), 0.05);

  // On curved paths e_D and θ_D cannot both vanish, so only boundedness is
  // expected there.
  s = named_scenario("fig16");
  s.point = TrackPoint::CenterOfMass;
  s.duration = 60.0;
  s.record_every = 100;
  const SimTrace curved = run_scenario(s);
  double late = 0.0;
  for (const auto & r : curved.rows) {
    if (r[kT] > 30.0) late = std::max(late, std::abs(r[kEC]));
  }
  EXPECT_LT(late, 2.0);
}

TEST(Simulator, ZeroOrderHoldRuns)
{
  Scenario s = named_scenario("fig14");
  s.hold = InputHold::zoh;
  const SimTrace tr = run_scenario(s);
  EXPECT_LT(std::abs(tr.rows.back()[kEC]), 1e-2);
}

TEST(Simulator, WheelAnglesFollowTheMotion)
{
  Scenario s = named_scenario("fig13");
  s.variant = ModelVariant::WheelKinematic;
  s.duration = 2.0;
  s.e0 = 0.0;
  const SimTrace tr = run_scenario(s);
  EXPECT_NEAR(tr.final_state[3], 40.0 / s.params.r, 1e-9);
}

TEST(Simulator, OpenLoopGuardReportsTimeAndGuard)
{
  Scenario s;
  s.variant = ModelVariant::SkateForceLagrange;
  s.mode = ControlMode::none;
  s.profile = CurvatureProfile::straight();
  s.open_loop.gamma0 = 0.05;
  s.open_loop.gamma_amp = 0.1;
  s.open_loop.gamma_omega = 1.0;
  s.duration = 5.0;
  try {
    run_scenario(s);
    FAIL() << "expected a guard";
  } catch (const GuardTripped & e) {
    EXPECT_EQ(e.guard(), "LagrangeSingularity");
    EXPECT_NEAR(e.time(), kPi + std::asin(0.5), 2e-3);
    EXPECT_NE(std::string(e.what()).find("t="), std::string::npos);
  }
}

TEST(Simulator, ScenarioValidation)
{
  Scenario s;
  s.dt = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = Scenario{};
  s.variant = ModelVariant::SkateTorqueSteer;
  EXPECT_THROW(s.validate(), ConfigError);
  s.mode = ControlMode::steer_torque;
  EXPECT_NO_THROW(s.validate());
  s = Scenario{};
  s.mode = ControlMode::steer_longitudinal;
  EXPECT_THROW(s.validate(), ConfigError);
  s = Scenario{};
  s.beta = 2.0;
  EXPECT_THROW(s.validate(), BadSplit);
  EXPECT_THROW(named_scenario("fig99"), ConfigError);
  EXPECT_EQ(parse_mode(mode_name(ControlMode::steer_torque)), ControlMode::steer_torque);
}

TEST(Simulator, AllNamedFiguresComplete)
{
  for (auto name : kFigureNames) {
    Scenario s = named_scenario(name);
    s.dt = 2e-3;
    s.record_every = 50;
    SimTrace tr;
    EXPECT_NO_THROW(tr = run_scenario(s)) << name;
    double resid = 0.0;
    for (const auto & r : tr.rows) resid = std::max(resid, r[kResid]);
    EXPECT_LT(resid, 1e-8) << name;
  }
}

TEST(Trace, CsvHeaderAndMissingValues)
{
  Scenario s = named_scenario("fig13");
  s.duration = 0.01;
  const SimTrace tr = run_scenario(s);
  std::stringstream ss;
  write_trace_csv(ss, tr);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header.rfind("t,x_G,y_G,psi,gamma,sigma1", 0), 0u);
  std::string row;
  std::getline(ss, row);
  EXPECT_NE(row.find(",,"), std::string::npos);
  EXPECT_EQ(SimTrace::index("e_C"), static_cast<std::size_t>(kEC));
  EXPECT_THROW(SimTrace::index("nope"), Error);
}
