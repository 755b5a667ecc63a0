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

// Scenario configuration files.
//
// A config is a JSON object with up to five blocks; every key is optional and
// missing keys keep their defaults. Unknown blocks or keys are rejected. The
// schema is written out in full in README.md.

#ifndef NONHOLO__CONFIG_HPP_
#define NONHOLO__CONFIG_HPP_

#include "nonholo/errors.hpp"
#include "nonholo/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace nonholo
{

struct OutputOptions
{
  std::string dir = "out";
  bool plot = true;

  bool operator==(const OutputOptions &) const = default;
};

struct Config
{
  Scenario scenario;
  OutputOptions output;

  bool operator==(const Config &) const = default;
};

namespace detail
{

using json = nlohmann::json;

inline const char * kind_name(CurvatureKind k)
{
  switch (k) {
    case CurvatureKind::straight: return "straight";
    case CurvatureKind::circle: return "circle";
    case CurvatureKind::periodic: return "periodic";
  }
  return "straight";
}

inline const char * point_name(TrackPoint p)
{
  return p == TrackPoint::RearAxle ? "rear_axle" : "center_of_mass";
}

/// Walks the keys of one block, dispatching each to a handler and naming the
/// first key nobody claims.
class Block
{
public:
  Block(const json & j, std::string name) : j_(j), name_(std::move(name))
  {
    if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char * key, T & out)
  {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    claimed_.push_back(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception &) {
      throw ConfigError("bad value for '" + name_ + "." + key + "'");
    }
  }

  template <typename Parse>
  void get_enum(const char * key, Parse parse)
  {
    std::string text;
    get(key, text);
    if (j_.contains(key)) {
      try {
        parse(text);
      } catch (const Error & e) {
        throw ConfigError("bad value for '" + name_ + "." + key + "': " + e.what());
      }
    }
  }

  const json * child(const char * key)
  {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    claimed_.push_back(key);
    return &*it;
  }

  void finish() const
  {
    for (const auto & [key, value] : j_.items()) {
      if (std::find(claimed_.begin(), claimed_.end(), key) == claimed_.end()) {
        throw ConfigError("unknown key '" + name_ + "." + key + "'");
      }
    }
  }

private:
  const json & j_;
  std::string name_;
  std::vector<std::string> claimed_;
};

inline void read_vehicle(Block b, VehicleParams & p)
{
  b.get("l", p.l);
  b.get("d", p.d);
  b.get("m", p.m);
  b.get("m_R", p.m_R);
  b.get("m_F", p.m_F);
  b.get("J_G", p.J_G);
  b.get("J_R", p.J_R);
  b.get("J_F", p.J_F);
  b.get("I_R", p.I_R);
  b.get("I_F", p.I_F);
  b.get("r", p.r);
  b.get("gamma_max", p.gamma_max);
  b.finish();
}

inline void read_path(Block b, Scenario & s)
{
  CurvatureProfile & pr = s.profile;
  b.get_enum("kind", [&](const std::string & k) {
    if (k == "straight") pr = CurvatureProfile::straight();
    else if (k == "circle") pr.kind = CurvatureKind::circle;
    else if (k == "periodic") pr.kind = CurvatureKind::periodic;
    else throw Error("expected straight, circle or periodic");
  });
  b.get("kappa", pr.kappa_const);
  b.get("s_T", pr.s_T);
  b.get("N", pr.N);
  b.get("step", s.path_step);
  b.get("length", s.path_length);
  b.finish();
  if (pr.kind == CurvatureKind::periodic) {
    pr.kappa_const = 0.0;
    pr = CurvatureProfile::periodic(pr.s_T, pr.N);
  } else {
    pr.s_T = 0.0;
    pr.N = 0;
    pr.kappa_max = 0.0;
    if (pr.kind == CurvatureKind::straight) pr.kappa_const = 0.0;
  }
}

inline void read_controller(Block b, Scenario & s)
{
  ControlGains & g = s.gains;
  b.get_enum("mode", [&](const std::string & v) { s.mode = parse_mode(v); });
  b.get_enum("law", [&](const std::string & v) { g.law = parse_law(v); });
  b.get("wrapper_n", g.wrapper_n);
  b.get("k1", g.k1);
  b.get("k2", g.k2);
  b.get("k_s", g.k_s);
  b.get("T_sat", g.T_sat);
  b.get("k_a", g.k_a);
  b.get("a_lat_max", g.a_lat_max);
  b.get("a_long_max", g.a_long_max);
  b.get("v_max", g.v_max);
  b.get("t_L", g.t_L);
  b.get("preview_dist", g.preview_dist);
  b.finish();
}

inline void read_sim(Block b, Scenario & s)
{
  b.get("name", s.name);
  b.get_enum("variant", [&](const std::string & v) { s.variant = parse_variant(v); });
  b.get_enum("point", [&](const std::string & v) {
    if (v == "rear_axle") s.point = TrackPoint::RearAxle;
    else if (v == "center_of_mass") s.point = TrackPoint::CenterOfMass;
    else throw Error("expected rear_axle or center_of_mass");
  });
  b.get_enum("frame", [&](const std::string & v) {
    if (v == "absolute") s.frame = IntegrationFrame::absolute;
    else if (v == "path") s.frame = IntegrationFrame::path;
    else throw Error("expected absolute or path");
  });
  b.get_enum("hold", [&](const std::string & v) {
    if (v == "continuous") s.hold = InputHold::continuous;
    else if (v == "zoh") s.hold = InputHold::zoh;
    else throw Error("expected continuous or zoh");
  });
  b.get("dt", s.dt);
  b.get("duration", s.duration);
  b.get("record_every", s.record_every);
  b.get("V", s.V);
  b.get("beta", s.beta);
  b.get("s0", s.s0);
  b.get("e0", s.e0);
  b.get("theta0", s.theta0);
  if (const json * ol = b.child("open_loop")) {
    Block o(*ol, "sim.open_loop");
    o.get("gamma0", s.open_loop.gamma0);
    o.get("gamma_amp", s.open_loop.gamma_amp);
    o.get("gamma_omega", s.open_loop.gamma_omega);
    o.get("force", s.open_loop.force);
    o.get("T_s", s.open_loop.T_s);
    o.finish();
  }
  b.finish();
}

inline void read_output(Block b, OutputOptions & o)
{
  b.get("dir", o.dir);
  b.get("plot", o.plot);
  b.finish();
}

}  // namespace detail

/// Parses a config on top of base; only keys present override base.
inline Config parse_config(const std::string & text, Config base = {})
{
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  try {
    detail::Block top(j, "config");
    if (const json * v = top.child("vehicle")) detail::read_vehicle({*v, "vehicle"}, base.scenario.params);
    if (const json * v = top.child("path")) detail::read_path({*v, "path"}, base.scenario);
    if (const json * v = top.child("controller")) detail::read_controller({*v, "controller"}, base.scenario);
    if (const json * v = top.child("sim")) detail::read_sim({*v, "sim"}, base.scenario);
    if (const json * v = top.child("output")) detail::read_output({*v, "output"}, base.output);
    top.finish();
    base.scenario.validate();
  } catch (const ConfigError &) {
    throw;
  } catch (const Error & e) {
    throw ConfigError(e.what());
  }
  return base;
}

inline Config load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Full config with every key written out.
inline std::string dump_config(const Config & c)
{
  using detail::json;
  const Scenario & s = c.scenario;
  const VehicleParams & p = s.params;
  const ControlGains & g = s.gains;
  json j;
  j["vehicle"] = {{"l", p.l},     {"d", p.d},     {"m", p.m},     {"m_R", p.m_R},
                  {"m_F", p.m_F}, {"J_G", p.J_G}, {"J_R", p.J_R}, {"J_F", p.J_F},
                  {"I_R", p.I_R}, {"I_F", p.I_F}, {"r", p.r},     {"gamma_max", p.gamma_max}};
  json path = {{"kind", detail::kind_name(s.profile.kind)}, {"step", s.path_step}, {"length", s.path_length}};
  if (s.profile.kind == CurvatureKind::circle) path["kappa"] = s.profile.kappa_const;
  if (s.profile.kind == CurvatureKind::periodic) {
    path["s_T"] = s.profile.s_T;
    path["N"] = s.profile.N;
  }
  j["path"] = path;
  j["controller"] = {{"mode", mode_name(s.mode)}, {"law", law_name(g.law)}, {"wrapper_n", g.wrapper_n},
                     {"k1", g.k1},               {"k2", g.k2},              {"k_s", g.k_s},
                     {"T_sat", g.T_sat},         {"k_a", g.k_a},            {"a_lat_max", g.a_lat_max},
                     {"a_long_max", g.a_long_max}, {"v_max", g.v_max},      {"t_L", g.t_L},
                     {"preview_dist", g.preview_dist}};
  j["sim"] = {{"name", s.name},
              {"variant", std::string(variant_name(s.variant))},
              {"point", detail::point_name(s.point)},
              {"frame", s.frame == IntegrationFrame::absolute ? "absolute" : "path"},
              {"hold", s.hold == InputHold::continuous ? "continuous" : "zoh"},
              {"dt", s.dt},
              {"duration", s.duration},
              {"record_every", s.record_every},
              {"V", s.V},
              {"beta", s.beta},
              {"s0", s.s0},
              {"e0", s.e0},
              {"theta0", s.theta0},
              {"open_loop",
               {{"gamma0", s.open_loop.gamma0},
                {"gamma_amp", s.open_loop.gamma_amp},
                {"gamma_omega", s.open_loop.gamma_omega},
                {"force", s.open_loop.force},
                {"T_s", s.open_loop.T_s}}}};
  j["output"] = {{"dir", c.output.dir}, {"plot", c.output.plot}};
  return j.dump(2) + "\n";
}

/// Reads the flat vehicle parameter file: one "key = value" per line, '#'
/// starts a comment.
inline VehicleParams parse_params_file(const std::string & text)
{
  detail::json j = detail::json::object();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw ConfigError("params line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != val.size() || val.empty()) throw ConfigError("bad value for '" + key + "'");
    j[key] = v;
  }
  VehicleParams p;
  detail::read_vehicle({j, "params"}, p);
  p.validate();
  return p;
}

}  // namespace nonholo

#endif  // NONHOLO__CONFIG_HPP_
