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

// nonholo command-line front end: simulate, stability, sweep, path.

#include "nonholo/config.hpp"
#include "nonholo/nonholo.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nonholo;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

struct CommonOptions
{
  std::optional<std::string> out;
  std::optional<bool> plot;
};

/// --out beats NONHOLO_OUT, which beats the config's output.dir.
std::string output_dir(const CommonOptions & o, const std::string & fallback)
{
  if (o.out) return *o.out;
  if (const char * env = std::getenv("NONHOLO_OUT"); env && *env) return env;
  return fallback;
}

fs::path prepare_dir(const std::string & dir)
{
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

std::ofstream open_out(const fs::path & p)
{
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

std::vector<double> finite_or_nan(const SimTrace & tr, std::size_t c)
{
  std::vector<double> v;
  v.reserve(tr.rows.size());
  for (const auto & r : tr.rows) v.push_back(r[c]);
  return v;
}

void write_figure_svg(const fs::path & file, const SimTrace & tr, const Scenario & sc)
{
  std::vector<double> px;
  std::vector<double> py;
  for (const auto & s : tr.path->samples()) {
    px.push_back(s.x);
    py.push_back(s.y);
  }
  const auto t = finite_or_nan(tr, kT);
  std::vector<svg::Panel> panels;
  panels.push_back({"trajectory", "x [m]", "y [m]",
                    {{"path", px, py}, {"vehicle (G)", finite_or_nan(tr, kXG), finite_or_nan(tr, kYG)}},
                    true});
  panels.push_back({"path errors", "t [s]", "e_C [m], theta_C [rad]",
                    {{"e_C", t, finite_or_nan(tr, kEC)}, {"theta_C", t, finite_or_nan(tr, kThetaC)}}});
  panels.push_back({"steering", "t [s]", "angle [rad]",
                    {{"gamma", t, finite_or_nan(tr, kGamma)},
                     {"gamma_ff", t, finite_or_nan(tr, kGammaFF)},
                     {"gamma_fb", t, finite_or_nan(tr, kGammaFB)}}});
  svg::Panel acc{"accelerations", "t [s]", "[m/s^2]", {{"a_lat", t, finite_or_nan(tr, kALat)}}};
  if (sc.mode == ControlMode::steer_longitudinal) {
    acc.series.push_back({"a_des", t, finite_or_nan(tr, kADes)});
    acc.series.push_back({"a1", t, finite_or_nan(tr, kA1)});
    acc.series.push_back({"a2", t, finite_or_nan(tr, kA2)});
  }
  panels.push_back(acc);
  if (sc.mode == ControlMode::steer_longitudinal) {
    panels.push_back({"speed", "t [s]", "[m/s]",
                      {{"sigma1", t, finite_or_nan(tr, kSigma1)}, {"v_des", t, finite_or_nan(tr, kVDes)}}});
    panels.push_back({"force-to-weight ratios", "t [s]", "mu",
                      {{"mu_R", t, finite_or_nan(tr, kMuR)}, {"mu_F", t, finite_or_nan(tr, kMuF)}}});
  }
  if (sc.mode == ControlMode::steer_torque) {
    panels.push_back({"steering torque", "t [s]", "T_s [Nm]", {{"T_s", t, finite_or_nan(tr, kTs)}}});
  }
  std::ofstream f = open_out(file);
  svg::write_panels(f, panels);
}

struct Summary
{
  double settling_time = std::numeric_limits<double>::quiet_NaN();
  double rms_e = 0.0;
  double peak_a_lat = 0.0;
  int zero_crossings = 0;
  double overshoot = 0.0;
};

/// Settling uses a 5 cm band on e_C; overshoot is the largest excursion on
/// the opposite side of the initial error.
Summary summarize(const SimTrace & tr)
{
  Summary s;
  double acc = 0.0;
  std::size_t n = 0;
  double sign0 = 0.0;
  double last = std::numeric_limits<double>::quiet_NaN();
  for (const auto & r : tr.rows) {
    s.peak_a_lat = std::max(s.peak_a_lat, std::abs(r[kALat]));
    const double e = r[kEC];
    if (!std::isfinite(e)) continue;
    acc += e * e;
    ++n;
    if (sign0 == 0.0 && e != 0.0) sign0 = e > 0.0 ? 1.0 : -1.0;
    if (std::isfinite(last) && last * e < 0.0) ++s.zero_crossings;
    last = e;
    if (sign0 != 0.0 && e * sign0 < 0.0) s.overshoot = std::max(s.overshoot, std::abs(e));
  }
  s.rms_e = n ? std::sqrt(acc / static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
  for (auto it = tr.rows.rbegin(); it != tr.rows.rend(); ++it) {
    if (!std::isfinite((*it)[kEC])) break;
    if (std::abs((*it)[kEC]) >= 0.05) break;
    s.settling_time = (*it)[kT];
  }
  return s;
}

void print_summary(const Scenario & sc, const Summary & s, const fs::path & trace)
{
  std::printf("scenario %s (%s, mode %s)\n", sc.name.c_str(), std::string(variant_name(sc.variant)).c_str(),
              mode_name(sc.mode));
  std::printf("  trace          %s\n", trace.string().c_str());
  if (std::isfinite(s.settling_time)) {
    std::printf("  settling time  %.3f s (|e_C| < 0.05 m)\n", s.settling_time);
  } else {
    std::printf("  settling time  not settled\n");
  }
  std::printf("  RMS e_C        %.6g m\n", s.rms_e);
  std::printf("  peak a_lat     %.6g m/s^2\n", s.peak_a_lat);
  if (s.zero_crossings == 0) {
    std::printf("  overshoot      none\n");
  } else {
    std::printf("  overshoot      %.6g m (%d zero crossings of e_C)\n", s.overshoot, s.zero_crossings);
  }
}

int cmd_simulate(
  const CommonOptions & common, const std::string & figure, const std::string & config_path,
  std::optional<double> dt, std::optional<std::uint64_t> seed, bool dump)
{
  Config cfg;
  if (!figure.empty()) cfg.scenario = named_scenario(figure);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config(ss.str(), cfg);
  }
  if (figure.empty() && config_path.empty()) throw ConfigError("simulate needs --figure or --config");
  if (dt) cfg.scenario.dt = *dt;
  if (common.plot) cfg.output.plot = *common.plot;
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> e(-10.0, 10.0);
    std::uniform_real_distribution<double> th(-deg2rad(30.0), deg2rad(30.0));
    cfg.scenario.e0 = e(rng);
    cfg.scenario.theta0 = th(rng);
  }
  cfg.scenario.validate();
  if (dump) {
    std::cout << dump_config(cfg);
    return 0;
  }
  const fs::path dir = prepare_dir(output_dir(common, cfg.output.dir));
  const SimTrace tr = run_scenario(cfg.scenario);
  const fs::path trace = dir / "trace.csv";
  {
    std::ofstream f = open_out(trace);
    write_trace_csv(f, tr);
  }
  if (cfg.output.plot) write_figure_svg(dir / (cfg.scenario.name + ".svg"), tr, cfg.scenario);
  print_summary(cfg.scenario, summarize(tr), trace);
  return 0;
}

struct GridAxis
{
  double lo;
  double hi;
  int n;

  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

int cmd_stability(
  const CommonOptions & common, std::optional<double> k1, std::optional<double> k2,
  std::vector<double> k1_range, std::vector<double> k2_range, std::vector<double> kappas, double V,
  double l, double band)
{
  const auto axis = [](const std::vector<double> & r, std::optional<double> point, const char * name) {
    if (point) return GridAxis{*point, *point, 1};
    if (r.size() != 3) throw ConfigError(std::string(name) + " range needs lo hi n");
    const GridAxis a{r[0], r[1], static_cast<int>(r[2])};
    if (!(a.hi > a.lo) || a.n < 2 || r[2] != static_cast<double>(a.n)) {
      throw ConfigError(std::string("bad ") + name + " range: need lo < hi and integer n >= 2");
    }
    return a;
  };
  const GridAxis a1 = axis(k1_range, k1, "k1");
  const GridAxis a2 = axis(k2_range, k2, "k2");
  if (!(V > 0.0) || !(l > 0.0)) throw ConfigError("V and l must be positive");
  const fs::path dir = prepare_dir(output_dir(common, "out"));
  std::ofstream f = open_out(dir / "stability.csv");
  f << "k1,k2,kappa_star,criterion,eig_max_real,agree\n";
  const bool single = a1.n == 1 && a2.n == 1;
  for (double kappa : kappas) {
    const double bound = kappa * kappa * l / (1.0 + kappa * kappa * l * l);
    int total = 0;
    int agree = 0;
    int banded = 0;
    for (int i = 0; i < a1.n; ++i) {
      for (int j = 0; j < a2.n; ++j) {
        const double x = a1.at(i);
        const double y = a2.at(j);
        const StabilityVerdict v = kinematic_stability(kappa, V, l, x, y);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%s,%.12g,%d\n", x, y, kappa,
                      v.criterion_stable ? "stable" : "unstable", v.max_real, v.agree ? 1 : 0);
        f << buf;
        if (std::abs(x) < band || std::abs(x * y - bound) < band) {
          ++banded;
          continue;
        }
        ++total;
        if (v.agree) ++agree;
        if (single) {
          std::printf("k1=%g k2=%g kappa*=%g: %s\n", x, y, kappa, v.stable ? "stable" : "unstable");
          for (const auto & z : v.eigenvalues) std::printf("  eigenvalue %.6f %+.6fi\n", z.real(), z.imag());
        }
      }
    }
    std::printf("kappa*=%g: %d / %d points agree (%.1f%%), %d inside the %g boundary band\n", kappa, agree,
                total, total ? 100.0 * agree / total : 100.0, banded, band);
  }
  std::printf("wrote %s\n", (dir / "stability.csv").string().c_str());
  return 0;
}

std::string value_tag(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void write_wrapper_curves(const fs::path & dir, const std::vector<double> & values, bool plot)
{
  std::vector<svg::Panel> panels = {{"g_n(x)", "x", "g_n", {}}, {"g_n'(x)", "x", "g_n'", {}}};
  for (double v : values) {
    const int n = static_cast<int>(v);
    const WrapperSpec spec{n, 1.0};
    std::ofstream f = open_out(dir / ("wrapper_n" + value_tag(v) + ".csv"));
    f << "x,g,g_prime\n";
    svg::Series g{"n=" + value_tag(v), {}, {}};
    svg::Series gp{"n=" + value_tag(v), {}, {}};
    for (int i = 0; i <= 400; ++i) {
      const double x = -3.0 + 6.0 * i / 400.0;
      const double gv = wrapper(spec, x);
      const double dv = wrapper_deriv(spec, x);
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", x, gv, dv);
      f << buf;
      g.x.push_back(x);
      g.y.push_back(gv);
      gp.x.push_back(x);
      gp.y.push_back(dv);
    }
    panels[0].series.push_back(g);
    panels[1].series.push_back(gp);
  }
  if (plot) {
    std::ofstream f = open_out(dir / "wrapper.svg");
    svg::write_panels(f, panels);
  }
}

int cmd_sweep(
  const CommonOptions & common, const std::string & param, std::vector<double> values,
  const std::string & figure, std::optional<double> dt)
{
  static const std::vector<std::string> known = {"t_L", "wrapper_n", "a_lat_max", "N", "s_T"};
  if (std::find(known.begin(), known.end(), param) == known.end()) {
    throw ConfigError("unknown sweep parameter '" + param + "' (expected t_L, wrapper_n, a_lat_max, N or s_T)");
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::string base_name = figure;
  if (base_name.empty()) {
    base_name = param == "t_L" ? "fig17" : param == "a_lat_max" ? "fig20" : "fig16";
  }
  const Scenario base = named_scenario(base_name);
  const bool plot = common.plot.value_or(true);

  std::vector<Scenario> runs;
  for (double v : values) {
    Scenario s = base;
    if (dt) s.dt = *dt;
    s.name = base_name + "_" + param + "_" + value_tag(v);
    if (param == "t_L") s.gains.t_L = v;
    if (param == "a_lat_max") s.gains.a_lat_max = v;
    if (param == "wrapper_n") {
      if (v < 0 || v != std::floor(v)) throw ConfigError("wrapper_n values must be non-negative integers");
      s.gains.wrapper_n = static_cast<int>(v);
    }
    const bool periodic = s.profile.kind == CurvatureKind::periodic;
    if (param == "N" || param == "s_T") {
      if (!periodic) throw ConfigError("sweeping " + param + " needs a periodic base scenario");
      if (param == "N" && (v < 2 || v != std::floor(v))) throw ConfigError("N values must be integers >= 2");
      s.profile = param == "N" ? CurvatureProfile::periodic(s.profile.s_T, static_cast<int>(v))
                               : CurvatureProfile::periodic(v, s.profile.N);
    }
    s.validate();
    runs.push_back(s);
  }

  const fs::path dir = prepare_dir(output_dir(common, "out"));
  if (param == "wrapper_n") write_wrapper_curves(dir, values, plot);

  std::vector<std::future<SimTrace>> jobs;
  for (const auto & s : runs) jobs.push_back(std::async(std::launch::async, [s] { return run_scenario(s); }));

  std::ofstream cmp = open_out(dir / "comparison.csv");
  cmp << param << ",rms_e_C,rms_e_C_second_half,max_abs_e_C,peak_a_lat\n";
  std::vector<svg::Panel> paths;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const SimTrace tr = jobs[i].get();
    {
      std::ofstream f = open_out(dir / ("trace_" + runs[i].name + ".csv"));
      write_trace_csv(f, tr);
    }
    const Summary sm = summarize(tr);
    const double half = rms_lateral_error(tr, runs[i].duration / 2.0, runs[i].duration);
    double max_e = 0.0;
    for (const auto & r : tr.rows) max_e = std::max(max_e, std::abs(r[kEC]));
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n", values[i], sm.rms_e, half, max_e,
                  sm.peak_a_lat);
    cmp << buf;
    std::printf("%s=%-8g RMS e_C %.6g m (second half %.6g m)\n", param.c_str(), values[i], sm.rms_e, half);
    if (param == "N" || param == "s_T") {
      svg::Series ser{"", {}, {}};
      for (const auto & p : tr.path->samples()) {
        ser.x.push_back(p.x);
        ser.y.push_back(p.y);
      }
      paths.push_back({param + " = " + value_tag(values[i]), "x [m]", "y [m]", {ser}, true});
    }
  }
  if (plot && !paths.empty()) {
    std::ofstream f = open_out(dir / "paths.svg");
    svg::write_panels(f, paths, 2);
  }
  std::printf("wrote %s\n", (dir / "comparison.csv").string().c_str());
  return 0;
}

int cmd_path(
  const CommonOptions & common, const std::string & kind, double s_T, int N, double kappa, double step,
  double length)
{
  CurvatureProfile prof;
  if (kind == "periodic") {
    prof = CurvatureProfile::periodic(s_T, N);
  } else if (kind == "circle") {
    prof = CurvatureProfile::circle(kappa);
  } else if (kind == "straight") {
    prof = CurvatureProfile::straight();
  } else {
    throw ConfigError("unknown path kind '" + kind + "'");
  }
  if (!(step > 0.0)) throw ConfigError("path step must be positive");
  std::optional<double> len;
  if (!prof.closed_length()) {
    if (!(length > 0.0)) throw ConfigError("open paths need a positive --length");
    len = length;
  }
  const PathTable t = build_path(prof, step, {}, len);
  const fs::path dir = prepare_dir(output_dir(common, "out"));
  {
    std::ofstream f = open_out(dir / "path.csv");
    write_path_csv(f, t);
  }
  std::printf("%s path: length %.6f m, %zu samples, %s\n", kind.c_str(), t.length(), t.samples().size(),
              t.closed() ? "closed" : "open");
  if (common.plot.value_or(true)) {
    svg::Series xy{"", {}, {}};
    svg::Series k{"", {}, {}};
    for (const auto & p : t.samples()) {
      xy.x.push_back(p.x);
      xy.y.push_back(p.y);
      k.x.push_back(p.s);
      k.y.push_back(p.kappa);
    }
    std::ofstream f = open_out(dir / "path.svg");
    svg::write_panels(f, {{"path", "x [m]", "y [m]", {xy}, true}, {"curvature", "s [m]", "kappa [1/m]", {k}}});
  }
  return 0;
}

void add_common(CLI::App * sub, CommonOptions & o)
{
  sub->add_option("--out", o.out, "Output directory (overrides NONHOLO_OUT and the config)");
  sub->add_flag_function(
    "--plot,!--no-plot", [&o](std::int64_t n) { o.plot = n > 0; }, "Write SVG plots");
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"nonholo: single-track vehicle models, path-following control and analysis"};
  app.require_subcommand(1);
  CommonOptions common;

  auto * sim = app.add_subcommand("simulate", "Run a scenario from a config file or a named figure");
  std::string figure;
  std::string config;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  bool dump = false;
  sim->add_option("--figure", figure, "Named scenario: fig13 fig14 fig16 fig17 fig18 fig20 fig21");
  sim->add_option("--config", config, "JSON scenario config");
  sim->add_option("--dt", dt, "Override the time step [s]");
  sim->add_option("--seed", seed, "Draw random initial errors from this seed");
  sim->add_flag("--dump-config", dump, "Print the fully resolved config and exit");
  add_common(sim, common);

  auto * stab = app.add_subcommand("stability", "Kinematic stability map: criterion vs eigenvalues");
  std::optional<double> k1;
  std::optional<double> k2;
  std::vector<double> k1_range = {-2.0, 0.5, 50};
  std::vector<double> k2_range = {-0.05, 0.1, 50};
  std::vector<double> kappas = {0.0};
  double V = 20.0;
  double l = VehicleParams{}.l;
  double band = 1e-8;
  stab->add_option("--k1", k1, "Single k1 value");
  stab->add_option("--k2", k2, "Single k2 value");
  stab->add_option("--k1-range", k1_range, "lo hi n")->expected(3);
  stab->add_option("--k2-range", k2_range, "lo hi n")->expected(3);
  stab->add_option("--kappa", kappas, "Reference curvatures kappa*")->expected(1, 100);
  stab->add_option("--V", V, "Speed [m/s]");
  stab->add_option("--l", l, "Wheelbase [m]");
  stab->add_option("--band", band, "Boundary band excluded from the agreement count");
  add_common(stab, common);

  auto * sweep = app.add_subcommand("sweep", "Run a scenario for several values of one parameter");
  std::string param;
  std::vector<double> values;
  std::string base;
  sweep->add_option("--param", param, "t_L, wrapper_n, a_lat_max, N or s_T")->required();
  sweep->add_option("--values", values, "Parameter values")->required()->expected(1, 1000);
  sweep->add_option("--figure", base, "Base scenario (default depends on the parameter)");
  sweep->add_option("--dt", dt, "Override the time step [s]");
  add_common(sweep, common);

  auto * path = app.add_subcommand("path", "Generate a reference path");
  std::string kind = "periodic";
  double s_T = 250.0;
  int N = 4;
  double kappa = 1.0 / 200.0;
  double step = kDefaultPathStep;
  double length = 1000.0;
  path->add_option("--kind", kind, "straight, circle or periodic");
  path->add_option("--s-T", s_T, "Curvature period [m]");
  path->add_option("--N", N, "Number of corners");
  path->add_option("--kappa", kappa, "Circle curvature [1/m]");
  path->add_option("--step", step, "Sample spacing [m]");
  path->add_option("--length", length, "Length of open paths [m]");
  add_common(path, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common, figure, config, dt, seed, dump);
    if (stab->parsed()) return cmd_stability(common, k1, k2, k1_range, k2_range, kappas, V, l, band);
    if (sweep->parsed()) return cmd_sweep(common, param, values, base, dt);
    if (path->parsed()) return cmd_path(common, kind, s_T, N, kappa, step, length);
  } catch (const GuardTripped & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitGuard;
  } catch (const ConfigError & e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NonClosure & e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
