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

#ifndef NONHOLO__PATH_HPP_
#define NONHOLO__PATH_HPP_

#include "nonholo/angles.hpp"
#include "nonholo/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace nonholo
{

enum class CurvatureKind { straight, circle, periodic };

/// Curvature as a function of arc length.
///
/// The periodic kind is κ(s) = (κ_max / 2)(1 − cos(2πs / s_T)). It closes
/// into a figure with N corners when κ_max · s_T = 4π / N.
struct CurvatureProfile
{
  CurvatureKind kind = CurvatureKind::straight;
  double kappa_const = 0.0;
  double kappa_max = 0.0;
  double s_T = 0.0;
  int N = 0;

  bool operator==(const CurvatureProfile &) const = default;

  static CurvatureProfile straight() { return {}; }

  static CurvatureProfile circle(double kappa)
  {
    CurvatureProfile p;
    p.kind = CurvatureKind::circle;
    p.kappa_const = kappa;
    return p;
  }

  /// Closed periodic profile; κ_max follows from the closure condition.
  static CurvatureProfile periodic(double s_T, int N)
  {
    CurvatureProfile p;
    p.kind = CurvatureKind::periodic;
    p.s_T = s_T;
    p.N = N;
    p.kappa_max = N > 0 && s_T > 0.0 ? 4.0 * kPi / (N * s_T) : 0.0;
    p.validate();
    return p;
  }

  void validate() const
  {
    if (kind != CurvatureKind::periodic) {
      if (!std::isfinite(kappa_const)) {
        throw Error("curvature profile: kappa_const must be finite");
      }
      return;
    }
    if (!(s_T > 0.0)) throw Error("periodic profile: s_T must be positive");
    if (N < 2) throw Error("periodic profile: N must be at least 2");
    if (!(kappa_max >= 0.0)) throw Error("periodic profile: kappa_max must be non-negative");
    const double closure = 4.0 * kPi / N;
    if (std::abs(kappa_max * s_T - closure) > 1e-12 * closure) {
      throw Error("periodic profile: kappa_max * s_T must equal 4*pi/N");
    }
  }

  /// Length after which the curve closes on itself, if it does.
  std::optional<double> closed_length() const
  {
    switch (kind) {
      case CurvatureKind::straight:
        return std::nullopt;
      case CurvatureKind::circle:
        if (kappa_const == 0.0) return std::nullopt;
        return kTwoPi / std::abs(kappa_const);
      case CurvatureKind::periodic:
        return N * s_T;
    }
    return std::nullopt;
  }
};

inline double curvature_at(const CurvatureProfile & profile, double s)
{
  switch (profile.kind) {
    case CurvatureKind::straight:
      return 0.0;
    case CurvatureKind::circle:
      return profile.kappa_const;
    case CurvatureKind::periodic:
      return 0.5 * profile.kappa_max * (1.0 - std::cos(kTwoPi * s / profile.s_T));
  }
  return 0.0;
}

/// dκ/ds.
inline double curvature_rate(const CurvatureProfile & profile, double s)
{
  if (profile.kind != CurvatureKind::periodic) return 0.0;
  return kPi * profile.kappa_max / profile.s_T * std::sin(kTwoPi * s / profile.s_T);
}

/// d²κ/ds².
inline double curvature_accel(const CurvatureProfile & profile, double s)
{
  if (profile.kind != CurvatureKind::periodic) return 0.0;
  const double w = kTwoPi / profile.s_T;
  return 0.5 * profile.kappa_max * w * w * std::cos(w * s);
}

struct Pose2
{
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
};

struct PathSample
{
  double s;
  double x;
  double y;
  double psi;
  double kappa;
};

struct PathPoint
{
  double x;
  double y;
  double psi;
  double kappa;
};

namespace detail
{
// 5-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 5> kGlNodes = {
  -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGlWeights = {
  0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
  0.2369268850561891};
}  // namespace detail

/// Arc-length sampled planar path.
///
/// Between samples the curvature is linear in s, heading is its exact
/// integral and position is integrated by Gauss-Legendre quadrature, so the
/// interpolated curve is a clothoid spline whose curvature is exactly the
/// linearly interpolated κ. Closed tables wrap s modulo the perimeter; open
/// tables extend past their ends with the end curvature held constant.
class PathTable
{
public:
  PathTable(
    std::vector<PathSample> samples, bool closed,
    std::optional<CurvatureProfile> profile = std::nullopt)
  : samples_(std::move(samples)), closed_(closed), profile_(profile)
  {
    if (samples_.size() < 2) throw Error("path table needs at least two samples");
    step_ = samples_[1].s - samples_[0].s;
    if (!(step_ > 0.0)) throw Error("path table: s must be strictly increasing");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      const double ds = samples_[i].s - samples_[i - 1].s;
      if (!(ds > 0.0) || std::abs(ds - step_) > 1e-6 * step_) {
        throw Error("path table: samples must have a uniform step");
      }
    }
  }

  const std::vector<PathSample> & samples() const noexcept { return samples_; }
  double step() const noexcept { return step_; }
  bool closed() const noexcept { return closed_; }
  double start_s() const noexcept { return samples_.front().s; }
  double length() const noexcept { return samples_.back().s - samples_.front().s; }
  std::optional<double> perimeter() const
  {
    return closed_ ? std::optional<double>(length()) : std::nullopt;
  }
  const std::optional<CurvatureProfile> & profile() const noexcept { return profile_; }
  std::size_t segments() const noexcept { return samples_.size() - 1; }

  /// Maps s into the table's range for closed paths; identity otherwise.
  double wrap_s(double s) const
  {
    if (!closed_) return s;
    const double L = length();
    const double rel = s - start_s();
    return start_s() + (rel - L * std::floor(rel / L));
  }

  /// Linearly interpolated curvature.
  double curvature(double s) const
  {
    const auto [i, u] = locate(s);
    if (u <= 0.0 && !closed_ && i == 0) return samples_.front().kappa;
    if (u >= step_ && !closed_ && i + 1 == samples_.size() - 1) return samples_.back().kappa;
    const double a = samples_[i].kappa;
    const double b = samples_[i + 1].kappa;
    return a + (b - a) * (u / step_);
  }

  /// Slope of the interpolated curvature on the segment containing s.
  double curvature_slope(double s) const
  {
    const auto [i, u] = locate(s);
    if (!closed_ && (u < 0.0 || u > step_)) return 0.0;
    return (samples_[i + 1].kappa - samples_[i].kappa) / step_;
  }

  PathPoint evaluate(double s) const
  {
    const auto [i, u] = locate(s);
    const PathSample & a = samples_[i];
    double slope = (samples_[i + 1].kappa - a.kappa) / step_;
    if (!closed_ && (u < 0.0 || u > step_)) {
      // Extrapolation beyond an open end: hold the end curvature.
      const PathSample & end = u < 0.0 ? samples_.front() : samples_.back();
      const double du = u < 0.0 ? u : u - step_;
      return integrate_segment(end, 0.0, du);
    }
    return integrate_segment(a, slope, u);
  }

  /// max |κ| over [s0, s1] of the interpolated curvature.
  double max_abs_curvature(double s0, double s1) const
  {
    if (s1 < s0) std::swap(s0, s1);
    if (profile_) {
      const CurvatureProfile & p = *profile_;
      if (p.kind != CurvatureKind::periodic) return std::abs(p.kappa_const);
      // Peaks sit at s_T/2 + k s_T; between peaks κ is monotone.
      const double k = std::ceil((s0 - 0.5 * p.s_T) / p.s_T);
      if (0.5 * p.s_T + k * p.s_T <= s1) return p.kappa_max;
      return std::max(curvature_at(p, s0), curvature_at(p, s1));
    }
    double best = std::max(std::abs(curvature(s0)), std::abs(curvature(s1)));
    const double first = std::ceil((s0 - start_s()) / step_);
    const double last = std::floor((s1 - start_s()) / step_);
    for (double k = first; k <= last; k += 1.0) {
      best = std::max(best, std::abs(curvature(start_s() + k * step_)));
    }
    return best;
  }

private:
  std::pair<std::size_t, double> locate(double s) const
  {
    const double sw = wrap_s(s) - start_s();
    const std::size_t n = segments();
    double idx = std::floor(sw / step_);
    if (idx < 0.0) idx = 0.0;
    auto i = static_cast<std::size_t>(idx);
    if (i >= n) i = n - 1;
    return {i, sw - static_cast<double>(i) * step_};
  }

  PathPoint integrate_segment(const PathSample & a, double slope, double u) const
  {
    const auto heading = [&](double v) { return a.psi + a.kappa * v + 0.5 * slope * v * v; };
    double x = a.x;
    double y = a.y;
    // Sub-intervals no longer than one table step keep the quadrature exact
    // to rounding for the curvatures handled here.
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(u) / step_)));
    const double width = u / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double mid = (p + 0.5) * width;
      for (std::size_t k = 0; k < detail::kGlNodes.size(); ++k) {
        const double v = mid + 0.5 * width * detail::kGlNodes[k];
        const double w = 0.5 * width * detail::kGlWeights[k];
        const double h = heading(v);
        x += w * std::cos(h);
        y += w * std::sin(h);
      }
    }
    return {x, y, heading(u), a.kappa + slope * u};
  }

  std::vector<PathSample> samples_;
  bool closed_;
  std::optional<CurvatureProfile> profile_;
  double step_ = 0.0;
};

inline constexpr double kDefaultPathStep = 0.1;

/// Integrates dx/ds = cos ψ, dy/ds = sin ψ, dψ/ds = κ(s) with fixed-step RK4.
///
/// The step is shrunk so that the table length is an integer number of
/// steps. Periodic and circular profiles produce one closed lap; straight
/// profiles need an explicit length.
inline PathTable build_path(
  const CurvatureProfile & profile, double step = kDefaultPathStep, Pose2 start = {},
  std::optional<double> length = std::nullopt)
{
  profile.validate();
  if (!(step > 0.0)) throw Error("build_path: step must be positive");
  const auto closed_length = profile.closed_length();
  double L = 0.0;
  if (length) {
    L = *length;
  } else if (closed_length) {
    L = *closed_length;
  } else {
    throw Error("build_path: a straight path needs an explicit length");
  }
  if (!(L > 0.0)) throw Error("build_path: length must be positive");
  const bool closed = closed_length && std::abs(L - *closed_length) <= 1e-9 * L;

  const auto n = static_cast<std::size_t>(std::ceil(L / step - 1e-9));
  const double h = L / static_cast<double>(n);

  std::vector<PathSample> samples;
  samples.reserve(n + 1);
  double x = start.x;
  double y = start.y;
  double psi = start.psi;
  samples.push_back({0.0, x, y, psi, curvature_at(profile, 0.0)});
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) * h;
    const double k1 = curvature_at(profile, s);
    const double k2 = curvature_at(profile, s + 0.5 * h);
    const double k4 = curvature_at(profile, s + h);
    // ψ stage values; κ does not depend on the state so k2 == k3.
    const double p1 = psi;
    const double p2 = psi + 0.5 * h * k1;
    const double p3 = psi + 0.5 * h * k2;
    const double p4 = psi + h * k2;
    x += h / 6.0 * (std::cos(p1) + 2.0 * std::cos(p2) + 2.0 * std::cos(p3) + std::cos(p4));
    y += h / 6.0 * (std::sin(p1) + 2.0 * std::sin(p2) + 2.0 * std::sin(p3) + std::sin(p4));
    psi += h / 6.0 * (k1 + 4.0 * k2 + k4);
    const double s_next = static_cast<double>(i + 1) * h;
    samples.push_back({s_next, x, y, psi, curvature_at(profile, s_next)});
  }

  if (closed) {
    const double miss = std::hypot(samples.back().x - start.x, samples.back().y - start.y);
    if (miss > 1e-6 * L) {
      char buf[160];
      std::snprintf(
        buf, sizeof(buf), "path endpoint misses start by %.3e m (tolerance %.3e m)", miss,
        1e-6 * L);
      throw NonClosure(buf);
    }
  }
  return PathTable(std::move(samples), closed, profile);
}

/// Closest-point coordinates of a query point relative to a path.
struct PathQuery
{
  double s_C = 0.0;
  double e_C = 0.0;  ///< positive when the point is left of the path
  double psi_C = 0.0;
  double kappa_C = 0.0;
  double theta_C = 0.0;  ///< ψ − ψ_C wrapped by nearest-integer rounding
  double x_C = 0.0;
  double y_C = 0.0;
};

struct ProjectOptions
{
  /// Half-width of the hinted search window.
  double window = 10.0;
  double tolerance = 1e-12;
  int max_iterations = 50;
};

namespace detail
{

inline double lateral_offset(double px, double py, const PathPoint & c)
{
  return -(px - c.x) * std::sin(c.psi) + (py - c.y) * std::cos(c.psi);
}

// Newton iteration on the tangency condition (P − C(s)) · t(s) = 0 starting
// from s0, kept inside [lo, hi].
inline double refine_projection(
  const PathTable & table, double px, double py, double s0, double lo, double hi,
  const ProjectOptions & opt)
{
  double s = s0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const PathPoint c = table.evaluate(s);
    const double along = (px - c.x) * std::cos(c.psi) + (py - c.y) * std::sin(c.psi);
    if (along == 0.0) break;
    const double e = lateral_offset(px, py, c);
    const double denom = 1.0 - c.kappa * e;
    if (denom < 1e-9) {
      throw TubeSingularity("projection: point at or beyond the path's center of curvature");
    }
    double next = s + along / denom;
    next = std::clamp(next, lo, hi);
    const double delta = next - s;
    s = next;
    if (std::abs(delta) <= opt.tolerance * std::max(1.0, std::abs(s))) break;
  }
  return s;
}

inline PathQuery make_query(const PathTable & table, double px, double py, double psi, double s)
{
  const PathPoint c = table.evaluate(s);
  PathQuery q;
  q.s_C = s;
  q.x_C = c.x;
  q.y_C = c.y;
  q.psi_C = c.psi;
  q.kappa_C = c.kappa;
  q.e_C = lateral_offset(px, py, c);
  q.theta_C = wrap_angle(psi - c.psi);
  return q;
}

inline double cyclic_distance(double a, double b, std::optional<double> period)
{
  double d = std::abs(a - b);
  if (period) d = std::min(d, *period - d);
  return d;
}

}  // namespace detail

/// Projects (x, y) with heading ψ onto the path.
///
/// Without a hint every sample is scanned and the result is checked for
/// uniqueness; with a hint only a window around it is searched, which keeps
/// s_C continuous along a trajectory. The returned s_C is unwrapped around
/// the hint for closed paths.
inline PathQuery project(
  double x, double y, double psi, const PathTable & table,
  std::optional<double> hint = std::nullopt, const ProjectOptions & opt = {})
{
  const auto & samples = table.samples();
  const double h = table.step();
  const double s0 = table.start_s();

  if (hint) {
    const double centre = *hint;
    const double lo_k = std::floor((centre - opt.window - s0) / h);
    const double hi_k = std::ceil((centre + opt.window - s0) / h);
    double best_s = centre;
    double best_d = std::numeric_limits<double>::infinity();
    for (double k = lo_k; k <= hi_k; k += 1.0) {
      const double s = s0 + k * h;
      if (!table.closed() && (s < s0 - 0.5 * h || s > s0 + table.length() + 0.5 * h)) continue;
      const auto idx = static_cast<std::size_t>(std::lround((table.wrap_s(s) - s0) / h));
      const PathSample & p = samples[std::min(idx, samples.size() - 1)];
      const double d = std::hypot(x - p.x, y - p.y);
      if (d < best_d) {
        best_d = d;
        best_s = s;
      }
    }
    double lo = best_s - h;
    double hi = best_s + h;
    if (!table.closed()) {
      // Allow extrapolation past open ends.
      if (best_s <= s0 + 0.5 * h) lo = -std::numeric_limits<double>::infinity();
      if (best_s >= s0 + table.length() - 0.5 * h) hi = std::numeric_limits<double>::infinity();
    }
    const double s = detail::refine_projection(table, x, y, best_s, lo, hi, opt);
    return detail::make_query(table, x, y, psi, s);
  }

  // Global search.
  const std::size_t count = table.closed() ? samples.size() - 1 : samples.size();
  std::vector<double> dist(count);
  for (std::size_t i = 0; i < count; ++i) {
    dist[i] = std::hypot(x - samples[i].x, y - samples[i].y);
  }
  const auto at = [&](std::ptrdiff_t i) {
    if (table.closed()) {
      const auto n = static_cast<std::ptrdiff_t>(count);
      return dist[static_cast<std::size_t>(((i % n) + n) % n)];
    }
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(count)) {
      return std::numeric_limits<double>::infinity();
    }
    return dist[static_cast<std::size_t>(i)];
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (dist[i] < dist[best]) best = i;
  }
  const auto refine_at = [&](std::size_t i) {
    const double s = samples[i].s;
    double lo = s - h;
    double hi = s + h;
    if (!table.closed()) {
      if (i == 0) lo = -std::numeric_limits<double>::infinity();
      if (i + 1 == count) hi = std::numeric_limits<double>::infinity();
    }
    const double sr = detail::refine_projection(table, x, y, s, lo, hi, opt);
    const PathPoint c = table.evaluate(sr);
    return std::pair<double, double>{sr, std::hypot(x - c.x, y - c.y)};
  };
  auto [s_best, d_best] = refine_at(best);

  // Uniqueness: the best competing local minimum far enough away along the path.
  const double separation = std::max(1e-3 * table.length(), 2.0 * h);
  const auto period = table.perimeter();
  std::optional<std::size_t> rival;
  for (std::size_t i = 0; i < count; ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    if (!(dist[i] <= at(ii - 1) && dist[i] <= at(ii + 1))) continue;
    if (detail::cyclic_distance(samples[i].s, samples[best].s, period) <= separation) continue;
    if (dist[i] > dist[best] + h) continue;
    if (!rival || dist[i] < dist[*rival]) rival = i;
  }
  if (rival) {
    const auto [s_r, d_r] = refine_at(*rival);
    if (
      std::abs(d_r - d_best) <= 1e-9 &&
      detail::cyclic_distance(s_r, s_best, period) > separation) {
      throw AmbiguousProjection("projection: two equidistant closest points on the path");
    }
    if (d_r < d_best) {
      s_best = s_r;
      d_best = d_r;
    }
  }
  if (table.closed()) s_best = table.wrap_s(s_best);
  return detail::make_query(table, x, y, psi, s_best);
}

/// Time derivatives of the path coordinates of a moving point.
struct FrameRates
{
  double s_dot;
  double e_dot;
  double theta_dot;
};

inline FrameRates frame_rates(double x_dot, double y_dot, double psi_dot, const PathQuery & q)
{
  const double denom = 1.0 - q.kappa_C * q.e_C;
  if (std::abs(denom) < 1e-9) {
    throw TubeSingularity("frame_rates: 1 - kappa_C * e_C vanishes");
  }
  const double c = std::cos(q.psi_C);
  const double s = std::sin(q.psi_C);
  const double s_dot = (c * x_dot + s * y_dot) / denom;
  return {s_dot, -x_dot * s + y_dot * c, psi_dot - q.kappa_C * s_dot};
}

struct PointRates
{
  double x_dot;
  double y_dot;
  double psi_dot;
};

/// Inverse of frame_rates.
inline PointRates point_rates(const FrameRates & r, const PathQuery & q)
{
  const double c = std::cos(q.psi_C);
  const double s = std::sin(q.psi_C);
  const double g = 1.0 - q.kappa_C * q.e_C;
  return {
    g * r.s_dot * c - r.e_dot * s, g * r.s_dot * s + r.e_dot * c,
    q.kappa_C * r.s_dot + r.theta_dot};
}

/// Earth-frame pose of the point with path coordinates (s, e, θ).
inline Pose2 from_path_coordinates(const PathTable & table, double s, double e, double theta)
{
  const PathPoint c = table.evaluate(s);
  return {c.x - e * std::sin(c.psi), c.y + e * std::cos(c.psi), c.psi + theta};
}

inline void write_path_csv(std::ostream & out, const PathTable & table)
{
  out << "s,x,y,psi,kappa\n";
  char buf[192];
  for (const auto & p : table.samples()) {
    std::snprintf(
      buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n", p.s, p.x, p.y, p.psi, p.kappa);
    out << buf;
  }
}

/// Reads a table written by write_path_csv. The closed flag is inferred from
/// the endpoint gap and the net heading change.
inline PathTable read_path_csv(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line)) throw Error("path csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "s,x,y,psi,kappa") throw Error("path csv: unexpected header '" + line + "'");
  std::vector<PathSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::array<double, 5> v{};
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::string cell;
      if (!std::getline(row, cell, ',')) {
        throw Error("path csv: too few columns on line " + std::to_string(lineno));
      }
      try {
        std::size_t used = 0;
        v[k] = std::stod(cell, &used);
      } catch (const std::exception &) {
        throw Error("path csv: bad number on line " + std::to_string(lineno));
      }
    }
    samples.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  if (samples.size() < 2) throw Error("path csv: need at least two samples");
  const auto & a = samples.front();
  const auto & b = samples.back();
  const double L = b.s - a.s;
  const double turns = (b.psi - a.psi) / kTwoPi;
  const bool closed = std::hypot(b.x - a.x, b.y - a.y) <= 1e-6 * L &&
                      std::abs(turns - std::round(turns)) < 1e-6 && std::round(turns) != 0.0;
  return PathTable(std::move(samples), closed);
}

}  // namespace nonholo

#endif  // NONHOLO__PATH_HPP_
