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

// Static SVG line plots arranged as a grid of panels.

#ifndef NONHOLO__SVG_HPP_
#define NONHOLO__SVG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace nonholo::svg
{

struct Series
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel
{
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  /// Same scale on both axes, for trajectories.
  bool equal_axes = false;
};

namespace detail
{

inline const char * kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

inline std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string escape(const std::string & s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v)
  {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void finish()
  {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-9, 0.5 * std::abs(hi));
      lo -= pad;
      hi += pad;
    }
  }
};

inline void draw_panel(std::ostream & out, const Panel & p, double ox, double oy, double w, double h)
{
  const double ml = 70, mr = 15, mt = 28, mb = 42;
  const double pw = w - ml - mr;
  const double ph = h - mt - mb;
  Range rx;
  Range ry;
  for (const auto & s : p.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        rx.add(s.x[i]);
        ry.add(s.y[i]);
      }
    }
  }
  rx.finish();
  ry.finish();
  if (p.equal_axes) {
    const double scale = std::max((rx.hi - rx.lo) / pw, (ry.hi - ry.lo) / ph);
    const double cx = 0.5 * (rx.lo + rx.hi);
    const double cy = 0.5 * (ry.lo + ry.hi);
    rx.lo = cx - 0.5 * scale * pw;
    rx.hi = cx + 0.5 * scale * pw;
    ry.lo = cy - 0.5 * scale * ph;
    ry.hi = cy + 0.5 * scale * ph;
  }
  const auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  const auto Y = [&](double v) { return oy + mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  out << "<rect x=\"" << num(ox + ml) << "\" y=\"" << num(oy + mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    out << "<text x=\"" << num(X(vx)) << "\" y=\"" << num(oy + mt + ph + 16)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(vx) << "</text>\n";
    out << "<text x=\"" << num(ox + ml - 6) << "\" y=\"" << num(Y(vy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(vy) << "</text>\n";
  }
  out << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + 18)
      << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(p.title) << "</text>\n";
  out << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + h - 6)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(p.xlabel) << "</text>\n";
  out << "<text transform=\"translate(" << num(ox + 14) << "," << num(oy + mt + ph / 2)
      << ") rotate(-90)\" font-size=\"12\" text-anchor=\"middle\">" << escape(p.ylabel) << "</text>\n";

  for (std::size_t si = 0; si < p.series.size(); ++si) {
    const Series & s = p.series[si];
    const char * colour = kPalette[si % std::size(kPalette)];
    std::string pts;
    const auto flush = [&] {
      if (!pts.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.3\" points=\"" << pts
            << "\"/>\n";
      }
      pts.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
    }
    flush();
    if (!s.label.empty()) {
      const double ly = oy + mt + 14 + 14 * static_cast<double>(si);
      out << "<text x=\"" << num(ox + ml + pw - 6) << "\" y=\"" << num(ly) << "\" font-size=\"11\" fill=\""
          << colour << "\" text-anchor=\"end\">" << escape(s.label) << "</text>\n";
    }
  }
}

}  // namespace detail

/// Writes the panels row by row, `columns` per row.
inline void write_panels(
  std::ostream & out, const std::vector<Panel> & panels, int columns = 2, double panel_w = 460,
  double panel_h = 320)
{
  const int cols = std::max(1, columns);
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const double W = panel_w * cols;
  const double H = panel_h * std::max(1, rows);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(W) << "\" height=\""
      << detail::num(H) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double ox = panel_w * static_cast<double>(i % cols);
    const double oy = panel_h * static_cast<double>(i / cols);
    detail::draw_panel(out, panels[i], ox, oy, panel_w, panel_h);
  }
  out << "</svg>\n";
}

}  // namespace nonholo::svg

#endif  // NONHOLO__SVG_HPP_
