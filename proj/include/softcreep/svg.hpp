// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "softcreep/errors.hpp"

namespace softcreep {

// One labeled curve for plotting.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Rounds a raw interval up to a 1/2/5 times power-of-ten step.
inline double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double step = r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0;
  return step * mag;
}

}  // namespace detail

// Minimal self-contained line chart. Non-finite points break the line
// rather than aborting, so flagged or missing values leave visible gaps.
inline std::string line_chart_svg(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<SvgSeries>& series,
                                  int width = 860, int height = 520) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr int kPaletteSize = 6;

  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  bool any = false;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw ConfigError("chart series x and y lengths disagree");
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
      if (!any) {
        x0 = x1 = s.x[j];
        y0 = y1 = s.y[j];
        any = true;
      } else {
        x0 = std::min(x0, s.x[j]);
        x1 = std::max(x1, s.x[j]);
        y0 = std::min(y0, s.y[j]);
        y1 = std::max(y1, s.y[j]);
      }
    }
  }
  if (!any) throw ConfigError("chart has no finite points");
  if (x1 - x0 < 1e-300) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-300) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double ml = 72, mr = 24, mt = 48, mb = 56;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) +
         "\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" +
         title + "</text>\n";

  const auto fmt = [](double v) { return detail::tick_label(v); };
  const double xs = detail::nice_step(x1 - x0, 6);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    const double gx = px(t);
    svg += "<line x1=\"" + fmt(gx) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(gx) +
           "\" y2=\"" + fmt(mt + ph) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(gx) + "\" y=\"" + fmt(mt + ph + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" +
           detail::tick_label(t) + "</text>\n";
  }
  const double ys = detail::nice_step(y1 - y0, 5);
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    const double gy = py(t);
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(gy) + "\" x2=\"" +
           fmt(ml + pw) + "\" y2=\"" + fmt(gy) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(gy + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::tick_label(t) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
         "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" +
         fmt(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" +
         x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " +
         fmt(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    std::string points;
    bool open = false;
    for (std::size_t j = 0; j < series[si].x.size(); ++j) {
      const double x = series[si].x[j];
      const double y = series[si].y[j];
      if (!std::isfinite(x) || !std::isfinite(y)) {
        if (open) {
          svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                 "\" stroke-width=\"1.6\" points=\"" + points + "\"/>\n";
          points.clear();
          open = false;
        }
        continue;
      }
      points += fmt(px(x)) + "," + fmt(py(y)) + " ";
      open = true;
    }
    if (open)
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.6\" points=\"" + points + "\"/>\n";
    const double lx = ml + pw - 150;
    const double ly = mt + 16 + 18 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
           fmt(lx + 24) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(lx + 30) + "\" y=\"" + fmt(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + series[si].label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace softcreep
