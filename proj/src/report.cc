/* Copyright 2026 The HTMask Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "htmask/report.h"

#include <fmt/format.h>

namespace htmask {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string LinePlotSvg(const PlotAxes& axes, std::span<const PlotSeries> series) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_span = axes.x_max > axes.x_min ? axes.x_max - axes.x_min : 1.0;
  const double y_span = axes.y_max > axes.y_min ? axes.y_max - axes.y_min : 1.0;
  auto sx = [&](double x) { return kLeft + (x - axes.x_min) / x_span * plot_w; };
  auto sy = [&](double y) {
    return kTop + plot_h - (y - axes.y_min) / y_span * plot_h;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
      kLeft + plot_w / 2, Escape(axes.title));

  // Grid and tick labels at tenths of each axis.
  for (int i = 0; i <= 10; ++i) {
    const double fx = axes.x_min + x_span * i / 10.0;
    const double fy = axes.y_min + y_span * i / 10.0;
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
        "stroke=\"#e0e0e0\"/>\n",
        sx(fx), kTop, kTop + plot_h);
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
        "stroke=\"#e0e0e0\"/>\n",
        kLeft, sy(fy), kLeft + plot_w);
    if (i % 2 == 0) {
      svg += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.2f}</text>\n",
          sx(fx), kTop + plot_h + 18, fx);
      svg += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n",
          kLeft - 6, sy(fy) + 4, fy);
    }
  }
  svg += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
      "fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
      kLeft + plot_w / 2, kHeight - 18, Escape(axes.x_label));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
      kTop + plot_h / 2, Escape(axes.y_label));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    const PlotSeries& ser = series[s];
    std::string pts;
    for (const auto& [x, y] : ser.points) {
      pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", sx(x), sy(y));
    }
    if (!pts.empty()) {
      svg += fmt::format(
          "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
          "points=\"{}\"/>\n",
          colour, pts);
    }
    if (ser.markers) {
      for (const auto& [x, y] : ser.points) {
        svg += fmt::format(
            "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", sx(x),
            sy(y), colour);
      }
    }
    const double ly = kTop + 10 + 20.0 * s;
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
        "stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4:.2f}\" y=\"{5:.2f}\">{6}</text>\n",
        kLeft + plot_w + 12, ly, kLeft + plot_w + 36, colour,
        kLeft + plot_w + 42, ly + 4, Escape(ser.name));
  }
  svg += "</svg>\n";
  return svg;
}

std::string PrCurveSvg(const MapReport& report) {
  std::vector<PlotSeries> series;
  for (const ClassMetrics& m : report.classes) {
    PlotSeries s;
    s.name = fmt::format("{} (AP {:.3f})", CategoryName(m.category), m.ap);
    s.markers = false;
    double prev_recall = 0.0;
    for (const PrPoint& p : m.curve.points) {
      s.points.emplace_back(prev_recall, p.precision);
      s.points.emplace_back(p.recall, p.precision);
      prev_recall = p.recall;
    }
    series.push_back(std::move(s));
  }
  PlotAxes axes;
  axes.title = fmt::format("Precision-recall (mAP {:.3f})", report.map);
  axes.x_label = "recall";
  axes.y_label = "precision";
  return LinePlotSvg(axes, series);
}

}  // namespace htmask
