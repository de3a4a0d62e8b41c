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
#ifndef HTMASK_REPORT_H_
#define HTMASK_REPORT_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "htmask/eval.h"

namespace htmask {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool markers = true;
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

// Self-contained SVG line chart. Output depends only on the inputs, with
// coordinates printed at fixed precision.
std::string LinePlotSvg(const PlotAxes& axes, std::span<const PlotSeries> series);

// One step-curve series per class of `report`.
std::string PrCurveSvg(const MapReport& report);

}  // namespace htmask

#endif  // HTMASK_REPORT_H_
