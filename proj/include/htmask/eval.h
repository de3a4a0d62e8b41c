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
#ifndef HTMASK_EVAL_H_
#define HTMASK_EVAL_H_

// Mask-IoU instance matching, precision/recall curves and average precision.
//
// Matching is greedy: predictions are visited by descending score (input
// order breaks ties) and each claims the still-unmatched ground truth of the
// same category with the highest IoU at or above the threshold (lowest
// ground-truth index breaks ties). AP is the area under the precision
// envelope, i.e. all-point interpolation.

#include <span>
#include <string>
#include <vector>

#include "htmask/annotations.h"

namespace htmask {

inline constexpr double kDefaultIouThreshold = 0.5;

struct ConfusionCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct MatchPair {
  int pred = 0;
  int gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // in the order predictions were visited
  std::vector<int> unmatched_preds;
  std::vector<int> unmatched_gts;

  ConfusionCounts Counts() const {
    return {static_cast<int>(pairs.size()),
            static_cast<int>(unmatched_preds.size()),
            static_cast<int>(unmatched_gts.size())};
  }
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

// One point per ranked prediction; the origin is implicit.
struct PrCurve {
  std::vector<PrPoint> points;
};

// |a ∩ b| / |a ∪ b|. Throws DimensionMismatch and BothEmpty.
double MaskIou(const PixelMask& a, const PixelMask& b);

MatchResult MatchInstances(std::span<const Instance> preds,
                           std::span<const Instance> gts,
                           double iou_threshold = kDefaultIouThreshold);

// Builds the curve from predictions already flagged true/false positive and
// ranked best first. Throws NoGroundTruth when num_gt == 0.
PrCurve PrCurveFromRanked(const std::vector<bool>& is_tp, int num_gt);

PrCurve ComputePrCurve(std::span<const Instance> preds,
                       std::span<const Instance> gts,
                       double iou_threshold = kDefaultIouThreshold);

double AveragePrecision(const PrCurve& curve);

struct ClassMetrics {
  Category category = Category::kBuilding;
  double ap = 0.0;
  ConfusionCounts counts;
  int num_gt = 0;
  PrCurve curve;
};

struct MapReport {
  std::vector<ClassMetrics> classes;  // categories with ground truth only
  double map = 0.0;
};

// Pools every image's matches per category and ranks the pooled predictions
// by score (ties: image order, then within-image rank). Scenes are paired by
// image_id; any unpaired id throws ImageIdMismatch.
MapReport EvaluateScenes(std::span<const LabeledScene> preds,
                         std::span<const LabeledScene> gts,
                         double iou_threshold = kDefaultIouThreshold);

inline MapReport MapAt50(std::span<const LabeledScene> preds,
                         std::span<const LabeledScene> gts) {
  return EvaluateScenes(preds, gts, 0.5);
}

std::string MetricsCsv(const MapReport& report);
std::string PrCurveCsv(const MapReport& report);

}  // namespace htmask

#endif  // HTMASK_EVAL_H_
