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
#include "htmask/eval.h"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "htmask/error.h"
#include "htmask/kernels.h"
#include "parallel.h"

namespace htmask {

namespace {

void CheckThreshold(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("IoU threshold {} outside (0, 1]", t));
  }
}

std::vector<int> RankByScore(std::span<const Instance> preds) {
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].score > preds[b].score;
  });
  return order;
}

std::vector<const PixelMask*> Masks(std::span<const Instance> instances) {
  std::vector<const PixelMask*> out;
  out.reserve(instances.size());
  for (const Instance& i : instances) out.push_back(&i.mask);
  return out;
}

// Greedy matching over a precomputed |preds| x |gts| IoU matrix.
MatchResult GreedyMatch(std::span<const Instance> preds,
                        std::span<const Instance> gts,
                        const std::vector<double>& iou, double threshold) {
  const int ng = static_cast<int>(gts.size());
  std::vector<bool> gt_taken(gts.size(), false);
  MatchResult result;
  for (int p : RankByScore(preds)) {
    int best = -1;
    double best_iou = threshold;
    for (int g = 0; g < ng; ++g) {
      if (gt_taken[g] || gts[g].category != preds[p].category) continue;
      const double v = iou[static_cast<std::size_t>(p) * ng + g];
      if (v > best_iou || (best < 0 && v >= best_iou)) {
        best = g;
        best_iou = v;
      }
    }
    if (best >= 0) {
      gt_taken[best] = true;
      result.pairs.push_back({p, best, best_iou});
    } else {
      result.unmatched_preds.push_back(p);
    }
  }
  for (int g = 0; g < ng; ++g) {
    if (!gt_taken[g]) result.unmatched_gts.push_back(g);
  }
  return result;
}

MatchResult MatchImpl(std::span<const Instance> preds,
                      std::span<const Instance> gts, double threshold) {
  CheckThreshold(threshold);
  const auto pm = Masks(preds);
  const auto gm = Masks(gts);
  return GreedyMatch(preds, gts, IouMatrix(pm, gm), threshold);
}

struct RankedPrediction {
  double score;
  int image;
  int rank;  // position in the image's score order
  bool tp;
};

}  // namespace

double MaskIou(const PixelMask& a, const PixelMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "masks differ in size");
  }
  if (a.empty() && b.empty()) {
    throw Error(ErrorCode::kBothEmpty, "IoU of two empty masks");
  }
  const std::int64_t inter = IntersectionCount(a, b);
  return static_cast<double>(inter) /
         static_cast<double>(a.area() + b.area() - inter);
}

MatchResult MatchInstances(std::span<const Instance> preds,
                           std::span<const Instance> gts,
                           double iou_threshold) {
  return MatchImpl(preds, gts, iou_threshold);
}

PrCurve PrCurveFromRanked(const std::vector<bool>& is_tp, int num_gt) {
  if (num_gt <= 0) {
    throw Error(ErrorCode::kNoGroundTruth, "recall undefined without ground truth");
  }
  PrCurve curve;
  curve.points.reserve(is_tp.size());
  int tp = 0;
  int seen = 0;
  for (bool hit : is_tp) {
    ++seen;
    if (hit) ++tp;
    curve.points.push_back({static_cast<double>(tp) / num_gt,
                            static_cast<double>(tp) / seen});
  }
  return curve;
}

PrCurve ComputePrCurve(std::span<const Instance> preds,
                       std::span<const Instance> gts, double iou_threshold) {
  if (gts.empty()) {
    throw Error(ErrorCode::kNoGroundTruth, "recall undefined without ground truth");
  }
  const MatchResult match = MatchImpl(preds, gts, iou_threshold);
  std::vector<bool> matched(preds.size(), false);
  for (const MatchPair& pair : match.pairs) matched[pair.pred] = true;
  std::vector<bool> ranked;
  for (int p : RankByScore(preds)) ranked.push_back(matched[p]);
  return PrCurveFromRanked(ranked, static_cast<int>(gts.size()));
}

double AveragePrecision(const PrCurve& curve) {
  const auto& pts = curve.points;
  std::vector<double> envelope(pts.size());
  double running = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    running = std::max(running, pts[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ap += (pts[i].recall - prev_recall) * envelope[i];
    prev_recall = pts[i].recall;
  }
  return ap;
}

MapReport EvaluateScenes(std::span<const LabeledScene> preds,
                         std::span<const LabeledScene> gts,
                         double iou_threshold) {
  CheckThreshold(iou_threshold);
  std::map<std::string, int> pred_index;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_index.emplace(preds[i].image_id, static_cast<int>(i)).second) {
      throw Error(ErrorCode::kImageIdMismatch,
                  "duplicate prediction image id " + preds[i].image_id);
    }
  }
  std::vector<int> pairing(gts.size());
  std::map<std::string, int> gt_seen;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!gt_seen.emplace(gts[i].image_id, static_cast<int>(i)).second) {
      throw Error(ErrorCode::kImageIdMismatch,
                  "duplicate ground-truth image id " + gts[i].image_id);
    }
    const auto it = pred_index.find(gts[i].image_id);
    if (it == pred_index.end()) {
      throw Error(ErrorCode::kImageIdMismatch,
                  "no predictions for image " + gts[i].image_id);
    }
    pairing[i] = it->second;
  }
  if (preds.size() != gts.size()) {
    for (const LabeledScene& p : preds) {
      if (!gt_seen.count(p.image_id)) {
        throw Error(ErrorCode::kImageIdMismatch,
                    "no ground truth for image " + p.image_id);
      }
    }
  }

  // Per-image matching is independent; results land in per-image slots so
  // the pooled ranking below does not depend on scheduling.
  const int n_images = static_cast<int>(gts.size());
  std::vector<MatchResult> matches(gts.size());
  std::vector<std::vector<int>> ranks(gts.size());
  internal::ParallelFor(n_images, [&](int i) {
    const LabeledScene& p = preds[pairing[i]];
    matches[i] = MatchImpl(p.instances, gts[i].instances, iou_threshold);
    ranks[i] = RankByScore(p.instances);
  });

  MapReport report;
  for (Category c : {Category::kBuilding, Category::kNew, Category::kOld}) {
    int num_gt = 0;
    for (const LabeledScene& g : gts) {
      for (const Instance& inst : g.instances) num_gt += inst.category == c;
    }
    if (num_gt == 0) continue;

    std::vector<RankedPrediction> pooled;
    for (int i = 0; i < n_images; ++i) {
      const LabeledScene& p = preds[pairing[i]];
      std::vector<bool> tp(p.instances.size(), false);
      for (const MatchPair& pair : matches[i].pairs) tp[pair.pred] = true;
      for (std::size_t r = 0; r < ranks[i].size(); ++r) {
        const int idx = ranks[i][r];
        if (p.instances[idx].category != c) continue;
        pooled.push_back({p.instances[idx].score, i, static_cast<int>(r),
                          tp[idx]});
      }
    }
    std::sort(pooled.begin(), pooled.end(),
              [](const RankedPrediction& a, const RankedPrediction& b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.image != b.image) return a.image < b.image;
                return a.rank < b.rank;
              });
    std::vector<bool> flags(pooled.size());
    ClassMetrics m;
    m.category = c;
    m.num_gt = num_gt;
    for (std::size_t k = 0; k < pooled.size(); ++k) {
      flags[k] = pooled[k].tp;
      if (pooled[k].tp) {
        ++m.counts.tp;
      } else {
        ++m.counts.fp;
      }
    }
    m.counts.fn = num_gt - m.counts.tp;
    m.curve = PrCurveFromRanked(flags, num_gt);
    m.ap = AveragePrecision(m.curve);
    report.classes.push_back(std::move(m));
  }
  if (!report.classes.empty()) {
    double sum = 0.0;
    for (const ClassMetrics& m : report.classes) sum += m.ap;
    report.map = sum / static_cast<double>(report.classes.size());
  }
  return report;
}

std::string MetricsCsv(const MapReport& report) {
  std::string out = "class,ap,tp,fp,fn,n_gt\n";
  ConfusionCounts total;
  int total_gt = 0;
  for (const ClassMetrics& m : report.classes) {
    out += fmt::format("{},{},{},{},{},{}\n", CategoryName(m.category), m.ap,
                       m.counts.tp, m.counts.fp, m.counts.fn, m.num_gt);
    total.tp += m.counts.tp;
    total.fp += m.counts.fp;
    total.fn += m.counts.fn;
    total_gt += m.num_gt;
  }
  out += fmt::format("mAP,{},{},{},{},{}\n", report.map, total.tp, total.fp,
                     total.fn, total_gt);
  return out;
}

std::string PrCurveCsv(const MapReport& report) {
  std::string out = "class,recall,precision\n";
  for (const ClassMetrics& m : report.classes) {
    for (const PrPoint& p : m.curve.points) {
      out += fmt::format("{},{},{}\n", CategoryName(m.category), p.recall,
                         p.precision);
    }
  }
  return out;
}

}  // namespace htmask
