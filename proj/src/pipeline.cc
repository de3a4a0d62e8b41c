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
#include "htmask/pipeline.h"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <optional>
#include <set>

#include "htmask/error.h"
#include "htmask/eval.h"
#include "htmask/image_io.h"
#include "htmask/random.h"
#include "htmask/report.h"
#include "json.hpp"
#include "parallel.h"

namespace htmask {

namespace {

using nlohmann::json;

[[noreturn]] void ConfigFail(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

json ParseJson(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    ConfigFail(where + ": " + e.what());
  }
}

void RejectUnknownKeys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) ConfigFail(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) ConfigFail(where + ": unknown key \"" + key + "\"");
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    ConfigFail(where + ": bad value for \"" + key + "\"");
  }
}

// Inline object or a path to a JSON file holding it.
json Section(const json& root, const char* key, const std::string& base_dir) {
  if (!root.contains(key)) return json::object();
  const json& v = root.at(key);
  if (v.is_string()) {
    std::filesystem::path path = v.get<std::string>();
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    std::string text;
    try {
      text = ReadFile(path.string());
    } catch (const Error& e) {
      ConfigFail(e.what());
    }
    return ParseJson(text, path.string());
  }
  return v;
}

void ReadGray(const json& obj, const char* key, GrayDistribution& out,
              const std::string& where) {
  if (!obj.contains(key)) return;
  const json& g = obj.at(key);
  const std::string sub = where + "." + key;
  RejectUnknownKeys(g, {"mean", "std"}, sub);
  Read(g, "mean", out.mean, sub);
  Read(g, "std", out.std, sub);
}

SceneSpec ParseScene(const json& j) {
  const std::string where = "scene";
  RejectUnknownKeys(j,
                    {"width", "height", "n_new", "n_old", "new_gray",
                     "old_gray", "background_gray", "building_size", "min_gap",
                     "seed"},
                    where);
  SceneSpec s;
  Read(j, "width", s.width, where);
  Read(j, "height", s.height, where);
  Read(j, "n_new", s.n_new, where);
  Read(j, "n_old", s.n_old, where);
  ReadGray(j, "new_gray", s.new_gray, where);
  ReadGray(j, "old_gray", s.old_gray, where);
  Read(j, "background_gray", s.background_gray, where);
  if (j.contains("building_size")) {
    const json& b = j.at("building_size");
    RejectUnknownKeys(b, {"min", "max"}, "scene.building_size");
    Read(b, "min", s.min_size, "scene.building_size");
    Read(b, "max", s.max_size, "scene.building_size");
  }
  Read(j, "min_gap", s.min_gap, where);
  Read(j, "seed", s.seed, where);
  return s;
}

DetectorSpec ParseDetector(const json& j, const std::string& where,
                           DetectorMode mode) {
  RejectUnknownKeys(j,
                    {"recall_rate", "vertex_jitter", "label_flip_rate",
                     "score_base", "score_noise", "seed"},
                    where);
  DetectorSpec d;
  Read(j, "recall_rate", d.recall_rate, where);
  Read(j, "vertex_jitter", d.vertex_jitter, where);
  Read(j, "label_flip_rate", d.label_flip_rate, where);
  Read(j, "score_base", d.score_base, where);
  Read(j, "score_noise", d.score_noise, where);
  Read(j, "seed", d.seed, where);
  d.mode = mode;
  return d;
}

std::uint64_t SceneSeed(const PipelineConfig& c, int index) {
  return DeriveSeed(c.seed, static_cast<std::uint64_t>(index));
}

DetectorSpec Seeded(DetectorSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

std::string MapColumn(double iou) {
  return fmt::format("map{}", static_cast<int>(std::lround(iou * 100)));
}

}  // namespace

void PipelineConfig::Validate() const {
  scene.Validate();
  r1.Validate();
  r2.Validate();
  if (sweep.empty()) ConfigFail("sweep needs at least one budget level");
  for (double b : sweep) {
    if (!(b > 0.0 && b <= 1.0)) {
      ConfigFail(fmt::format("sweep level {} outside (0, 1]", b));
    }
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    ConfigFail("iou outside (0, 1]");
  }
  if (n_scenes < 1) ConfigFail("n_scenes must be >= 1");
}

PipelineConfig ParsePipelineConfig(std::string_view text,
                                   const std::string& base_dir) {
  const json root = ParseJson(text, "config");
  RejectUnknownKeys(root,
                    {"scene", "r1", "r2", "sweep", "iou", "n_scenes", "seed",
                     "pool"},
                    "config");
  PipelineConfig c;
  c.scene = ParseScene(Section(root, "scene", base_dir));
  c.r1 = ParseDetector(Section(root, "r1", base_dir), "r1",
                       DetectorMode::kOneClass);
  c.r2 = ParseDetector(Section(root, "r2", base_dir), "r2",
                       DetectorMode::kTwoClass);
  Read(root, "sweep", c.sweep, "config");
  Read(root, "iou", c.iou_threshold, "config");
  Read(root, "n_scenes", c.n_scenes, "config");
  Read(root, "seed", c.seed, "config");
  Read(root, "pool", c.pool, "config");
  c.Validate();
  return c;
}

DetectorSpec DetectorAtBudget(const DetectorSpec& full, double budget) {
  DetectorSpec d = full;
  d.recall_rate = full.recall_rate * budget;
  d.label_flip_rate =
      full.label_flip_rate + (0.5 - full.label_flip_rate) * (1.0 - budget);
  return d;
}

std::string SceneName(int index) { return fmt::format("scene_{:03d}.png", index); }

std::vector<SceneBundle> SynthesizeDataset(const PipelineConfig& config) {
  config.Validate();
  std::vector<std::optional<SceneBundle>> slots(config.n_scenes);
  internal::ParallelFor(config.n_scenes, [&](int i) {
    const std::uint64_t seed = SceneSeed(config, i);
    SceneSpec spec = config.scene;
    spec.seed = seed;
    LabeledScene gt = GenerateScene(spec, SceneName(i));
    LabeledScene r1 = SimulateDetector(gt, Seeded(config.r1, DeriveSeed(seed, 3)));
    LabeledScene r2 = SimulateDetector(gt, Seeded(config.r2, DeriveSeed(seed, 2)));
    slots[i] = SceneBundle{std::move(gt), std::move(r1), std::move(r2)};
  });
  std::vector<SceneBundle> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

FusionOutcome FuseScenes(const std::vector<LabeledScene>& r1,
                         const std::vector<LabeledScene>& r2, bool pool) {
  if (r1.size() != r2.size()) {
    throw Error(ErrorCode::kImageIdMismatch, "R1 and R2 scene counts differ");
  }
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (r1[i].image_id != r2[i].image_id) {
      throw Error(ErrorCode::kImageIdMismatch,
                  r1[i].image_id + " paired with " + r2[i].image_id);
    }
  }
  const int n = static_cast<int>(r1.size());
  std::vector<std::optional<ThresholdModel>> per_image(n);
  if (!pool) {
    internal::ParallelFor(n, [&](int i) {
      try {
        per_image[i] = FitThreshold(r2[i]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoClassSamples &&
            e.code() != ErrorCode::kDegenerateThreshold) {
          throw;
        }
      }
    });
  }
  FusionOutcome out;
  std::optional<ThresholdModel> pooled;
  for (int i = 0; i < n; ++i) {
    if (per_image[i]) {
      out.models.push_back(*per_image[i]);
      continue;
    }
    if (!pooled) pooled = FitThresholdPooled(r2);
    out.models.push_back(*pooled);
    if (!pool) ++out.fallback_images;
  }
  out.r3.resize(n);
  internal::ParallelFor(n, [&](int i) { out.r3[i] = Fuse(r1[i], out.models[i]); });
  return out;
}

std::vector<LevelResult> RunPipeline(const PipelineConfig& config) {
  const std::vector<SceneBundle> data = SynthesizeDataset(config);
  const int n = static_cast<int>(data.size());
  std::vector<LabeledScene> gts;
  std::vector<LabeledScene> r1s;
  for (const SceneBundle& b : data) {
    gts.push_back(b.gt);
    r1s.push_back(b.r1);
  }

  std::vector<LevelResult> results;
  for (double budget : config.sweep) {
    const DetectorSpec level = DetectorAtBudget(config.r2, budget);
    std::vector<LabeledScene> r2s(n);
    internal::ParallelFor(n, [&](int i) {
      r2s[i] = SimulateDetector(
          gts[i], Seeded(level, DeriveSeed(SceneSeed(config, i), 2)));
    });
    const FusionOutcome fused = FuseScenes(r1s, r2s, config.pool);

    LevelResult r;
    r.budget = budget;
    r.r2_recall = level.recall_rate;
    r.r2_flip = level.label_flip_rate;
    r.r2_map = EvaluateScenes(r2s, gts, config.iou_threshold).map;
    r.r3_map = EvaluateScenes(fused.r3, gts, config.iou_threshold).map;
    r.fallback_images = fused.fallback_images;
    results.push_back(r);
  }
  return results;
}

std::string PipelineCsv(const std::vector<LevelResult>& levels,
                        double iou_threshold) {
  const std::string col = MapColumn(iou_threshold);
  std::string out = fmt::format(
      "budget,r2_recall,r2_flip,r2_{0},r3_{0},fallback_images\n", col);
  for (const LevelResult& r : levels) {
    out += fmt::format("{},{},{},{},{},{}\n", r.budget, r.r2_recall, r.r2_flip,
                       r.r2_map, r.r3_map, r.fallback_images);
  }
  return out;
}

std::string PipelineSvg(const std::vector<LevelResult>& levels,
                        double iou_threshold) {
  PlotSeries r2{"R2 two-class", {}, true};
  PlotSeries r3{"R3 fused", {}, true};
  for (const LevelResult& r : levels) {
    r2.points.emplace_back(r.budget, r.r2_map);
    r3.points.emplace_back(r.budget, r.r3_map);
  }
  PlotAxes axes;
  axes.title = fmt::format("mAP at IoU {} by two-class label budget", iou_threshold);
  axes.x_label = "label budget (fraction of full two-class set)";
  axes.y_label = fmt::format("mAP@{}", iou_threshold);
  const std::vector<PlotSeries> series = {r2, r3};
  return LinePlotSvg(axes, series);
}

}  // namespace htmask
