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
#ifndef HTMASK_PIPELINE_H_
#define HTMASK_PIPELINE_H_

// Synthetic experiment: a set of scenes, a strong one-class detector (R1),
// and a two-class detector (R2) swept over label budgets. At each budget
// the fused result (R3) and R2 are both scored against ground truth.
//
// The budget b in (0, 1] degrades the configured R2 detector, which stands
// for the full budget: recall becomes recall * b and the label-flip rate
// moves toward chance, flip + (0.5 - flip) * (1 - b).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "htmask/synth.h"
#include "htmask/threshold.h"

namespace htmask {

struct PipelineConfig {
  SceneSpec scene;
  DetectorSpec r1;
  DetectorSpec r2;
  std::vector<double> sweep = {0.25, 0.5, 0.75, 1.0};
  double iou_threshold = 0.5;
  int n_scenes = 10;
  std::uint64_t seed = 42;
  bool pool = false;

  void Validate() const;  // throws ConfigError
};

// Parses the JSON config. "scene", "r1" and "r2" may be inline objects or
// paths to JSON files, resolved against `base_dir`. Throws ConfigError.
PipelineConfig ParsePipelineConfig(std::string_view json,
                                   const std::string& base_dir = ".");

DetectorSpec DetectorAtBudget(const DetectorSpec& full, double budget);

struct SceneBundle {
  LabeledScene gt;
  LabeledScene r1;
  LabeledScene r2;
};

std::string SceneName(int index);  // "scene_007.png"

// Ground truth, R1 and full-budget R2 for every scene; seeds derive from the
// master seed only.
std::vector<SceneBundle> SynthesizeDataset(const PipelineConfig& config);

struct FusionOutcome {
  std::vector<LabeledScene> r3;
  std::vector<ThresholdModel> models;  // one per scene
  int fallback_images = 0;             // scenes fused with the pooled model
};

// Per-image models by default; a scene whose R2 lacks a class (or has equal
// class means) falls back to the model pooled over all scenes. With
// `pool` every scene uses the pooled model.
FusionOutcome FuseScenes(const std::vector<LabeledScene>& r1,
                         const std::vector<LabeledScene>& r2, bool pool);

struct LevelResult {
  double budget = 0.0;
  double r2_recall = 0.0;
  double r2_flip = 0.0;
  double r2_map = 0.0;
  double r3_map = 0.0;
  int fallback_images = 0;
};

std::vector<LevelResult> RunPipeline(const PipelineConfig& config);

std::string PipelineCsv(const std::vector<LevelResult>& levels,
                        double iou_threshold);
std::string PipelineSvg(const std::vector<LevelResult>& levels,
                        double iou_threshold);

}  // namespace htmask

#endif  // HTMASK_PIPELINE_H_
