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
#ifndef HTMASK_SYNTH_H_
#define HTMASK_SYNTH_H_

// Synthetic villages and simulated detectors.
//
// A scene is a uniform background with axis-aligned rectangular buildings
// whose roof pixels are drawn from a per-class normal distribution. A
// simulated detector re-emits the ground truth with misses, vertex jitter,
// label flips and noisy scores. Output depends only on the SceneSpec or
// DetectorSpec passed in, seed included; see random.h for the generator.

#include <cstdint>
#include <string>

#include "htmask/annotations.h"

namespace htmask {

struct GrayDistribution {
  double mean = 128.0;
  double std = 0.0;
};

struct SceneSpec {
  int width = 512;
  int height = 512;
  int n_new = 10;
  int n_old = 10;
  GrayDistribution new_gray{200.0, 5.0};
  GrayDistribution old_gray{90.0, 5.0};
  int background_gray = 40;
  int min_size = 16;  // building side length, pixels, inclusive range
  int max_size = 48;
  int min_gap = 2;
  std::uint64_t seed = 0;

  void Validate() const;  // throws ConfigError
};

enum class DetectorMode { kOneClass, kTwoClass };

struct DetectorSpec {
  double recall_rate = 1.0;
  double vertex_jitter = 0.0;
  double label_flip_rate = 0.0;
  double score_base = 0.9;
  double score_noise = 0.05;
  DetectorMode mode = DetectorMode::kTwoClass;
  std::uint64_t seed = 0;

  void Validate() const;  // throws ConfigError
};

// Each building gets this many random placements before the scene is
// declared infeasible.
inline constexpr int kMaxPlacementAttempts = 1000;

// Throws PlacementInfeasible when a building cannot be placed.
LabeledScene GenerateScene(const SceneSpec& spec,
                           const std::string& image_id = "scene");

LabeledScene SimulateDetector(const LabeledScene& gt, const DetectorSpec& spec);

}  // namespace htmask

#endif  // HTMASK_SYNTH_H_
