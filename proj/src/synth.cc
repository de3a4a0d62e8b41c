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
#include "htmask/synth.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "htmask/error.h"
#include "htmask/random.h"

namespace htmask {

namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfigError, what);
}

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

struct Rect {
  int x, y, w, h;
};

bool Separated(const Rect& a, const Rect& b, int gap) {
  return a.x + a.w + gap <= b.x || b.x + b.w + gap <= a.x ||
         a.y + a.h + gap <= b.y || b.y + b.h + gap <= a.y;
}

std::uint8_t SampleGray(Xoshiro256& rng, const GrayDistribution& d) {
  const double v = d.mean + d.std * rng.Normal();
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

void SceneSpec::Validate() const {
  Require(width >= 1 && height >= 1, "scene dimensions must be >= 1");
  Require(n_new >= 0 && n_old >= 0, "building counts must be >= 0");
  for (const GrayDistribution* d : {&new_gray, &old_gray}) {
    Require(d->mean >= 0.0 && d->mean <= 255.0, "gray mean outside [0, 255]");
    Require(d->std >= 0.0, "gray std must be >= 0");
  }
  Require(background_gray >= 0 && background_gray <= 255,
          "background gray outside [0, 255]");
  Require(min_size >= 1 && min_size < max_size,
          "building sizes need 1 <= min < max");
  Require(min_gap >= 0, "min_gap must be >= 0");
}

void DetectorSpec::Validate() const {
  Require(IsProbability(recall_rate), "recall_rate outside [0, 1]");
  Require(IsProbability(label_flip_rate), "label_flip_rate outside [0, 1]");
  Require(vertex_jitter >= 0.0 && std::isfinite(vertex_jitter),
          "vertex_jitter must be >= 0");
  Require(std::isfinite(score_base) && std::isfinite(score_noise) &&
              score_noise >= 0.0,
          "bad score parameters");
}

LabeledScene GenerateScene(const SceneSpec& spec, const std::string& image_id) {
  spec.Validate();
  Xoshiro256 layout_rng(DeriveSeed(spec.seed, 0));
  Xoshiro256 pixel_rng(DeriveSeed(spec.seed, 1));

  std::vector<Category> order(spec.n_new, Category::kNew);
  order.insert(order.end(), spec.n_old, Category::kOld);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = layout_rng.UniformInt(0, static_cast<std::int64_t>(i) - 1);
    std::swap(order[i - 1], order[j]);
  }

  std::vector<Rect> placed;
  for (std::size_t b = 0; b < order.size(); ++b) {
    bool ok = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !ok; ++attempt) {
      Rect r;
      r.w = static_cast<int>(layout_rng.UniformInt(spec.min_size, spec.max_size));
      r.h = static_cast<int>(layout_rng.UniformInt(spec.min_size, spec.max_size));
      if (r.w > spec.width || r.h > spec.height) continue;
      r.x = static_cast<int>(layout_rng.UniformInt(0, spec.width - r.w));
      r.y = static_cast<int>(layout_rng.UniformInt(0, spec.height - r.h));
      ok = std::all_of(placed.begin(), placed.end(), [&](const Rect& o) {
        return Separated(r, o, spec.min_gap);
      });
      if (ok) placed.push_back(r);
    }
    if (!ok) {
      throw Error(ErrorCode::kPlacementInfeasible,
                  fmt::format("building {} of {} not placed after {} attempts",
                              b + 1, order.size(), kMaxPlacementAttempts));
    }
  }

  std::vector<std::uint8_t> pixels(
      static_cast<std::size_t>(spec.width) * spec.height,
      static_cast<std::uint8_t>(spec.background_gray));
  for (std::size_t b = 0; b < placed.size(); ++b) {
    const Rect& r = placed[b];
    const GrayDistribution& dist =
        order[b] == Category::kNew ? spec.new_gray : spec.old_gray;
    for (int y = r.y; y < r.y + r.h; ++y) {
      for (int x = r.x; x < r.x + r.w; ++x) {
        pixels[static_cast<std::size_t>(y) * spec.width + x] =
            SampleGray(pixel_rng, dist);
      }
    }
  }

  LabeledScene scene{image_id,
                     std::make_shared<const GrayImage>(spec.width, spec.height,
                                                       std::move(pixels)),
                     {}};
  for (std::size_t b = 0; b < placed.size(); ++b) {
    const Rect& r = placed[b];
    scene.instances.push_back(Instance::Make(Polygon::Rect(r.x, r.y, r.w, r.h),
                                             order[b], 1.0, spec.width,
                                             spec.height));
  }
  return scene;
}

LabeledScene SimulateDetector(const LabeledScene& gt, const DetectorSpec& spec) {
  spec.Validate();
  Xoshiro256 rng(spec.seed);
  LabeledScene out{gt.image_id, gt.image, {}};
  for (const Instance& truth : gt.instances) {
    // Every draw happens whether or not it is used, so the stream position
    // after an instance does not depend on earlier outcomes.
    const bool emitted = rng.Uniform() < spec.recall_rate;
    std::vector<Point> vertices = truth.polygon.vertices();
    for (Point& p : vertices) {
      p.x += rng.Uniform(-spec.vertex_jitter, spec.vertex_jitter);
      p.y += rng.Uniform(-spec.vertex_jitter, spec.vertex_jitter);
    }
    const bool flipped = rng.Uniform() < spec.label_flip_rate;
    const double score = std::clamp(
        spec.score_base + rng.Uniform(-spec.score_noise, spec.score_noise), 0.0,
        1.0);
    if (!emitted) continue;

    Category category = Category::kBuilding;
    if (spec.mode == DetectorMode::kTwoClass) {
      category = truth.category;
      if (flipped && category != Category::kBuilding) category = Opposite(category);
    }
    Polygon polygon(std::move(vertices));
    try {
      out.instances.push_back(Instance::Make(polygon, category, score,
                                             gt.width(), gt.height()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyMask) throw;
      // Jitter collapsed a tiny footprint; keep the true outline instead.
      out.instances.push_back(Instance::Make(truth.polygon, category, score,
                                             gt.width(), gt.height()));
    }
  }
  return out;
}

}  // namespace htmask
