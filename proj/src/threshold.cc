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
#include "htmask/threshold.h"

#include <fmt/format.h>

#include <algorithm>
#include <vector>

#include "htmask/error.h"

namespace htmask {

namespace {

using u128 = unsigned __int128;

GrayMoment ToMoment(const GrayHistogram& h) { return {h.Sum(), h.total}; }

}  // namespace

std::uint64_t GrayHistogram::Sum() const {
  std::uint64_t sum = 0;
  for (int g = 0; g < 256; ++g) sum += bins[g] * static_cast<std::uint64_t>(g);
  return sum;
}

double GrayHistogram::Mean() const {
  if (total == 0) throw Error(ErrorCode::kNoClassSamples, "empty histogram");
  return static_cast<double>(Sum()) / static_cast<double>(total);
}

GrayHistogram& GrayHistogram::operator+=(const GrayHistogram& other) {
  for (int g = 0; g < 256; ++g) bins[g] += other.bins[g];
  total += other.total;
  return *this;
}

ThresholdModel ThresholdModel::FromHistograms(const GrayHistogram& new_hist,
                                              const GrayHistogram& old_hist) {
  if (new_hist.total == 0) {
    throw Error(ErrorCode::kNoClassSamples, "no new-building pixels");
  }
  if (old_hist.total == 0) {
    throw Error(ErrorCode::kNoClassSamples, "no old-building pixels");
  }
  ThresholdModel m;
  m.new_ = ToMoment(new_hist);
  m.old_ = ToMoment(old_hist);
  // N vs O compared as fractions: sum_new / n_new  vs  sum_old / n_old.
  const u128 lhs = u128{m.new_.sum} * m.old_.count;
  const u128 rhs = u128{m.old_.sum} * m.new_.count;
  if (lhs == rhs) {
    throw Error(ErrorCode::kDegenerateThreshold,
                fmt::format("new and old means are both {}", m.new_.Mean()));
  }
  m.bright_ = lhs > rhs ? Category::kNew : Category::kOld;
  m.n_mean_ = m.new_.Mean();
  m.o_mean_ = m.old_.Mean();
  m.theta_ = (m.n_mean_ + m.o_mean_) / 2.0;
  return m;
}

Category ThresholdModel::Classify(const GrayMoment& footprint) const {
  if (footprint.count == 0) {
    throw Error(ErrorCode::kEmptyMask, "footprint has no pixels");
  }
  // s / n >= (sn / nn + so / no) / 2  <=>  2 s nn no >= n (sn no + so nn)
  const u128 lhs = u128{2} * footprint.sum * new_.count * old_.count;
  const u128 rhs = u128{footprint.count} *
                   (u128{new_.sum} * old_.count + u128{old_.sum} * new_.count);
  return lhs >= rhs ? bright_ : Opposite(bright_);
}

GrayMoment InstanceGrayMoment(const Instance& inst, const GrayImage& image) {
  if (inst.mask.empty()) {
    throw Error(ErrorCode::kEmptyMask, "instance mask is empty");
  }
  return {MaskedGraySum(image, inst.mask),
          static_cast<std::uint64_t>(inst.mask.area())};
}

double InstanceMeanGray(const Instance& inst, const GrayImage& image) {
  return InstanceGrayMoment(inst, image).Mean();
}

GrayHistogram ClassHistogram(std::span<const Instance> instances,
                             Category category, const GrayImage& image) {
  std::vector<const PixelMask*> masks;
  for (const Instance& inst : instances) {
    if (inst.category == category) masks.push_back(&inst.mask);
  }
  if (masks.empty()) {
    throw Error(ErrorCode::kNoClassSamples,
                fmt::format("no \"{}\" instances", CategoryName(category)));
  }
  const PixelMask footprint = MaskUnion(masks, image.width(), image.height());
  GrayHistogram hist;
  hist.bins = MaskedHistogram(image, footprint);
  hist.total = static_cast<std::uint64_t>(footprint.area());
  return hist;
}

ThresholdModel FitThreshold(const LabeledScene& r2) {
  return ThresholdModel::FromHistograms(
      ClassHistogram(r2.instances, Category::kNew, *r2.image),
      ClassHistogram(r2.instances, Category::kOld, *r2.image));
}

ThresholdModel FitThresholdPooled(std::span<const LabeledScene> r2_scenes) {
  GrayHistogram new_hist;
  GrayHistogram old_hist;
  for (const LabeledScene& scene : r2_scenes) {
    for (Category c : {Category::kNew, Category::kOld}) {
      const bool present =
          std::any_of(scene.instances.begin(), scene.instances.end(),
                      [c](const Instance& i) { return i.category == c; });
      if (!present) continue;
      GrayHistogram& target = c == Category::kNew ? new_hist : old_hist;
      target += ClassHistogram(scene.instances, c, *scene.image);
    }
  }
  return ThresholdModel::FromHistograms(new_hist, old_hist);
}

LabeledScene Fuse(const LabeledScene& r1, const ThresholdModel& model) {
  LabeledScene out{r1.image_id, r1.image, r1.instances};
  for (Instance& inst : out.instances) {
    if (inst.category != Category::kBuilding) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("one-class input holds a \"{}\" instance",
                              CategoryName(inst.category)));
    }
    inst.category = model.Classify(InstanceGrayMoment(inst, *r1.image));
  }
  return out;
}

std::string ThresholdCsvHeader() {
  return "image_id,N,O,theta,new_pixels,old_pixels\n";
}

std::string ThresholdCsvRow(const std::string& image_id,
                            const ThresholdModel& model) {
  return fmt::format("{},{},{},{},{},{}\n", image_id, model.n_mean(),
                     model.o_mean(), model.theta(), model.new_pixels(),
                     model.old_pixels());
}

}  // namespace htmask
