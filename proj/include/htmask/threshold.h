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
#ifndef HTMASK_THRESHOLD_H_
#define HTMASK_THRESHOLD_H_

// Gray-level fusion of one-class footprints with two-class labels.
//
// The two-class detections (R2) of an image give the mean gray level of the
// new-building pixels (N) and of the old-building pixels (O). Their midpoint
// theta = (N + O) / 2 splits the one-class footprints (R1): a footprint whose
// own mean gray is >= theta takes the brighter class, otherwise the darker
// one. The output (R3) keeps R1's geometry and scores untouched.
//
// Means are carried as exact integer sums and pixel counts next to their
// floating-point values; every classification decision is made on the
// integers, so the rule is exact and invariant under gray shifts and scales.

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "htmask/annotations.h"
#include "htmask/kernels.h"

namespace htmask {

struct GrayHistogram {
  Histogram256 bins{};
  std::uint64_t total = 0;

  std::uint64_t Sum() const;  // sum of gray values
  double Mean() const;        // throws NoClassSamples when empty
  GrayHistogram& operator+=(const GrayHistogram& other);
};

// Exact mean: sum / count over a mask.
struct GrayMoment {
  std::uint64_t sum = 0;
  std::uint64_t count = 0;
  double Mean() const { return static_cast<double>(sum) / count; }
};

class ThresholdModel {
 public:
  // Throws NoClassSamples if either histogram is empty and
  // DegenerateThreshold if both means are equal.
  static ThresholdModel FromHistograms(const GrayHistogram& new_hist,
                                       const GrayHistogram& old_hist);

  double n_mean() const { return n_mean_; }
  double o_mean() const { return o_mean_; }
  double theta() const { return theta_; }
  Category bright_category() const { return bright_; }
  std::uint64_t new_pixels() const { return new_.count; }
  std::uint64_t old_pixels() const { return old_.count; }

  // Category for a footprint with the given gray moment; mean == theta goes
  // to the bright category.
  Category Classify(const GrayMoment& footprint) const;

 private:
  GrayMoment new_;
  GrayMoment old_;
  double n_mean_ = 0.0;
  double o_mean_ = 0.0;
  double theta_ = 0.0;
  Category bright_ = Category::kNew;
};

GrayMoment InstanceGrayMoment(const Instance& inst, const GrayImage& image);
// Mean gray level under the instance mask; throws EmptyMask.
double InstanceMeanGray(const Instance& inst, const GrayImage& image);

// Histogram over the union of the masks of every `category` instance, so a
// pixel covered twice counts once. Throws NoClassSamples when no instance
// has the category.
GrayHistogram ClassHistogram(std::span<const Instance> instances,
                             Category category, const GrayImage& image);

// Fits N, O and theta from one image's two-class detections.
ThresholdModel FitThreshold(const LabeledScene& r2);
// Pools the per-image class histograms of several images into one model.
ThresholdModel FitThresholdPooled(std::span<const LabeledScene> r2_scenes);

// Relabels every one-class instance of `r1`; order, geometry and scores are
// preserved. Throws InvalidArgument if an instance is not "building".
LabeledScene Fuse(const LabeledScene& r1, const ThresholdModel& model);

std::string ThresholdCsvHeader();
std::string ThresholdCsvRow(const std::string& image_id,
                            const ThresholdModel& model);

}  // namespace htmask

#endif  // HTMASK_THRESHOLD_H_
