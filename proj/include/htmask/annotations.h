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
#ifndef HTMASK_ANNOTATIONS_H_
#define HTMASK_ANNOTATIONS_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "htmask/raster.h"

namespace htmask {

enum class Category { kBuilding, kNew, kOld };

std::string_view CategoryName(Category c);
// Throws UnknownCategory for anything outside {building, new, old}.
Category ParseCategory(std::string_view name);

// The other class of the new/old pair.
inline Category Opposite(Category c) {
  return c == Category::kNew ? Category::kOld : Category::kNew;
}

struct Instance {
  Polygon polygon;
  Category category;
  double score = 1.0;  // ground truth carries 1.0
  PixelMask mask;      // Rasterize(polygon, image dims), never empty

  // Rasterizes `polygon`; throws EmptyMask / ScoreOutOfRange.
  static Instance Make(Polygon polygon, Category category, double score,
                       int width, int height);
};

struct LabeledScene {
  std::string image_id;
  std::shared_ptr<const GrayImage> image;
  std::vector<Instance> instances;

  int width() const { return image->width(); }
  int height() const { return image->height(); }
};

// VIA export subset: a top-level object holding one image entry (optionally
// wrapped in "_via_img_metadata") with "filename" and "regions". Regions are
// "polygon" (all_points_x / all_points_y) or "rect" (x, y, width, height, or
// all_points_* whose bounding box is taken); the region attribute "type"
// names the category.
LabeledScene LoadVia(std::string_view json,
                     std::shared_ptr<const GrayImage> image);
std::string SaveVia(const LabeledScene& scene);

// {"image": name, "instances": [{"class", "score", "polygon": [[x, y], ...]}]}
LabeledScene LoadDetections(std::string_view json,
                            std::shared_ptr<const GrayImage> image);
std::string SaveDetections(const LabeledScene& scene);

// The image name a VIA or detections file refers to, without rasterizing.
std::string AnnotationImageId(std::string_view json);

// Dispatches on shape: an "instances" key means detections, otherwise VIA.
LabeledScene LoadAnnotations(std::string_view json,
                             std::shared_ptr<const GrayImage> image);

}  // namespace htmask

#endif  // HTMASK_ANNOTATIONS_H_
