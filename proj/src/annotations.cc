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
#include "htmask/annotations.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "htmask/error.h"
#include "json.hpp"

namespace htmask {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json Parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

const json& Field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("missing key \"") + key + "\"");
  }
  return obj.at(key);
}

double Number(const json& v, const char* what) {
  if (!v.is_number()) {
    throw Error(ErrorCode::kParseError, std::string(what) + " is not a number");
  }
  return v.get<double>();
}

std::vector<double> NumberArray(const json& v, const char* what) {
  if (!v.is_array()) {
    throw Error(ErrorCode::kParseError, std::string(what) + " is not an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) out.push_back(Number(e, what));
  return out;
}

Polygon ViaRegionPolygon(const json& shape) {
  const json& name = Field(shape, "name");
  if (!name.is_string()) throw Error(ErrorCode::kParseError, "bad shape name");
  const std::string kind = name.get<std::string>();
  if (kind == "rect" && shape.contains("width")) {
    return Polygon::Rect(Number(Field(shape, "x"), "x"),
                         Number(Field(shape, "y"), "y"),
                         Number(Field(shape, "width"), "width"),
                         Number(Field(shape, "height"), "height"));
  }
  if (kind != "polygon" && kind != "rect") {
    throw Error(ErrorCode::kParseError, "unsupported region shape " + kind);
  }
  const auto xs = NumberArray(Field(shape, "all_points_x"), "all_points_x");
  const auto ys = NumberArray(Field(shape, "all_points_y"), "all_points_y");
  if (xs.size() != ys.size() || xs.empty()) {
    throw Error(ErrorCode::kParseError,
                "all_points_x and all_points_y differ in length");
  }
  if (kind == "rect") {
    const auto [x0, x1] = std::minmax_element(xs.begin(), xs.end());
    const auto [y0, y1] = std::minmax_element(ys.begin(), ys.end());
    return Polygon::Rect(*x0, *y0, *x1 - *x0, *y1 - *y0);
  }
  std::vector<Point> vertices;
  for (std::size_t i = 0; i < xs.size(); ++i) vertices.push_back({xs[i], ys[i]});
  try {
    return Polygon(std::move(vertices));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

Category CategoryField(const json& v) {
  if (!v.is_string()) throw Error(ErrorCode::kParseError, "category not a string");
  return ParseCategory(v.get<std::string>());
}

void CheckImage(const std::shared_ptr<const GrayImage>& image) {
  if (!image) throw Error(ErrorCode::kInvalidArgument, "scene image is null");
}

}  // namespace

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kBuilding:
      return "building";
    case Category::kNew:
      return "new";
    case Category::kOld:
      return "old";
  }
  return "?";
}

Category ParseCategory(std::string_view name) {
  if (name == "building") return Category::kBuilding;
  if (name == "new") return Category::kNew;
  if (name == "old") return Category::kOld;
  throw Error(ErrorCode::kUnknownCategory,
              "\"" + std::string(name) + "\" is not one of building/new/old");
}

Instance Instance::Make(Polygon polygon, Category category, double score,
                        int width, int height) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::kScoreOutOfRange,
                "score " + std::to_string(score) + " outside [0, 1]");
  }
  PixelMask mask = Rasterize(polygon, width, height);
  return Instance{std::move(polygon), category, score, std::move(mask)};
}

LabeledScene LoadVia(std::string_view text,
                     std::shared_ptr<const GrayImage> image) {
  CheckImage(image);
  json doc = Parse(text);
  if (doc.is_object() && doc.contains("_via_img_metadata")) {
    doc = doc.at("_via_img_metadata");
  }
  if (!doc.is_object() || doc.size() != 1) {
    throw Error(ErrorCode::kParseError,
                "expected exactly one image entry in the VIA file");
  }
  const json& entry = doc.begin().value();
  const json& filename = Field(entry, "filename");
  if (!filename.is_string()) throw Error(ErrorCode::kParseError, "bad filename");

  LabeledScene scene{filename.get<std::string>(), image, {}};
  const json& regions = Field(entry, "regions");
  if (!regions.is_array() && !regions.is_object()) {
    throw Error(ErrorCode::kParseError, "regions must be an array or object");
  }
  // Older VIA releases key regions by index in an object; iteration order of
  // the parsed object is lexicographic, so sort numerically.
  std::vector<const json*> ordered;
  for (const auto& [key, region] : regions.items()) ordered.push_back(&region);
  if (regions.is_object()) {
    std::vector<std::pair<long, const json*>> keyed;
    for (const auto& [key, region] : regions.items()) {
      keyed.emplace_back(std::strtol(key.c_str(), nullptr, 10), &region);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    ordered.clear();
    for (const auto& kv : keyed) ordered.push_back(kv.second);
  }
  for (const json* region : ordered) {
    Polygon polygon = ViaRegionPolygon(Field(*region, "shape_attributes"));
    const Category category =
        CategoryField(Field(Field(*region, "region_attributes"), "type"));
    scene.instances.push_back(Instance::Make(std::move(polygon), category, 1.0,
                                             image->width(), image->height()));
  }
  return scene;
}

std::string SaveVia(const LabeledScene& scene) {
  ordered_json regions = ordered_json::array();
  for (const Instance& inst : scene.instances) {
    ordered_json xs = ordered_json::array();
    ordered_json ys = ordered_json::array();
    for (const Point& p : inst.polygon.vertices()) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    ordered_json region;
    region["shape_attributes"] = {
        {"name", "polygon"}, {"all_points_x", xs}, {"all_points_y", ys}};
    region["region_attributes"] = {{"type", CategoryName(inst.category)}};
    regions.push_back(std::move(region));
  }
  ordered_json entry;
  entry["filename"] = scene.image_id;
  entry["size"] = -1;
  entry["regions"] = std::move(regions);
  entry["file_attributes"] = ordered_json::object();
  ordered_json doc;
  doc[scene.image_id] = std::move(entry);
  return doc.dump(1) + "\n";
}

LabeledScene LoadDetections(std::string_view text,
                            std::shared_ptr<const GrayImage> image) {
  CheckImage(image);
  const json doc = Parse(text);
  const json& name = Field(doc, "image");
  if (!name.is_string()) throw Error(ErrorCode::kParseError, "bad image name");
  const json& instances = Field(doc, "instances");
  if (!instances.is_array()) {
    throw Error(ErrorCode::kParseError, "instances must be an array");
  }
  LabeledScene scene{name.get<std::string>(), image, {}};
  for (const json& item : instances) {
    const Category category = CategoryField(Field(item, "class"));
    const double score = Number(Field(item, "score"), "score");
    const json& poly = Field(item, "polygon");
    if (!poly.is_array()) throw Error(ErrorCode::kParseError, "bad polygon");
    std::vector<Point> vertices;
    for (const json& v : poly) {
      if (!v.is_array() || v.size() != 2) {
        throw Error(ErrorCode::kParseError, "polygon vertex must be [x, y]");
      }
      vertices.push_back({Number(v[0], "x"), Number(v[1], "y")});
    }
    std::optional<Polygon> polygon;
    try {
      polygon.emplace(std::move(vertices));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, e.what());
    }
    scene.instances.push_back(Instance::Make(std::move(*polygon), category,
                                             score, image->width(),
                                             image->height()));
  }
  return scene;
}

std::string SaveDetections(const LabeledScene& scene) {
  ordered_json instances = ordered_json::array();
  for (const Instance& inst : scene.instances) {
    ordered_json poly = ordered_json::array();
    for (const Point& p : inst.polygon.vertices()) poly.push_back({p.x, p.y});
    ordered_json item;
    item["class"] = CategoryName(inst.category);
    item["score"] = inst.score;
    item["polygon"] = std::move(poly);
    instances.push_back(std::move(item));
  }
  ordered_json doc;
  doc["image"] = scene.image_id;
  doc["instances"] = std::move(instances);
  return doc.dump(1) + "\n";
}

std::string AnnotationImageId(std::string_view text) {
  json doc = Parse(text);
  if (doc.is_object() && doc.contains("instances")) {
    const json& name = Field(doc, "image");
    if (!name.is_string()) throw Error(ErrorCode::kParseError, "bad image name");
    return name.get<std::string>();
  }
  if (doc.is_object() && doc.contains("_via_img_metadata")) {
    doc = doc.at("_via_img_metadata");
  }
  if (!doc.is_object() || doc.size() != 1) {
    throw Error(ErrorCode::kParseError,
                "expected exactly one image entry in the VIA file");
  }
  const json& filename = Field(doc.begin().value(), "filename");
  if (!filename.is_string()) throw Error(ErrorCode::kParseError, "bad filename");
  return filename.get<std::string>();
}

LabeledScene LoadAnnotations(std::string_view text,
                             std::shared_ptr<const GrayImage> image) {
  const json doc = Parse(text);
  if (doc.is_object() && doc.contains("instances")) {
    return LoadDetections(text, std::move(image));
  }
  return LoadVia(text, std::move(image));
}

}  // namespace htmask
