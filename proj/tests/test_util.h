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
#ifndef HTMASK_TESTS_TEST_UTIL_H_
#define HTMASK_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "htmask/annotations.h"
#include "htmask/error.h"
#include "htmask/raster.h"

namespace htmask::testing_util {

// Field-by-field equality; the image is compared by content.
inline bool SameScene(const LabeledScene& a, const LabeledScene& b) {
  if (a.image_id != b.image_id || a.instances.size() != b.instances.size()) {
    return false;
  }
  if ((a.image == nullptr) != (b.image == nullptr)) return false;
  if (a.image && !(*a.image == *b.image)) return false;
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    const Instance& x = a.instances[i];
    const Instance& y = b.instances[i];
    if (!(x.polygon == y.polygon) || x.category != y.category ||
        x.score != y.score || !(x.mask == y.mask)) {
      return false;
    }
  }
  return true;
}

// The code carried by the Error `fn` throws, or nullopt if it returns.
inline std::optional<ErrorCode> CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::shared_ptr<const GrayImage> Uniform(int w, int h, std::uint8_t g) {
  return std::make_shared<const GrayImage>(w, h, g);
}

}  // namespace htmask::testing_util

#endif  // HTMASK_TESTS_TEST_UTIL_H_
