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
#include "htmask/raster.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "htmask/error.h"

namespace htmask {

namespace {

void CheckDims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster dimensions must be >= 1, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

// Sunday's isLeft: > 0 when p is left of the directed line a->b.
inline double IsLeft(const Point& a, const Point& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (px - a.x) * (b.y - a.y);
}

inline double Center(int i) { return i + 0.5; }

// Smallest i in [0, n] with pred(i) true; pred must be monotone false->true.
template <typename Pred>
int FirstTrue(int n, Pred pred) {
  int lo = 0;
  int hi = n;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

inline void SetRange(std::uint64_t* row, int begin, int end) {
  for (int i = begin; i < end; ++i) row[i >> 6] |= std::uint64_t{1} << (i & 63);
}

// Fills one row of the mask. For a fixed row, IsLeft is monotone in the
// pixel-center x coordinate, so each edge's contribution to the winding
// number is a prefix of the row and its on-edge pixels form one contiguous
// run. Both are located by binary search on the exact predicate, which keeps
// the result identical to evaluating the point-in-polygon test per pixel.
void RasterizeRow(const std::vector<Point>& v, int width, int row,
                  std::uint64_t* out, std::vector<int>& diff) {
  const double py = Center(row);
  std::fill(diff.begin(), diff.end(), 0);
  const std::size_t n = v.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point& a = v[k];
    const Point& b = v[(k + 1) % n];
    auto left = [&](int i) { return IsLeft(a, b, Center(i), py); };

    if (a.y <= py && b.y > py) {
      // Upward edge: +1 where IsLeft > 0, a prefix since IsLeft decreases.
      diff[0] += 1;
      diff[FirstTrue(width, [&](int i) { return left(i) <= 0.0; })] -= 1;
    } else if (a.y > py && b.y <= py) {
      // Downward edge: -1 where IsLeft < 0, a prefix since IsLeft increases.
      diff[0] -= 1;
      diff[FirstTrue(width, [&](int i) { return left(i) >= 0.0; })] += 1;
    }

    if (py < std::min(a.y, b.y) || py > std::max(a.y, b.y)) continue;
    const double x_lo = std::min(a.x, b.x);
    const double x_hi = std::max(a.x, b.x);
    int begin;
    int end;
    if (a.y == b.y) {
      begin = 0;
      end = width;
    } else if (b.y > a.y) {
      begin = FirstTrue(width, [&](int i) { return left(i) <= 0.0; });
      end = FirstTrue(width, [&](int i) { return left(i) < 0.0; });
    } else {
      begin = FirstTrue(width, [&](int i) { return left(i) >= 0.0; });
      end = FirstTrue(width, [&](int i) { return left(i) > 0.0; });
    }
    begin = std::max(begin, FirstTrue(width, [&](int i) {
                       return Center(i) >= x_lo;
                     }));
    end = std::min(end, FirstTrue(width, [&](int i) {
                     return Center(i) > x_hi;
                   }));
    if (begin < end) SetRange(out, begin, end);
  }

  int winding = 0;
  for (int i = 0; i < width; ++i) {
    winding += diff[i];
    if (winding != 0) out[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
}

// Rows whose centers fall inside the polygon's vertical extent.
void RowSpan(const Polygon& polygon, int height, int* first, int* last) {
  double y_min = polygon.vertices()[0].y;
  double y_max = y_min;
  for (const Point& p : polygon.vertices()) {
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  const double lo = std::clamp(std::ceil(y_min - 0.5), 0.0, double(height));
  const double hi = std::clamp(std::floor(y_max - 0.5), -1.0, height - 1.0);
  *first = static_cast<int>(lo);
  *last = static_cast<int>(hi);
}

PixelMask Finish(int width, int height, std::vector<std::uint64_t> words) {
  PixelMask mask = PixelMask::FromWords(width, height, std::move(words));
  if (mask.empty()) {
    throw Error(ErrorCode::kEmptyMask,
                "polygon covers no pixel center of the " +
                    std::to_string(width) + "x" + std::to_string(height) +
                    " raster");
  }
  return mask;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  CheckDims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  CheckDims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidArgument,
                "image data length does not equal width * height");
  }
}

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "polygon needs at least 3 vertices, got " +
                    std::to_string(vertices_.size()));
  }
  for (const Point& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite polygon vertex");
    }
  }
}

Polygon Polygon::Rect(double x, double y, double w, double h) {
  return Polygon({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
}

PixelMask PixelMask::Empty(int width, int height) {
  CheckDims(width, height);
  return FromWords(width, height,
                   std::vector<std::uint64_t>(
                       static_cast<std::size_t>(height) * WordsPerRow(width)));
}

PixelMask PixelMask::FromWords(int width, int height,
                               std::vector<std::uint64_t> words) {
  CheckDims(width, height);
  const int stride = WordsPerRow(width);
  if (words.size() != static_cast<std::size_t>(height) * stride) {
    throw Error(ErrorCode::kInvalidArgument, "mask word count mismatch");
  }
  PixelMask mask;
  mask.width_ = width;
  mask.height_ = height;
  mask.stride_ = stride;
  mask.words_ = std::move(words);
  mask.first_row_ = height;
  mask.last_row_ = -1;
  const int tail = width & 63;
  const std::uint64_t tail_mask =
      tail == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail) - 1;
  for (int y = 0; y < height; ++y) {
    std::uint64_t* row = mask.words_.data() + static_cast<std::size_t>(y) * stride;
    row[stride - 1] &= tail_mask;
    std::int64_t count = 0;
    for (int k = 0; k < stride; ++k) count += std::popcount(row[k]);
    if (count > 0) {
      mask.first_row_ = std::min(mask.first_row_, y);
      mask.last_row_ = y;
    }
    mask.area_ += count;
  }
  return mask;
}

PixelMask PixelMask::FromPixels(int width, int height,
                                std::span<const std::uint8_t> flags) {
  CheckDims(width, height);
  if (flags.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidArgument, "mask flag count mismatch");
  }
  const int stride = WordsPerRow(width);
  std::vector<std::uint64_t> words(static_cast<std::size_t>(height) * stride);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (flags[static_cast<std::size_t>(y) * width + x]) {
        words[static_cast<std::size_t>(y) * stride + (x >> 6)] |=
            std::uint64_t{1} << (x & 63);
      }
    }
  }
  return FromWords(width, height, std::move(words));
}

PixelMask Rasterize(const Polygon& polygon, int width, int height) {
  CheckDims(width, height);
  const int stride = PixelMask::WordsPerRow(width);
  std::vector<std::uint64_t> words(static_cast<std::size_t>(height) * stride);
  int first = 0;
  int last = -1;
  RowSpan(polygon, height, &first, &last);
  const auto& v = polygon.vertices();

#pragma omp parallel
  {
    std::vector<int> diff(static_cast<std::size_t>(width) + 1);
#pragma omp for schedule(static)
    for (int row = first; row <= last; ++row) {
      RasterizeRow(v, width, row,
                   words.data() + static_cast<std::size_t>(row) * stride, diff);
    }
  }
  return Finish(width, height, std::move(words));
}

namespace reference {

PixelMask Rasterize(const Polygon& polygon, int width, int height) {
  CheckDims(width, height);
  const int stride = PixelMask::WordsPerRow(width);
  std::vector<std::uint64_t> words(static_cast<std::size_t>(height) * stride);
  int first = 0;
  int last = -1;
  RowSpan(polygon, height, &first, &last);
  std::vector<int> diff(static_cast<std::size_t>(width) + 1);
  for (int row = first; row <= last; ++row) {
    RasterizeRow(polygon.vertices(), width, row,
                 words.data() + static_cast<std::size_t>(row) * stride, diff);
  }
  return Finish(width, height, std::move(words));
}

}  // namespace reference

}  // namespace htmask
