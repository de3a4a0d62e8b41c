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
#ifndef HTMASK_RASTER_H_
#define HTMASK_RASTER_H_

#include <cstdint>
#include <span>
#include <vector>

namespace htmask {

// Row-major 8-bit grayscale raster. Immutable once constructed.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const std::uint8_t> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const GrayImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Closed polygon in continuous pixel coordinates; pixel (i, j) covers
// [i, i+1) x [j, j+1) and has its center at (i + 0.5, j + 0.5).
class Polygon {
 public:
  // Throws InvalidArgument for fewer than 3 vertices or non-finite values.
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  // Axis-aligned rectangle covering pixels [x, x+w) x [y, y+h).
  static Polygon Rect(double x, double y, double w, double h);

  bool operator==(const Polygon&) const = default;

 private:
  std::vector<Point> vertices_;
};

// Dense bit-per-pixel mask. Each row is padded to whole 64-bit words so row
// slices can be combined word-wise. The popcount and the span of non-empty
// rows are cached at construction.
class PixelMask {
 public:
  PixelMask() = default;

  static PixelMask Empty(int width, int height);
  // `words` holds height * WordsPerRow(width) words; padding bits must be 0.
  static PixelMask FromWords(int width, int height,
                             std::vector<std::uint64_t> words);
  // One byte per pixel, nonzero = set.
  static PixelMask FromPixels(int width, int height,
                              std::span<const std::uint8_t> flags);

  static int WordsPerRow(int width) { return (width + 63) / 64; }

  int width() const { return width_; }
  int height() const { return height_; }
  int stride() const { return stride_; }
  std::int64_t area() const { return area_; }
  bool empty() const { return area_ == 0; }
  // Inclusive range of rows that contain set pixels; first > last if empty.
  int first_row() const { return first_row_; }
  int last_row() const { return last_row_; }

  bool Get(int x, int y) const {
    const std::uint64_t w =
        words_[static_cast<std::size_t>(y) * stride_ + (x >> 6)];
    return (w >> (x & 63)) & 1u;
  }
  std::span<const std::uint64_t> Row(int y) const {
    return {words_.data() + static_cast<std::size_t>(y) * stride_,
            static_cast<std::size_t>(stride_)};
  }
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const PixelMask& o) const {
    return width_ == o.width_ && height_ == o.height_ && words_ == o.words_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int stride_ = 0;
  std::int64_t area_ = 0;
  int first_row_ = 0;
  int last_row_ = -1;
  std::vector<std::uint64_t> words_;
};

// Luma conversion round(0.299 r + 0.587 g + 0.114 b), ties rounded up.
// Integer arithmetic, so exact on every platform.
constexpr std::uint8_t RgbToGray(std::uint8_t r, std::uint8_t g,
                                 std::uint8_t b) {
  const unsigned v = 299u * r + 587u * g + 114u * b + 500u;
  return static_cast<std::uint8_t>(v / 1000u);
}

// Sets pixel (i, j) iff its center lies inside the polygon under the
// nonzero winding rule; centers on an edge count as inside. Throws EmptyMask
// when no pixel center of the width x height raster is covered.
PixelMask Rasterize(const Polygon& polygon, int width, int height);

inline std::int64_t MaskArea(const PixelMask& mask) { return mask.area(); }

namespace reference {

// Single-threaded rasterizer; same contract and bit-identical output.
PixelMask Rasterize(const Polygon& polygon, int width, int height);

}  // namespace reference

}  // namespace htmask

#endif  // HTMASK_RASTER_H_
