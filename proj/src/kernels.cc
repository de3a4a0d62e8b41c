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
#include "htmask/kernels.h"

#include <algorithm>
#include <bit>

#include "htmask/error.h"

namespace htmask {

namespace {

void CheckSameDims(const PixelMask& a, const PixelMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "masks are " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " and " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

void CheckMatrixDims(std::span<const PixelMask* const> preds,
                     std::span<const PixelMask* const> gts) {
  const PixelMask* first = !preds.empty() ? preds[0]
                           : !gts.empty() ? gts[0]
                                          : nullptr;
  if (first == nullptr) return;
  for (const PixelMask* m : preds) CheckSameDims(*first, *m);
  for (const PixelMask* m : gts) CheckSameDims(*first, *m);
}

double Iou(const PixelMask& a, const PixelMask& b) {
  const std::int64_t inter = IntersectionCount(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

template <typename Fn>
void ForEachSetPixel(const PixelMask& mask, Fn fn) {
  for (int y = mask.first_row(); y <= mask.last_row(); ++y) {
    const auto row = mask.Row(y);
    for (int k = 0; k < mask.stride(); ++k) {
      std::uint64_t w = row[k];
      while (w != 0) {
        const int bit = std::countr_zero(w);
        fn((k << 6) + bit, y);
        w &= w - 1;
      }
    }
  }
}

}  // namespace

std::int64_t IntersectionCount(const PixelMask& a, const PixelMask& b) {
  const int first = std::max(a.first_row(), b.first_row());
  const int last = std::min(a.last_row(), b.last_row());
  std::int64_t count = 0;
  for (int y = first; y <= last; ++y) {
    const auto ra = a.Row(y);
    const auto rb = b.Row(y);
    for (int k = 0; k < a.stride(); ++k) count += std::popcount(ra[k] & rb[k]);
  }
  return count;
}

std::vector<double> IouMatrix(std::span<const PixelMask* const> preds,
                              std::span<const PixelMask* const> gts) {
  CheckMatrixDims(preds, gts);
  const int np = static_cast<int>(preds.size());
  const int ng = static_cast<int>(gts.size());
  std::vector<double> out(static_cast<std::size_t>(np) * ng);
#pragma omp parallel for collapse(2) schedule(dynamic, 8)
  for (int p = 0; p < np; ++p) {
    for (int g = 0; g < ng; ++g) {
      out[static_cast<std::size_t>(p) * ng + g] = Iou(*preds[p], *gts[g]);
    }
  }
  return out;
}

Histogram256 MaskedHistogram(const GrayImage& image, const PixelMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask does not match image");
  }
  std::uint64_t bins[256] = {};
  const int first = mask.first_row();
  const int last = mask.last_row();
#pragma omp parallel for reduction(+ : bins[:256]) schedule(static)
  for (int y = first; y <= last; ++y) {
    const auto row = mask.Row(y);
    const auto pixels = image.row(y);
    for (int k = 0; k < mask.stride(); ++k) {
      std::uint64_t w = row[k];
      while (w != 0) {
        ++bins[pixels[(k << 6) + std::countr_zero(w)]];
        w &= w - 1;
      }
    }
  }
  Histogram256 out;
  std::copy(std::begin(bins), std::end(bins), out.begin());
  return out;
}

std::uint64_t MaskedGraySum(const GrayImage& image, const PixelMask& mask) {
  const Histogram256 hist = MaskedHistogram(image, mask);
  std::uint64_t sum = 0;
  for (int g = 0; g < 256; ++g) sum += hist[g] * static_cast<std::uint64_t>(g);
  return sum;
}

PixelMask MaskUnion(std::span<const PixelMask* const> masks, int width,
                    int height) {
  PixelMask empty = PixelMask::Empty(width, height);
  for (const PixelMask* m : masks) CheckSameDims(empty, *m);
  std::vector<std::uint64_t> words(empty.words().begin(), empty.words().end());
  const int stride = empty.stride();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    std::uint64_t* out = words.data() + static_cast<std::size_t>(y) * stride;
    for (const PixelMask* m : masks) {
      if (y < m->first_row() || y > m->last_row()) continue;
      const auto row = m->Row(y);
      for (int k = 0; k < stride; ++k) out[k] |= row[k];
    }
  }
  return PixelMask::FromWords(width, height, std::move(words));
}

namespace reference {

std::vector<double> IouMatrix(std::span<const PixelMask* const> preds,
                              std::span<const PixelMask* const> gts) {
  CheckMatrixDims(preds, gts);
  std::vector<double> out;
  out.reserve(preds.size() * gts.size());
  for (const PixelMask* p : preds) {
    for (const PixelMask* g : gts) out.push_back(Iou(*p, *g));
  }
  return out;
}

Histogram256 MaskedHistogram(const GrayImage& image, const PixelMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask does not match image");
  }
  Histogram256 out{};
  ForEachSetPixel(mask, [&](int x, int y) { ++out[image.at(x, y)]; });
  return out;
}

PixelMask MaskUnion(std::span<const PixelMask* const> masks, int width,
                    int height) {
  PixelMask empty = PixelMask::Empty(width, height);
  for (const PixelMask* m : masks) CheckSameDims(empty, *m);
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(width) * height);
  for (const PixelMask* m : masks) {
    ForEachSetPixel(*m, [&](int x, int y) {
      flags[static_cast<std::size_t>(y) * width + x] = 1;
    });
  }
  return PixelMask::FromPixels(width, height, flags);
}

}  // namespace reference

}  // namespace htmask
