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
#ifndef HTMASK_KERNELS_H_
#define HTMASK_KERNELS_H_

// Data-parallel pixel kernels. Each OpenMP kernel has a single-threaded
// twin in `htmask::reference` that the tests hold it to, bit for bit.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "htmask/raster.h"

namespace htmask {

using Histogram256 = std::array<std::uint64_t, 256>;

// |a ∩ b|; dimensions must already match.
std::int64_t IntersectionCount(const PixelMask& a, const PixelMask& b);

// Row-major |preds| x |gts| matrix of mask IoU values. Pairs where both
// masks are empty get 0. Throws DimensionMismatch.
std::vector<double> IouMatrix(std::span<const PixelMask* const> preds,
                              std::span<const PixelMask* const> gts);

// Gray-level counts over the set pixels of `mask`.
Histogram256 MaskedHistogram(const GrayImage& image, const PixelMask& mask);

// Sum of gray values over the set pixels of `mask`.
std::uint64_t MaskedGraySum(const GrayImage& image, const PixelMask& mask);

// Pixel-wise OR; all masks must share dimensions. An empty span yields an
// empty width x height mask.
PixelMask MaskUnion(std::span<const PixelMask* const> masks, int width,
                    int height);

namespace reference {

std::vector<double> IouMatrix(std::span<const PixelMask* const> preds,
                              std::span<const PixelMask* const> gts);
Histogram256 MaskedHistogram(const GrayImage& image, const PixelMask& mask);
PixelMask MaskUnion(std::span<const PixelMask* const> masks, int width,
                    int height);

}  // namespace reference

}  // namespace htmask

#endif  // HTMASK_KERNELS_H_
