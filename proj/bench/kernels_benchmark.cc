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
// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare scaling.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "htmask/kernels.h"
#include "htmask/random.h"
#include "htmask/raster.h"

namespace htmask {
namespace {

constexpr int kSide = 1024;

Polygon Star(double cx, double cy, double r) {
  std::vector<Point> v;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * 3.14159265358979323846 * k / 64.0;
    const double rr = (k % 2 == 0) ? r : 0.6 * r;
    v.push_back({cx + rr * std::cos(a), cy + rr * std::sin(a)});
  }
  return Polygon(v);
}

std::vector<PixelMask> Masks(int n) {
  Xoshiro256 rng(7);
  std::vector<PixelMask> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(Rasterize(Star(rng.Uniform(100.0, kSide - 100.0),
                                 rng.Uniform(100.0, kSide - 100.0),
                                 rng.Uniform(20.0, 90.0)),
                            kSide, kSide));
  }
  return out;
}

std::vector<const PixelMask*> Ptrs(const std::vector<PixelMask>& masks) {
  std::vector<const PixelMask*> out;
  for (const PixelMask& m : masks) out.push_back(&m);
  return out;
}

void BM_RasterizeSerial(benchmark::State& state) {
  const Polygon poly = Star(kSide / 2.0, kSide / 2.0, kSide * 0.45);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::Rasterize(poly, kSide, kSide));
  }
}
BENCHMARK(BM_RasterizeSerial);

void BM_RasterizeParallel(benchmark::State& state) {
  const Polygon poly = Star(kSide / 2.0, kSide / 2.0, kSide * 0.45);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Rasterize(poly, kSide, kSide));
  }
}
BENCHMARK(BM_RasterizeParallel);

void BM_IouMatrixSerial(benchmark::State& state) {
  const auto masks = Masks(static_cast<int>(state.range(0)));
  const auto ptrs = Ptrs(masks);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::IouMatrix(ptrs, ptrs));
  }
}
BENCHMARK(BM_IouMatrixSerial)->Arg(16)->Arg(64);

void BM_IouMatrixParallel(benchmark::State& state) {
  const auto masks = Masks(static_cast<int>(state.range(0)));
  const auto ptrs = Ptrs(masks);
  for (auto _ : state) {
    benchmark::DoNotOptimize(IouMatrix(ptrs, ptrs));
  }
}
BENCHMARK(BM_IouMatrixParallel)->Arg(16)->Arg(64);

GrayImage NoiseImage() {
  Xoshiro256 rng(9);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(kSide) * kSide);
  for (auto& p : pixels) p = static_cast<std::uint8_t>(rng.UniformInt(0, 255));
  return GrayImage(kSide, kSide, std::move(pixels));
}

void BM_MaskedHistogramSerial(benchmark::State& state) {
  const GrayImage image = NoiseImage();
  const PixelMask mask = Rasterize(Polygon::Rect(0, 0, kSide, kSide), kSide, kSide);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::MaskedHistogram(image, mask));
  }
}
BENCHMARK(BM_MaskedHistogramSerial);

void BM_MaskedHistogramParallel(benchmark::State& state) {
  const GrayImage image = NoiseImage();
  const PixelMask mask = Rasterize(Polygon::Rect(0, 0, kSide, kSide), kSide, kSide);
  for (auto _ : state) {
    benchmark::DoNotOptimize(MaskedHistogram(image, mask));
  }
}
BENCHMARK(BM_MaskedHistogramParallel);

}  // namespace
}  // namespace htmask

BENCHMARK_MAIN();
