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

#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <vector>

#include "htmask/random.h"
#include "htmask/synth.h"
#include "test_util.h"

namespace htmask {
namespace {

using testing_util::CodeOf;

std::shared_ptr<const GrayImage> Row(std::vector<std::uint8_t> px) {
  const int w = static_cast<int>(px.size());
  return std::make_shared<const GrayImage>(w, 1, std::move(px));
}

Instance RowSpan(int x0, int len, Category c, int width) {
  return Instance::Make(Polygon::Rect(x0, 0, len, 1), c, 1.0, width, 1);
}

TEST(InstanceMeanGrayTest, Examples) {
  EXPECT_EQ(InstanceMeanGray(Instance::Make(Polygon::Rect(1, 1, 3, 3),
                                            Category::kNew, 1.0, 8, 8),
                             GrayImage(8, 8, 100)),
            100.0);
  EXPECT_EQ(InstanceMeanGray(RowSpan(0, 2, Category::kNew, 2), *Row({0, 200})),
            100.0);
  EXPECT_DOUBLE_EQ(
      InstanceMeanGray(RowSpan(0, 3, Category::kNew, 3), *Row({10, 20, 40})),
      70.0 / 3.0);
}

TEST(InstanceMeanGrayTest, EmptyMaskIsRejected) {
  Instance inst = RowSpan(0, 1, Category::kNew, 2);
  inst.mask = PixelMask::Empty(2, 1);
  EXPECT_EQ(CodeOf([&] { InstanceMeanGray(inst, *Row({1, 2})); }),
            ErrorCode::kEmptyMask);
}

TEST(ClassHistogramTest, Examples) {
  // 8x8 image: left half gray 80, right half gray 90.
  std::vector<std::uint8_t> px(64);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) px[y * 8 + x] = x < 4 ? 80 : 90;
  }
  const GrayImage image(8, 8, px);
  const Instance a = Instance::Make(Polygon::Rect(0, 0, 4, 4), Category::kOld, 1, 8, 8);
  const Instance b = Instance::Make(Polygon::Rect(4, 4, 4, 4), Category::kOld, 1, 8, 8);

  GrayHistogram one = ClassHistogram(std::vector<Instance>{a}, Category::kOld, image);
  EXPECT_EQ(one.bins[80], 16u);
  EXPECT_EQ(one.total, 16u);

  GrayHistogram two = ClassHistogram(std::vector<Instance>{a, b}, Category::kOld, image);
  EXPECT_EQ(two.bins[80], 16u);
  EXPECT_EQ(two.bins[90], 16u);
  EXPECT_EQ(two.total, 32u);

  GrayHistogram dup = ClassHistogram(std::vector<Instance>{a, a}, Category::kOld, image);
  EXPECT_EQ(dup.total, 16u);
  EXPECT_EQ(dup.bins[80], 16u);

  EXPECT_EQ(CodeOf([&] {
              ClassHistogram(std::vector<Instance>{a}, Category::kNew, image);
            }),
            ErrorCode::kNoClassSamples);
}

TEST(FitThresholdTest, UniformClasses) {
  const auto img = Row({200, 200, 100, 100});
  const LabeledScene r2{"x", img,
                        {RowSpan(0, 2, Category::kNew, 4), RowSpan(2, 2, Category::kOld, 4)}};
  const ThresholdModel m = FitThreshold(r2);
  EXPECT_EQ(m.n_mean(), 200.0);
  EXPECT_EQ(m.o_mean(), 100.0);
  EXPECT_EQ(m.theta(), 150.0);
  EXPECT_EQ(m.bright_category(), Category::kNew);
  EXPECT_EQ(m.new_pixels(), 2u);
  EXPECT_EQ(m.old_pixels(), 2u);
}

TEST(FitThresholdTest, MixedNewPixels) {
  const auto img = Row({200, 210, 190, 100});
  const LabeledScene r2{"x", img,
                        {RowSpan(0, 3, Category::kNew, 4), RowSpan(3, 1, Category::kOld, 4)}};
  const ThresholdModel m = FitThreshold(r2);
  EXPECT_EQ(m.n_mean(), 200.0);
  EXPECT_EQ(m.o_mean(), 100.0);
  EXPECT_EQ(m.theta(), 150.0);
}

TEST(FitThresholdTest, PixelWeightedNotInstanceWeighted) {
  // new: one 3-pixel instance at 30 and one 1-pixel instance at 70.
  // Pixel weighting gives 40; averaging the instance means would give 50.
  const auto img = Row({30, 30, 30, 70, 200});
  const LabeledScene r2{"x", img,
                        {RowSpan(0, 3, Category::kNew, 5), RowSpan(3, 1, Category::kNew, 5),
                         RowSpan(4, 1, Category::kOld, 5)}};
  const ThresholdModel m = FitThreshold(r2);
  EXPECT_EQ(m.n_mean(), 40.0);
  EXPECT_EQ(m.bright_category(), Category::kOld);
}

TEST(FitThresholdTest, Errors) {
  const auto img = Row({200, 100});
  EXPECT_EQ(CodeOf([&] {
              FitThreshold(LabeledScene{"x", img, {RowSpan(0, 1, Category::kNew, 2)}});
            }),
            ErrorCode::kNoClassSamples);
  EXPECT_EQ(CodeOf([&] {
              FitThreshold(LabeledScene{"x", img, {RowSpan(1, 1, Category::kOld, 2)}});
            }),
            ErrorCode::kNoClassSamples);
  const auto flat = Row({50, 50});
  EXPECT_EQ(CodeOf([&] {
              FitThreshold(LabeledScene{"x", flat,
                                        {RowSpan(0, 1, Category::kNew, 2),
                                         RowSpan(1, 1, Category::kOld, 2)}});
            }),
            ErrorCode::kDegenerateThreshold);
  // Equal as fractions but not as raw sums: 3/1 vs 6/2.
  const auto frac = Row({3, 3, 3});
  EXPECT_EQ(CodeOf([&] {
              FitThreshold(LabeledScene{"x", frac,
                                        {RowSpan(0, 1, Category::kNew, 3),
                                         RowSpan(1, 2, Category::kOld, 3)}});
            }),
            ErrorCode::kDegenerateThreshold);
}

TEST(FitThresholdTest, PooledSumsHistograms) {
  const auto a = Row({200, 100});
  const auto b = Row({220, 220, 220});
  const LabeledScene s1{"a", a, {RowSpan(0, 1, Category::kNew, 2), RowSpan(1, 1, Category::kOld, 2)}};
  const LabeledScene s2{"b", b, {RowSpan(0, 3, Category::kNew, 3)}};
  const std::vector<LabeledScene> all{s1, s2};
  const ThresholdModel m = FitThresholdPooled(all);
  EXPECT_EQ(m.n_mean(), 215.0);  // (200 + 3 * 220) / 4
  EXPECT_EQ(m.o_mean(), 100.0);
  EXPECT_EQ(m.new_pixels(), 4u);
}

ThresholdModel Model150() {
  const auto img = Row({200, 100});
  return FitThreshold(LabeledScene{
      "m", img, {RowSpan(0, 1, Category::kNew, 2), RowSpan(1, 1, Category::kOld, 2)}});
}

TEST(FuseTest, Examples) {
  const ThresholdModel m = Model150();
  ASSERT_EQ(m.theta(), 150.0);
  const auto img = Row({180, 120, 150, 149, 151});
  LabeledScene r1{"r1", img, {}};
  for (int x = 0; x < 5; ++x) r1.instances.push_back(RowSpan(x, 1, Category::kBuilding, 5));
  r1.instances[2].score = 0.25;
  const LabeledScene r3 = Fuse(r1, m);
  ASSERT_EQ(r3.instances.size(), 5u);
  EXPECT_EQ(r3.instances[0].category, Category::kNew);
  EXPECT_EQ(r3.instances[1].category, Category::kOld);
  EXPECT_EQ(r3.instances[2].category, Category::kNew);  // tie
  EXPECT_EQ(r3.instances[3].category, Category::kOld);
  EXPECT_EQ(r3.instances[4].category, Category::kNew);
  EXPECT_EQ(r3.instances[2].score, 0.25);
}

TEST(FuseTest, TieWithFractionalTheta) {
  // N = 201/2, O = 0: theta = 50.25 exactly; an instance with mean
  // 201/4 sits on it.
  const auto img = Row({100, 101, 0, 50, 50, 50, 51});
  const ThresholdModel m = FitThreshold(LabeledScene{
      "m", img, {RowSpan(0, 2, Category::kNew, 7), RowSpan(2, 1, Category::kOld, 7)}});
  EXPECT_EQ(m.theta(), 50.25);
  const LabeledScene r1{"r1", img, {RowSpan(3, 4, Category::kBuilding, 7)}};
  EXPECT_EQ(Fuse(r1, m).instances[0].category, Category::kNew);
}

TEST(FuseTest, EmptyAndWrongCategory) {
  const ThresholdModel m = Model150();
  const LabeledScene empty{"e", Row({0}), {}};
  EXPECT_TRUE(Fuse(empty, m).instances.empty());
  const LabeledScene wrong{"w", Row({0}), {RowSpan(0, 1, Category::kNew, 1)}};
  EXPECT_EQ(CodeOf([&] { Fuse(wrong, m); }), ErrorCode::kInvalidArgument);
}

TEST(ThresholdCsvTest, Row) {
  EXPECT_EQ(ThresholdCsvHeader(), "image_id,N,O,theta,new_pixels,old_pixels\n");
  EXPECT_EQ(ThresholdCsvRow("a.png", Model150()), "a.png,200,100,150,1,1\n");
}

// ---------------------------------------------------------------------------
// Properties on random scenes.

struct RandomCase {
  LabeledScene r2;
  LabeledScene r1;
};

// Random image with random two-class and one-class rectangles; gray values
// confined to [lo, hi].
RandomCase MakeCase(Xoshiro256& rng, int lo, int hi) {
  const int w = 24;
  const int h = 16;
  std::vector<std::uint8_t> px(w * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(rng.UniformInt(lo, hi));
  auto image = std::make_shared<const GrayImage>(w, h, px);
  auto rect = [&](Category c) {
    const int x = static_cast<int>(rng.UniformInt(0, w - 2));
    const int y = static_cast<int>(rng.UniformInt(0, h - 2));
    return Instance::Make(
        Polygon::Rect(x, y, rng.UniformInt(1, w - x), rng.UniformInt(1, h - y)), c,
        1.0, w, h);
  };
  RandomCase out{{"r2", image, {}}, {"r1", image, {}}};
  out.r2.instances.push_back(rect(Category::kNew));
  out.r2.instances.push_back(rect(Category::kOld));
  for (int i = 0, n = static_cast<int>(rng.UniformInt(0, 4)); i < n; ++i) {
    out.r2.instances.push_back(rect(rng.Bernoulli(0.5) ? Category::kNew : Category::kOld));
  }
  for (int i = 0, n = static_cast<int>(rng.UniformInt(0, 12)); i < n; ++i) {
    out.r1.instances.push_back(rect(Category::kBuilding));
  }
  return out;
}

LabeledScene Transform(const LabeledScene& s, std::shared_ptr<const GrayImage> img) {
  return LabeledScene{s.image_id, std::move(img), s.instances};
}

std::shared_ptr<const GrayImage> MapPixels(const GrayImage& image, int mul, int add) {
  std::vector<std::uint8_t> px(image.data().begin(), image.data().end());
  for (auto& p : px) p = static_cast<std::uint8_t>(p * mul + add);
  return std::make_shared<const GrayImage>(image.width(), image.height(), px);
}

std::vector<Category> Categories(const LabeledScene& s) {
  std::vector<Category> out;
  for (const Instance& i : s.instances) out.push_back(i.category);
  return out;
}

TEST(ThresholdPropertyTest, HistogramBinsSumToTotal) {
  Xoshiro256 rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    // Random rectangles overlap freely here.
    const RandomCase c = MakeCase(rng, 0, 255);
    for (Category cat : {Category::kNew, Category::kOld}) {
      const GrayHistogram h = ClassHistogram(c.r2.instances, cat, *c.r2.image);
      std::uint64_t sum = 0;
      for (auto n : h.bins) sum += n;
      EXPECT_EQ(sum, h.total);
    }
  }
}

TEST(ThresholdPropertyTest, CountAndGeometryPreservation) {
  Xoshiro256 rng(101);
  int fitted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const RandomCase c = MakeCase(rng, 0, 255);
    ThresholdModel m = Model150();
    try {
      m = FitThreshold(c.r2);
      ++fitted;
    } catch (const Error&) {
    }
    const LabeledScene r3 = Fuse(c.r1, m);
    ASSERT_EQ(r3.instances.size(), c.r1.instances.size());
    for (std::size_t i = 0; i < r3.instances.size(); ++i) {
      EXPECT_EQ(r3.instances[i].mask, c.r1.instances[i].mask);
      EXPECT_EQ(r3.instances[i].polygon, c.r1.instances[i].polygon);
      EXPECT_EQ(r3.instances[i].score, c.r1.instances[i].score);
      EXPECT_NE(r3.instances[i].category, Category::kBuilding);
    }
  }
  EXPECT_GT(fitted, 250);
}

TEST(ThresholdPropertyTest, ShiftAndScaleInvariance) {
  Xoshiro256 rng(102);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomCase c = MakeCase(rng, 0, 63);
    ThresholdModel base = Model150();
    try {
      base = FitThreshold(c.r2);
    } catch (const Error&) {
      continue;
    }
    const std::vector<Category> want = Categories(Fuse(c.r1, base));
    for (auto [mul, add] : {std::pair{1, 17}, std::pair{1, 192}, std::pair{2, 0},
                            std::pair{4, 0}, std::pair{3, 5}}) {
      const auto img = MapPixels(*c.r2.image, mul, add);
      const ThresholdModel m = FitThreshold(Transform(c.r2, img));
      EXPECT_NEAR(m.n_mean(), base.n_mean() * mul + add, 1e-9);
      EXPECT_NEAR(m.o_mean(), base.o_mean() * mul + add, 1e-9);
      EXPECT_NEAR(m.theta(), base.theta() * mul + add, 1e-9);
      EXPECT_EQ(m.bright_category(), base.bright_category());
      EXPECT_EQ(Categories(Fuse(Transform(c.r1, img), m)), want);
    }
  }
}

TEST(ThresholdPropertyTest, MidpointIdentity) {
  Xoshiro256 rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomCase c = MakeCase(rng, 0, 255);
    try {
      const ThresholdModel m = FitThreshold(c.r2);
      EXPECT_EQ(m.theta(), (m.n_mean() + m.o_mean()) / 2.0);
      EXPECT_NEAR(std::abs(m.theta() - m.n_mean()), std::abs(m.theta() - m.o_mean()),
                  1e-12);
      const double bright =
          m.bright_category() == Category::kNew ? m.n_mean() : m.o_mean();
      const double dark =
          m.bright_category() == Category::kNew ? m.o_mean() : m.n_mean();
      EXPECT_GT(bright, dark);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerateThreshold);
    }
  }
}

// Exact nearest-mean check by squared distances over a common denominator.
Category NearestMean(std::uint64_t s, std::uint64_t n, const GrayHistogram& bright,
                     const GrayHistogram& dark, Category bright_cat) {
  using i128 = __int128;
  const i128 nb = bright.total;
  const i128 nd = dark.total;
  const i128 sb = bright.Sum();
  const i128 sd = dark.Sum();
  const i128 db = i128(s) * nb * nd - sb * i128(n) * nd;
  const i128 dd = i128(s) * nb * nd - sd * i128(n) * nb;
  return db * db <= dd * dd ? bright_cat : Opposite(bright_cat);
}

TEST(ThresholdPropertyTest, NearestMeanEquivalence) {
  Xoshiro256 rng(104);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const RandomCase c = MakeCase(rng, 0, 255);
    ThresholdModel m = Model150();
    try {
      m = FitThreshold(c.r2);
    } catch (const Error&) {
      continue;
    }
    const GrayHistogram hn = ClassHistogram(c.r2.instances, Category::kNew, *c.r2.image);
    const GrayHistogram ho = ClassHistogram(c.r2.instances, Category::kOld, *c.r2.image);
    const bool new_bright = m.bright_category() == Category::kNew;
    const LabeledScene r3 = Fuse(c.r1, m);
    for (std::size_t i = 0; i < c.r1.instances.size(); ++i) {
      const GrayMoment g = InstanceGrayMoment(c.r1.instances[i], *c.r1.image);
      EXPECT_EQ(r3.instances[i].category,
                NearestMean(g.sum, g.count, new_bright ? hn : ho, new_bright ? ho : hn,
                            m.bright_category()));
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

}  // namespace
}  // namespace htmask
