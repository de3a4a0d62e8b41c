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
// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured numbers; the process exits nonzero if any criterion fails.

#include <fmt/format.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "htmask/annotations.h"
#include "htmask/eval.h"
#include "htmask/pipeline.h"
#include "htmask/random.h"
#include "htmask/synth.h"
#include "htmask/threshold.h"
#include "oracles.h"
#include "test_util.h"

namespace htmask {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using testing_util::SameScene;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// --- 1 ---------------------------------------------------------------------
Outcome OracleEquivalence() {
  const auto start = Clock::now();
  Xoshiro256 rng(20261016);
  const int kFixtures = 250;
  int mismatched_flags = 0;
  int checked_classes = 0;
  double worst = 0.0;
  for (int f = 0; f < kFixtures; ++f) {
    auto [pred, gt] = oracle::RandomFixture(rng, 6, "fixture.png");
    const oracle::ImageMatch m =
        oracle::ExhaustiveMatch(pred.instances, gt.instances, 0.5);
    const MatchResult r = MatchInstances(pred.instances, gt.instances, 0.5);
    std::vector<bool> tp(pred.instances.size(), false);
    for (const MatchPair& p : r.pairs) tp[p.pred] = true;
    for (std::size_t k = 0; k < m.rank_order.size(); ++k) {
      mismatched_flags += tp[m.rank_order[k]] != m.tp_in_rank[k];
    }
    const std::vector<LabeledScene> preds{pred};
    const std::vector<LabeledScene> gts{gt};
    const MapReport report = MapAt50(preds, gts);
    // Per-class AP from the oracle's own flags.
    for (const ClassMetrics& c : report.classes) {
      std::vector<bool> flags;
      for (std::size_t k = 0; k < m.rank_order.size(); ++k) {
        if (pred.instances[m.rank_order[k]].category == c.category) {
          flags.push_back(m.tp_in_rank[k]);
        }
      }
      worst = std::max(worst, std::abs(c.ap - oracle::ApByTruePositives(flags, c.num_gt)));
      ++checked_classes;
    }
    worst = std::max(worst, std::abs(report.map - oracle::ReferenceMap(preds, gts, 0.5)));
  }
  const double secs = Seconds(start);
  return {mismatched_flags == 0 && worst <= 1e-12 && secs < 10.0,
          fmt::format("{} fixtures, {} class APs, max |AP diff| = {:.3g}, "
                      "flag mismatches = {}, {:.2f} s",
                      kFixtures, checked_classes, worst, mismatched_flags, secs)};
}

// --- 2 ---------------------------------------------------------------------
Outcome ApHandCheck() {
  const std::vector<bool> ranked{true, false, true};
  const PrCurve curve = PrCurveFromRanked(ranked, 2);
  const double ap = AveragePrecision(curve);
  std::vector<std::pair<double, double>> pts;
  for (const PrPoint& p : curve.points) pts.emplace_back(p.recall, p.precision);
  const double riemann = oracle::RiemannAp(pts, 1e-6);

  // Same fixture through real masks and matching.
  auto box = [](int x, int y, double s) {
    return Instance::Make(Polygon::Rect(x, y, 3, 3), Category::kOld, s, 8, 8);
  };
  const std::vector<Instance> gts{box(0, 0, 1), box(4, 4, 1)};
  const std::vector<Instance> preds{box(0, 0, 0.9), box(0, 4, 0.8), box(4, 4, 0.7)};
  const double from_masks = AveragePrecision(ComputePrCurve(preds, gts));

  const double want = 5.0 / 6.0;
  const bool pass = std::abs(ap - want) <= 1e-12 && std::abs(from_masks - want) <= 1e-12 &&
                    std::abs(riemann - want) <= 1e-6;
  return {pass, fmt::format("AP = {:.15f}, from masks = {:.15f}, Riemann(1e-6) = {:.9f}",
                            ap, from_masks, riemann)};
}

// --- 3 ---------------------------------------------------------------------
Outcome IouExactness() {
  const PixelMask a = Rasterize(Polygon::Rect(0, 0, 2, 2), 8, 8);
  const PixelMask b = Rasterize(Polygon::Rect(1, 1, 2, 2), 8, 8);
  const double v = MaskIou(a, b);
  Xoshiro256 rng(31);
  int pairs = 0;
  int failures = 0;
  auto random_mask = [&]() -> PixelMask {
    for (;;) {
      std::vector<Point> pts;
      const int k = static_cast<int>(rng.UniformInt(3, 7));
      for (int i = 0; i < k; ++i) pts.push_back({rng.Uniform(-2, 34), rng.Uniform(-2, 34)});
      try {
        return Rasterize(Polygon(pts), 32, 32);
      } catch (const Error&) {
      }
    }
  };
  while (pairs < 1000) {
    const PixelMask x = random_mask();
    const PixelMask y = random_mask();
    const double xy = MaskIou(x, y);
    failures += xy != MaskIou(y, x) || MaskIou(x, x) != 1.0 || MaskIou(y, y) != 1.0 ||
                xy < 0.0 || xy > 1.0 || xy != oracle::PixelIou(x, y);
    ++pairs;
  }
  return {v == 1.0 / 7.0 && failures == 0,
          fmt::format("offset blocks IoU = {:.17g} (1/7 = {:.17g}); {} random pairs, "
                      "{} violations",
                      v, 1.0 / 7.0, pairs, failures)};
}

// --- 4 ---------------------------------------------------------------------
std::shared_ptr<const GrayImage> MapPixels(const GrayImage& image, int mul, int add) {
  std::vector<std::uint8_t> px(image.data().begin(), image.data().end());
  for (auto& p : px) p = static_cast<std::uint8_t>(p * mul + add);
  return std::make_shared<const GrayImage>(image.width(), image.height(), std::move(px));
}

std::vector<Category> Labels(const LabeledScene& s) {
  std::vector<Category> out;
  for (const Instance& i : s.instances) out.push_back(i.category);
  return out;
}

Outcome ThresholdIdentity() {
  Xoshiro256 rng(41);
  int identity_scenes = 0;
  int identity_failures = 0;
  while (identity_scenes < 200) {
    SceneSpec spec;
    spec.width = 128;
    spec.height = 128;
    spec.n_new = static_cast<int>(rng.UniformInt(1, 6));
    spec.n_old = static_cast<int>(rng.UniformInt(1, 6));
    spec.min_size = 6;
    spec.max_size = 20;
    spec.new_gray = {static_cast<double>(rng.UniformInt(0, 255)), 0.0};
    spec.old_gray = {static_cast<double>(rng.UniformInt(0, 255)), 0.0};
    if (spec.new_gray.mean == spec.old_gray.mean) continue;
    spec.seed = rng.Next();
    DetectorSpec det;
    det.seed = rng.Next();
    const LabeledScene r2 = SimulateDetector(GenerateScene(spec), det);
    const ThresholdModel m = FitThreshold(r2);
    identity_failures += m.theta() != (spec.new_gray.mean + spec.old_gray.mean) / 2.0;
    ++identity_scenes;
  }

  int invariance_scenes = 0;
  int invariance_failures = 0;
  int fused_instances = 0;
  while (invariance_scenes < 100) {
    SceneSpec spec;
    spec.width = 160;
    spec.height = 160;
    spec.n_new = static_cast<int>(rng.UniformInt(2, 8));
    spec.n_old = static_cast<int>(rng.UniformInt(2, 8));
    spec.min_size = 8;
    spec.max_size = 24;
    // Everything stays within [0, 63] so x4 and +192 never clamp.
    spec.background_gray = static_cast<int>(rng.UniformInt(0, 63));
    spec.new_gray = {rng.Uniform(10, 53), rng.Uniform(0, 10)};
    spec.old_gray = {rng.Uniform(10, 53), rng.Uniform(0, 10)};
    spec.seed = rng.Next();
    const LabeledScene gt = GenerateScene(spec);
    bool in_range = true;
    for (std::uint8_t p : gt.image->data()) in_range = in_range && p <= 63;
    if (!in_range) continue;
    DetectorSpec two;
    two.label_flip_rate = 0.2;
    two.recall_rate = 0.8;
    two.vertex_jitter = 1.0;
    two.seed = rng.Next();
    DetectorSpec one;
    one.mode = DetectorMode::kOneClass;
    one.vertex_jitter = 2.0;
    one.seed = rng.Next();
    const LabeledScene r2 = SimulateDetector(gt, two);
    const LabeledScene r1 = SimulateDetector(gt, one);
    ThresholdModel base = FitThreshold(gt);
    try {
      base = FitThreshold(r2);
    } catch (const Error&) {
      continue;
    }
    const std::vector<Category> want = Labels(Fuse(r1, base));
    for (auto [mul, add] : {std::pair{1, 192}, std::pair{1, 37}, std::pair{4, 0},
                            std::pair{3, 2}}) {
      const auto img = MapPixels(*gt.image, mul, add);
      const LabeledScene r2t{r2.image_id, img, r2.instances};
      const LabeledScene r1t{r1.image_id, img, r1.instances};
      invariance_failures += Labels(Fuse(r1t, FitThreshold(r2t))) != want;
    }
    fused_instances += static_cast<int>(want.size());
    ++invariance_scenes;
  }
  return {identity_failures == 0 && invariance_failures == 0,
          fmt::format("theta identity: {} std=0 scenes, {} failures; shift/scale: "
                      "{} scenes x 4 transforms ({} footprints), {} label changes",
                      identity_scenes, identity_failures, invariance_scenes,
                      fused_instances, invariance_failures)};
}

// --- 5 ---------------------------------------------------------------------
Outcome CountPreservation() {
  Xoshiro256 rng(51);
  const int kCases = 10000;
  int failures = 0;
  int fallback_models = 0;
  for (int c = 0; c < kCases; ++c) {
    const int w = static_cast<int>(rng.UniformInt(4, 40));
    const int h = static_cast<int>(rng.UniformInt(4, 40));
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
    for (auto& p : px) p = static_cast<std::uint8_t>(rng.UniformInt(0, 255));
    auto image = std::make_shared<const GrayImage>(w, h, std::move(px));
    auto random_instance = [&](Category cat) -> std::optional<Instance> {
      std::vector<Point> pts;
      const int k = static_cast<int>(rng.UniformInt(3, 8));
      for (int i = 0; i < k; ++i) {
        pts.push_back({rng.Uniform(-3, w + 3), rng.Uniform(-3, h + 3)});
      }
      try {
        return Instance::Make(Polygon(pts), cat, rng.Uniform(), w, h);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    LabeledScene r2{"fuzz", image, {}};
    for (int i = 0, n = static_cast<int>(rng.UniformInt(2, 8)); i < n; ++i) {
      if (auto inst = random_instance(rng.Bernoulli(0.5) ? Category::kNew : Category::kOld)) {
        r2.instances.push_back(std::move(*inst));
      }
    }
    LabeledScene r1{"fuzz", image, {}};
    for (int i = 0, n = static_cast<int>(rng.UniformInt(0, 12)); i < n; ++i) {
      if (auto inst = random_instance(Category::kBuilding)) {
        r1.instances.push_back(std::move(*inst));
      }
    }
    // When the fuzzed R2 cannot define a model, fall back to a random valid
    // one so every case still goes through Fuse.
    std::optional<ThresholdModel> model;
    try {
      model = FitThreshold(r2);
    } catch (const Error&) {
      ++fallback_models;
      GrayHistogram a;
      GrayHistogram b;
      const int ga = static_cast<int>(rng.UniformInt(0, 254));
      const int gb = static_cast<int>(rng.UniformInt(ga + 1, 255));
      a.bins[ga] = a.total = 1;
      b.bins[gb] = b.total = 1;
      model = rng.Bernoulli(0.5) ? ThresholdModel::FromHistograms(a, b)
                                 : ThresholdModel::FromHistograms(b, a);
    }
    const LabeledScene r3 = Fuse(r1, *model);
    failures += r3.instances.size() != r1.instances.size();
  }
  return {failures == 0,
          fmt::format("{} fuzzed cases, {} count mismatches ({} used a random model "
                      "because R2 had no valid one)",
                      kCases, failures, fallback_models)};
}

// --- 6 ---------------------------------------------------------------------
Outcome SeparationEndToEnd() {
  PipelineConfig c;
  c.scene.new_gray = {200, 5};
  c.scene.old_gray = {90, 5};
  c.r1.mode = DetectorMode::kOneClass;
  c.r1.recall_rate = 1.0;
  c.r1.vertex_jitter = 0.0;
  c.r2.recall_rate = 0.4;
  c.r2.label_flip_rate = 0.0;
  c.r2.vertex_jitter = 0.0;
  c.sweep = {1.0};
  c.n_scenes = 10;
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    worst = std::min(worst, RunPipeline(c).front().r3_map);
  }
  return {worst == 1.0,
          fmt::format("new~N(200,5), old~N(90,5), 5 seeds x 10 scenes: min R3 mAP50 = {}",
                      worst)};
}

// --- 7 ---------------------------------------------------------------------
Outcome DirectionalTable() {
  PipelineConfig c;
  c.scene.width = 512;
  c.scene.height = 512;
  c.scene.n_new = 10;
  c.scene.n_old = 10;
  c.r1.mode = DetectorMode::kOneClass;
  c.r1.recall_rate = 0.95;
  c.r2.recall_rate = 0.4;
  c.r2.label_flip_rate = 0.25;
  c.n_scenes = 10;
  int levels = 0;
  int wins = 0;
  double slowest = 0.0;
  double min_margin = 1.0;
  std::string worst_row;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    c.seed = seed;
    const auto start = Clock::now();
    const auto rows = RunPipeline(c);
    slowest = std::max(slowest, Seconds(start));
    for (const LevelResult& r : rows) {
      ++levels;
      wins += r.r3_map > r.r2_map;
      if (r.r3_map - r.r2_map < min_margin) {
        min_margin = r.r3_map - r.r2_map;
        worst_row = fmt::format("seed {} budget {}: R2 {:.4f} R3 {:.4f}", seed, r.budget,
                                r.r2_map, r.r3_map);
      }
    }
  }
  return {wins == levels && slowest < 60.0,
          fmt::format("R3 > R2 at {}/{} (seed, level) pairs; tightest {}; slowest sweep "
                      "{:.2f} s",
                      wins, levels, worst_row, slowest)};
}

// --- 8 ---------------------------------------------------------------------
std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome Determinism() {
  const fs::path dir = fs::temp_directory_path() / "htmask_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({
    "scene": {"width": 256, "height": 256, "n_new": 6, "n_old": 6},
    "r1": {"recall_rate": 0.95, "vertex_jitter": 1.0},
    "r2": {"recall_rate": 0.4, "label_flip_rate": 0.25, "vertex_jitter": 1.0},
    "n_scenes": 5, "seed": 42})";
  auto run = [&](const std::string& out) {
    const std::string cmd = fmt::format("'{}' pipeline --config '{}' --out '{}' --svg >/dev/null",
                                        HTMASK_CLI_PATH, (dir / "config.json").string(),
                                        (dir / out).string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const int a = run("a");
  const int b = run("b");
  const bool csv_same = Slurp(dir / "a" / "table.csv") == Slurp(dir / "b" / "table.csv");
  const bool svg_same = Slurp(dir / "a" / "table.svg") == Slurp(dir / "b" / "table.svg");
  const bool nonempty = !Slurp(dir / "a" / "table.csv").empty() &&
                        !Slurp(dir / "a" / "table.svg").empty();
  fs::remove_all(dir);
  return {a == 0 && b == 0 && csv_same && svg_same && nonempty,
          fmt::format("exit codes {}/{}, CSV identical: {}, SVG identical: {}", a, b,
                      csv_same, svg_same)};
}

// --- 9 ---------------------------------------------------------------------
Outcome FormatRoundTrip() {
  Xoshiro256 rng(91);
  const int kScenes = 1000;
  int via_failures = 0;
  int det_failures = 0;
  int instances = 0;
  for (int i = 0; i < kScenes; ++i) {
    SceneSpec spec;
    spec.width = static_cast<int>(rng.UniformInt(64, 160));
    spec.height = static_cast<int>(rng.UniformInt(64, 160));
    spec.n_new = static_cast<int>(rng.UniformInt(0, 4));
    spec.n_old = static_cast<int>(rng.UniformInt(0, 4));
    spec.min_size = 6;
    spec.max_size = 18;
    spec.seed = rng.Next();
    const LabeledScene gt = GenerateScene(spec, fmt::format("scene_{:04d}.png", i));
    via_failures += !SameScene(LoadVia(SaveVia(gt), gt.image), gt);

    DetectorSpec det;
    det.mode = rng.Bernoulli(0.5) ? DetectorMode::kOneClass : DetectorMode::kTwoClass;
    det.recall_rate = 0.9;
    det.vertex_jitter = rng.Uniform(0, 3);
    det.label_flip_rate = 0.3;
    det.score_noise = 0.4;
    det.seed = rng.Next();
    const LabeledScene pred = SimulateDetector(gt, det);
    det_failures += !SameScene(LoadDetections(SaveDetections(pred), pred.image), pred);
    instances += static_cast<int>(gt.instances.size() + pred.instances.size());
  }
  return {via_failures == 0 && det_failures == 0,
          fmt::format("{} scenes ({} instances): VIA failures {}, detections failures {}",
                      kScenes, instances, via_failures, det_failures)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

int Main() {
  const std::vector<Criterion> criteria = {
      {"oracle equivalence (eval)", OracleEquivalence},
      {"AP hand-check", ApHandCheck},
      {"IoU exactness", IouExactness},
      {"threshold identity and invariance", ThresholdIdentity},
      {"count preservation", CountPreservation},
      {"separation end-to-end", SeparationEndToEnd},
      {"directional budget table", DirectionalTable},
      {"pipeline determinism", Determinism},
      {"format round-trip", FormatRoundTrip},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    failed += !o.pass;
    fmt::print("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", c.name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace htmask

int main() { return htmask::Main(); }
