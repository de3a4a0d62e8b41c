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
// htmask: synthesize scenes, fuse one-class footprints with two-class labels,
// and evaluate instance masks.
//
// Exit codes: 0 success, 1 usage or config error, 2 data or validation error.

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "htmask/annotations.h"
#include "htmask/error.h"
#include "htmask/eval.h"
#include "htmask/image_io.h"
#include "htmask/pipeline.h"
#include "htmask/report.h"
#include "htmask/threshold.h"

namespace fs = std::filesystem;

namespace htmask {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

using OutputFile = std::pair<fs::path, std::string>;

// Writes every file or none: on the first failure the files already written
// (and any directory created here) are removed again.
void WriteAll(const fs::path& dir, const std::vector<OutputFile>& files) {
  std::vector<fs::path> created_dirs;
  std::vector<fs::path> written;
  auto rollback = [&] {
    std::error_code ec;
    for (const fs::path& p : written) fs::remove(p, ec);
    for (auto it = created_dirs.rbegin(); it != created_dirs.rend(); ++it) {
      fs::remove(*it, ec);
    }
  };
  try {
    if (!dir.empty()) {
      fs::path prefix;
      for (const fs::path& part : dir) {
        prefix /= part;
        if (!fs::exists(prefix)) {
          fs::create_directory(prefix);
          created_dirs.push_back(prefix);
        }
      }
    }
    for (const auto& [path, bytes] : files) {
      WriteFile(path.string(), bytes);
      written.push_back(path);
    }
  } catch (const fs::filesystem_error& e) {
    rollback();
    throw Error(ErrorCode::kIoError, e.what());
  } catch (...) {
    rollback();
    throw;
  }
}

std::string AsString(const std::vector<std::uint8_t>& bytes) {
  return {bytes.begin(), bytes.end()};
}

std::string Stem(const std::string& image_id) {
  return fs::path(image_id).stem().string();
}

fs::path ParentDir(const fs::path& file) {
  return file.has_parent_path() ? file.parent_path() : fs::path();
}

struct SynthOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

PipelineConfig LoadConfig(const std::string& path,
                          std::optional<std::uint64_t> seed) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  PipelineConfig config =
      ParsePipelineConfig(text, ParentDir(fs::path(path)).string());
  if (seed) config.seed = *seed;
  return config;
}

int RunSynth(const SynthOptions& opt) {
  const PipelineConfig config = LoadConfig(opt.config, opt.seed);
  const std::vector<SceneBundle> data = SynthesizeDataset(config);
  const fs::path dir = opt.out;
  std::vector<OutputFile> files;
  for (const SceneBundle& b : data) {
    const std::string stem = Stem(b.gt.image_id);
    files.emplace_back(dir / b.gt.image_id, AsString(EncodePng(*b.gt.image)));
    files.emplace_back(dir / (stem + ".gt.json"), SaveVia(b.gt));
    files.emplace_back(dir / (stem + ".r1.json"), SaveDetections(b.r1));
    files.emplace_back(dir / (stem + ".r2.json"), SaveDetections(b.r2));
  }
  WriteAll(dir, files);
  std::cout << "wrote " << data.size() << " scenes to " << dir.string() << "\n";
  return kExitOk;
}

struct FuseOptions {
  std::vector<std::string> images;
  std::vector<std::string> r1;
  std::vector<std::string> r2;
  std::string out;
  std::string report;
  bool pool = false;
};

int RunFuse(const FuseOptions& opt) {
  if (opt.images.size() != opt.r1.size() || opt.images.size() != opt.r2.size()) {
    std::cerr << "error: --image, --r1 and --r2 must be given the same number "
                 "of times\n";
    return kExitUsage;
  }
  std::vector<LabeledScene> r1;
  std::vector<LabeledScene> r2;
  for (std::size_t i = 0; i < opt.images.size(); ++i) {
    auto image = std::make_shared<const GrayImage>(ReadImage(opt.images[i]));
    r1.push_back(LoadAnnotations(ReadFile(opt.r1[i]), image));
    r2.push_back(LoadAnnotations(ReadFile(opt.r2[i]), image));
    if (r1.back().image_id != r2.back().image_id) {
      throw Error(ErrorCode::kImageIdMismatch,
                  opt.r1[i] + " and " + opt.r2[i] + " name different images");
    }
  }

  // Surface a missing class or equal means as an error unless pooling, where
  // only the pooled statistics matter.
  if (!opt.pool) {
    for (const LabeledScene& s : r2) FitThreshold(s);
  }
  const FusionOutcome fused = FuseScenes(r1, r2, opt.pool);

  std::vector<OutputFile> files;
  fs::path out_dir;
  if (fused.r3.size() == 1) {
    files.emplace_back(opt.out, SaveDetections(fused.r3[0]));
    out_dir = ParentDir(opt.out);
  } else {
    out_dir = opt.out;
    for (const LabeledScene& s : fused.r3) {
      files.emplace_back(out_dir / (Stem(s.image_id) + ".r3.json"),
                         SaveDetections(s));
    }
  }
  std::string csv = ThresholdCsvHeader();
  if (opt.pool && !fused.models.empty()) {
    csv += ThresholdCsvRow("pooled", fused.models[0]);
  } else {
    for (std::size_t i = 0; i < fused.models.size(); ++i) {
      csv += ThresholdCsvRow(fused.r3[i].image_id, fused.models[i]);
    }
  }
  files.emplace_back(opt.report, csv);
  WriteAll(out_dir, files);
  std::cout << csv;
  return kExitOk;
}

struct EvalOptions {
  std::vector<std::string> gt;
  std::vector<std::string> pred;
  std::vector<std::string> images;
  double iou = kDefaultIouThreshold;
  std::string out;
  bool svg = false;
};

int RunEval(const EvalOptions& opt) {
  if (opt.gt.size() != opt.images.size()) {
    std::cerr << "error: give one --image per --gt file\n";
    return kExitUsage;
  }
  std::map<std::string, std::shared_ptr<const GrayImage>> images;
  std::vector<LabeledScene> gts;
  for (std::size_t i = 0; i < opt.gt.size(); ++i) {
    auto image = std::make_shared<const GrayImage>(ReadImage(opt.images[i]));
    gts.push_back(LoadAnnotations(ReadFile(opt.gt[i]), image));
    images[gts.back().image_id] = image;
  }
  std::vector<LabeledScene> preds;
  for (const std::string& path : opt.pred) {
    const std::string text = ReadFile(path);
    const std::string id = AnnotationImageId(text);
    const auto it = images.find(id);
    if (it == images.end()) {
      throw Error(ErrorCode::kImageIdMismatch,
                  path + " refers to image " + id + " with no ground truth");
    }
    preds.push_back(LoadAnnotations(text, it->second));
  }
  const MapReport report = EvaluateScenes(preds, gts, opt.iou);

  const fs::path dir = opt.out;
  std::vector<OutputFile> files = {{dir / "metrics.csv", MetricsCsv(report)},
                                   {dir / "pr.csv", PrCurveCsv(report)}};
  if (opt.svg) files.emplace_back(dir / "pr.svg", PrCurveSvg(report));
  WriteAll(dir, files);
  std::cout << MetricsCsv(report);
  return kExitOk;
}

struct PipelineOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> iou;
  bool pool = false;
  bool svg = false;
};

int RunPipelineCommand(const PipelineOptions& opt) {
  PipelineConfig config = LoadConfig(opt.config, opt.seed);
  if (opt.iou) config.iou_threshold = *opt.iou;
  if (opt.pool) config.pool = true;
  config.Validate();
  const std::vector<LevelResult> levels = RunPipeline(config);
  const std::string csv = PipelineCsv(levels, config.iou_threshold);
  const fs::path dir = opt.out;
  // The plot is part of the experiment report, so it is always written;
  // --svg is accepted for symmetry with eval.
  WriteAll(dir, {{dir / "table.csv", csv},
                 {dir / "table.svg", PipelineSvg(levels, config.iou_threshold)}});
  std::cout << csv;
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Histogram-threshold fusion of building instance masks"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate synthetic scenes and detections");
  synth_cmd->add_option("--config", synth.config, "JSON config")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Master seed override");

  FuseOptions fuse;
  auto* fuse_cmd = app.add_subcommand(
      "fuse", "Relabel one-class detections by the two-class gray threshold");
  fuse_cmd->add_option("--image", fuse.images, "Scene image (PNG/PGM)")
      ->required();
  fuse_cmd->add_option("--r1", fuse.r1, "One-class detections JSON")->required();
  fuse_cmd->add_option("--r2", fuse.r2, "Two-class detections JSON")->required();
  fuse_cmd
      ->add_option("--out", fuse.out,
                   "Fused detections JSON (a directory for several images)")
      ->required();
  fuse_cmd->add_option("--report", fuse.report, "Threshold report CSV")
      ->required();
  fuse_cmd->add_flag("--pool", fuse.pool,
                     "Fit one threshold over all given images");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Mask AP / mAP evaluation");
  eval_cmd->add_option("--gt", eval.gt, "Ground truth (VIA or detections JSON)")
      ->required();
  eval_cmd->add_option("--pred", eval.pred, "Predictions (detections JSON)");
  eval_cmd->add_option("--image", eval.images, "Image for each --gt")
      ->required();
  eval_cmd->add_option("--iou", eval.iou, "IoU match threshold")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();
  eval_cmd->add_flag("--svg", eval.svg, "Also write pr.svg");

  PipelineOptions pipe;
  auto* pipe_cmd = app.add_subcommand(
      "pipeline", "Synthetic R2-vs-R3 comparison over label budgets");
  pipe_cmd->add_option("--config", pipe.config, "JSON config")->required();
  pipe_cmd->add_option("--out", pipe.out, "Output directory")->required();
  pipe_cmd->add_option("--seed", pipe.seed, "Master seed override");
  pipe_cmd->add_option("--iou", pipe.iou, "IoU match threshold")
      ->check(CLI::Range(0.0, 1.0));
  pipe_cmd->add_flag("--pool", pipe.pool, "Pool threshold statistics");
  pipe_cmd->add_flag("--svg", pipe.svg, "Write the SVG plot (always on)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) return RunSynth(synth);
    if (*fuse_cmd) return RunFuse(fuse);
    if (*eval_cmd) return RunEval(eval);
    if (*pipe_cmd) return RunPipelineCommand(pipe);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigError ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace htmask

int main(int argc, char** argv) { return htmask::Main(argc, argv); }
