#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamprop/config.hpp"
#include "streamprop/eval.hpp"
#include "streamprop/kernel.hpp"
#include "streamprop/scaler.hpp"
#include "streamprop/types.hpp"

namespace streamprop {

struct TraceSummary {
  std::size_t warmup_steps = 0;
  std::size_t total_steps = 0;
  std::size_t gap_count = 0;
  std::size_t lane_switches = 0;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

TraceSummary summarize(const StreamTrace& trace);

struct ScaleReport {
  ScaleSpec spec;
  KernelStats stats;
  std::size_t candidates = 0;  // NMS survivors
  std::size_t selected = 0;    // after per-scale top-n
  std::optional<TraceSummary> trace;
};

struct ImageReport {
  double seconds = 0.0;
  std::vector<ScaleReport> scales;

  /// Stage statistics summed over scales (peaks are maxima).
  KernelStats totals() const;
};

struct PipelineResult {
  std::vector<Proposal> proposals;
  ImageReport report;
};

/// Resize -> batch stream -> streaming kernel -> per-scale top-n for every
/// scale, then calibration and box mapping into one global top-k heap fed in
/// scale_id order. Scales run on up to cfg.threads workers; the output does
/// not depend on the thread count.
PipelineResult run_pipeline(const RgbImage& img, const PipelineConfig& cfg, const SvmModel& model);

/// FNV-1a (64-bit) of the proposals CSV text.
std::uint64_t proposals_digest(std::span<const Proposal> proposals);
std::string hex_digest(std::uint64_t digest);

struct EvalResult {
  std::vector<CurvePoint> detection_rate;
  std::vector<CurvePoint> mabo;
  std::size_t images_evaluated = 0;
  std::size_t objects = 0;
  std::vector<std::string> warnings;
  ProposalSet proposals;
};

/// Proposes on every annotated image found as `<image_dir>/<image_id>.ppm`;
/// images whose file is absent are skipped with a warning and leave both the
/// numerator and denominator. Writes dr.csv and mabo.csv into `out_dir` when
/// it is non-empty.
EvalResult run_eval(const std::filesystem::path& image_dir, std::span<const GroundTruth> annotations,
                    const PipelineConfig& cfg, const SvmModel& model, const std::filesystem::path& out_dir = {});

struct BenchImage {
  std::string name;
  RgbImage image;
};

struct BenchReport {
  std::size_t images = 0;
  int repeats = 0;
  std::vector<double> fps_samples;      // one per repeat
  std::vector<double> seconds_samples;  // total wall time per repeat
  double median_fps = 0.0;
  std::vector<std::uint64_t> digests;   // combined proposal digest per repeat
  bool deterministic = true;
  std::vector<double> image_seconds;    // per-image wall time, last repeat
  KernelStats stats;                    // per repeat, summed over images and scales
  std::vector<std::vector<ScaleReport>> scales;  // per image, last repeat
  Scheduler scheduler = Scheduler::kPlain;
};

BenchReport run_bench(std::span<const BenchImage> images, const PipelineConfig& cfg, const SvmModel& model,
                      int repeats);

/// All *.ppm files in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace streamprop
