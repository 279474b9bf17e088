#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "streamprop/types.hpp"

namespace streamprop {

inline constexpr int kBatchRows = 4;

/// One resize target. An 8x8 window in the resized image covers roughly a
/// base_w x base_h region of the original.
struct ScaleSpec {
  int scale_id = 0;
  int base_w = 0;
  int base_h = 0;
  int target_w = 0;
  int target_h = 0;

  friend bool operator==(const ScaleSpec&, const ScaleSpec&) = default;
};

/// Four vertically adjacent pixels of column `x`, rows band*4 .. band*4+3.
/// Rows at or beyond `valid` replicate the last valid pixel.
struct PixelBatch {
  int x = 0;
  int band = 0;
  int valid = kBatchRows;
  std::array<Rgb, kBatchRows> pixels{};

  friend bool operator==(const PixelBatch&, const PixelBatch&) = default;
};

/// Default base-size set; crossed with itself it gives 25 scales.
std::vector<int> default_base_sizes();

/// One spec per (base_w, base_h) pair, ids assigned densely in lexicographic
/// (base_w, base_h) order. Duplicate base sizes are collapsed.
std::vector<ScaleSpec> generate_scales(int orig_w, int orig_h, std::span<const int> base_sizes);

/// Center-aligned bilinear resize to (spec.target_w, spec.target_h), rounding
/// each channel half-up.
RgbImage resize_bilinear(const RgbImage& img, const ScaleSpec& spec);
RgbImage resize_bilinear(const RgbImage& img, int target_w, int target_h);

int band_count(int height);

/// Pull-style producer of the band-major batch stream.
class BatchStreamer {
 public:
  explicit BatchStreamer(const RgbImage& img) : img_(&img) {}

  std::optional<PixelBatch> next();
  std::size_t total() const;

 private:
  const RgbImage* img_;
  int x_ = 0;
  int band_ = 0;
};

PixelBatch make_batch(const RgbImage& img, int band, int x);

/// Band-major, left-to-right batch sequence: ceil(h/4) * w batches.
std::vector<PixelBatch> stream_batches(const RgbImage& img);

/// Inverse of stream_batches; used to check the reassembly contract.
RgbImage reassemble(std::span<const PixelBatch> batches, int width, int height);

struct TraceEntry {
  int lane = 0;
  std::size_t batch_index = 0;
  std::size_t step = 0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// Emission log of the Ping-Pong scheduler simulation.
struct StreamTrace {
  std::vector<TraceEntry> emissions;
  std::size_t warmup_steps = 0;  // steps before the first emission
  std::size_t total_steps = 0;
  std::size_t gap_count = 0;     // post-warm-up steps with nothing emitted

  /// Lane id of each maximal run of consecutive emissions from one lane.
  std::vector<int> lane_groups() const;
};

struct PingPongOptions {
  /// Pixels one block worker moves into the cache per step. Four matches a
  /// memory word holding one batch column.
  int pixels_per_fetch = 4;
};

struct PingPongResult {
  std::vector<PixelBatch> batches;
  StreamTrace trace;
};

/// Step-level functional simulation of the four-block, two-lane Ping-Pong
/// resize cache. The image is cut into four uniform column blocks (the last
/// absorbs the remainder); four workers, one per block, fill a lane holding one
/// band while the other lane drains one batch per step. The emitted sequence is
/// element-wise identical to stream_batches(img).
PingPongResult pingpong_stream(const RgbImage& img, PingPongOptions options = {});

}  // namespace streamprop
