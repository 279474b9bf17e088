#include <algorithm>
#include <array>

#include "streamprop/errors.hpp"
#include "streamprop/scaler.hpp"

namespace streamprop {

namespace {

constexpr int kBlocks = 4;
constexpr int kLanes = 2;

struct ColumnBlock {
  int begin = 0;
  int end = 0;
};

std::array<ColumnBlock, kBlocks> partition_columns(int width) {
  std::array<ColumnBlock, kBlocks> blocks{};
  const int step = width / kBlocks;
  for (int k = 0; k < kBlocks; ++k) {
    blocks[static_cast<std::size_t>(k)] = {k * step, k == kBlocks - 1 ? width : (k + 1) * step};
  }
  return blocks;
}

enum class LaneState { kFree, kFilling, kReady, kDraining };

// One cache lane: holds a whole band, split into four parts that mirror the
// column blocks so each worker writes only its own part.
struct Lane {
  LaneState state = LaneState::kFree;
  int band = -1;
  int valid = 0;
  int drain_x = 0;
  std::vector<Rgb> cache;  // kBatchRows rows x width
  std::array<std::size_t, kBlocks> fetched{};
};

}  // namespace

PingPongResult pingpong_stream(const RgbImage& img, PingPongOptions options) {
  if (options.pixels_per_fetch < 1) throw InputError("pixels_per_fetch must be positive");
  const int width = img.width;
  const int bands = band_count(img.height);
  const auto blocks = partition_columns(width);

  std::array<Lane, kLanes> lanes;
  for (auto& lane : lanes) lane.cache.resize(static_cast<std::size_t>(kBatchRows) * static_cast<std::size_t>(width));

  PingPongResult result;
  const std::size_t total = static_cast<std::size_t>(bands) * static_cast<std::size_t>(width);
  result.batches.reserve(total);

  int next_fill_band = 0;
  int next_drain_band = 0;
  int draining = -1;
  int filling = -1;
  bool warm = false;
  std::size_t step = 0;

  auto lane_for = [](int band) { return band % kLanes; };

  while (result.batches.size() < total) {
    bool emitted = false;

    // Drain side: one batch per step from the lane holding the next band.
    if (draining < 0 && next_drain_band < bands) {
      Lane& lane = lanes[static_cast<std::size_t>(lane_for(next_drain_band))];
      if (lane.state == LaneState::kReady && lane.band == next_drain_band) {
        lane.state = LaneState::kDraining;
        draining = lane_for(next_drain_band);
      }
    }
    if (draining >= 0) {
      Lane& lane = lanes[static_cast<std::size_t>(draining)];
      PixelBatch batch;
      batch.x = lane.drain_x;
      batch.band = lane.band;
      batch.valid = lane.valid;
      for (int r = 0; r < kBatchRows; ++r) {
        const int src = std::min(r, lane.valid - 1);
        batch.pixels[static_cast<std::size_t>(r)] =
            lane.cache[static_cast<std::size_t>(src) * static_cast<std::size_t>(width) + static_cast<std::size_t>(lane.drain_x)];
      }
      result.trace.emissions.push_back({draining, result.batches.size(), step});
      result.batches.push_back(batch);
      emitted = true;
      if (!warm) {
        warm = true;
        result.trace.warmup_steps = step;
      }
      if (++lane.drain_x == width) {
        lane.state = LaneState::kFree;
        lane.band = -1;
        draining = -1;
        ++next_drain_band;
      }
    }

    // Fill side: the four block workers load the next band into a free lane.
    if (filling < 0 && next_fill_band < bands) {
      Lane& lane = lanes[static_cast<std::size_t>(lane_for(next_fill_band))];
      if (lane.state == LaneState::kFree) {
        lane.state = LaneState::kFilling;
        lane.band = next_fill_band;
        lane.valid = std::min(kBatchRows, img.height - next_fill_band * kBatchRows);
        lane.drain_x = 0;
        lane.fetched.fill(0);
        filling = lane_for(next_fill_band);
        ++next_fill_band;
      }
    }
    if (filling >= 0) {
      Lane& lane = lanes[static_cast<std::size_t>(filling)];
      const int row0 = lane.band * kBatchRows;
      bool done = true;
      for (int k = 0; k < kBlocks; ++k) {
        const ColumnBlock& blk = blocks[static_cast<std::size_t>(k)];
        const std::size_t part_size =
            static_cast<std::size_t>(blk.end - blk.begin) * static_cast<std::size_t>(lane.valid);
        std::size_t& n = lane.fetched[static_cast<std::size_t>(k)];
        for (int i = 0; i < options.pixels_per_fetch && n < part_size; ++i, ++n) {
          // Column-major walk through this worker's part of the band.
          const int col = blk.begin + static_cast<int>(n / static_cast<std::size_t>(lane.valid));
          const int row = static_cast<int>(n % static_cast<std::size_t>(lane.valid));
          lane.cache[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)] =
              img.at(col, row0 + row);
        }
        done = done && n == part_size;
      }
      if (done) {
        lane.state = LaneState::kReady;
        filling = -1;
      }
    }

    if (!emitted && warm) ++result.trace.gap_count;
    ++step;
  }
  result.trace.total_steps = step;
  return result;
}

}  // namespace streamprop
