#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "streamprop/scaler.hpp"
#include "streamprop/types.hpp"

namespace streamprop {

/// Per-pixel saturated normed gradient, same dimensions as the source image.
struct GradientMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> g;

  std::uint8_t at(int x, int y) const {
    return g[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }

  friend bool operator==(const GradientMap&, const GradientMap&) = default;
};

/// One stage-I score per 8x8 window anchor (top-left corner).
struct ScoreMap {
  int win_w = 0;
  int win_h = 0;
  std::vector<double> s;

  double at(int x, int y) const {
    return s[static_cast<std::size_t>(y) * static_cast<std::size_t>(win_w) + static_cast<std::size_t>(x)];
  }

  friend bool operator==(const ScoreMap&, const ScoreMap&) = default;
};

inline constexpr int kNmsTile = 5;

/// Chebyshev distance over the three channels.
constexpr int rgb_distance(Rgb a, Rgb b) {
  auto absdiff = [](int u, int v) { return u > v ? u - v : v - u; };
  const int dr = absdiff(a.r, b.r);
  const int dg = absdiff(a.g, b.g);
  const int db = absdiff(a.b, b.b);
  const int m = dr > dg ? dr : dg;
  return m > db ? m : db;
}

/// G = min(D(up, down) + D(left, right), 255)
constexpr std::uint8_t normed_gradient(Rgb up, Rgb down, Rgb left, Rgb right) {
  const int sum = rgb_distance(up, down) + rgb_distance(left, right);
  return static_cast<std::uint8_t>(sum < 255 ? sum : 255);
}

/// Border neighbours are clamped to the edge pixel.
GradientMap calc_gradients_dense(const RgbImage& img);

/// Dense stride-1 window scoring. Each window sums its eight row partials in
/// row order; the streaming SVM stage uses the same association, so the two
/// agree bit-for-bit for any weights, not only integer ones.
ScoreMap svm_score_dense(const GradientMap& grad, const SvmModel& model);

/// Non-overlapping 5x5 tiles anchored at (0,0), edge tiles partial. One
/// candidate per tile (its maximum, ties to the smallest (y, x)), emitted in
/// tile-row-major order.
std::vector<Candidate> nms_select_dense(const ScoreMap& scores, int scale_id);

/// calc_gradients_dense -> svm_score_dense -> nms_select_dense.
std::vector<Candidate> dense_pipeline(const RgbImage& img, const SvmModel& model, int scale_id);

struct StageStats {
  std::uint64_t items_in = 0;
  std::uint64_t items_out = 0;
  int peak_rows = 0;   // peak occupied line-buffer rows
  int buffer_rows = 0; // line-buffer capacity in rows

  friend bool operator==(const StageStats&, const StageStats&) = default;
};

struct KernelStats {
  StageStats gradient;
  StageStats svm;
  StageStats nms;
  std::size_t fifo_capacity = 0;
  std::size_t fifo_peak = 0;

  KernelStats& operator+=(const KernelStats& other);
  friend bool operator==(const KernelStats&, const KernelStats&) = default;
};

using CandidateSink = std::function<void(const Candidate&)>;

/// The gradient -> SVM -> NMS stage chain over a batch stream. Each stage owns
/// a bounded line buffer: three pixel rows, eight rows of partial window sums
/// and five rows of 1x5 running maxima respectively. Candidates are handed to
/// `emit` in tile-row-major order as soon as their tile is complete.
class StreamingKernel {
 public:
  StreamingKernel(int width, int height, const SvmModel& model, int scale_id, CandidateSink emit);
  ~StreamingKernel();
  StreamingKernel(StreamingKernel&&) noexcept;
  StreamingKernel& operator=(StreamingKernel&&) noexcept;

  /// Throws StreamError if the batch is not the next one in band-major order.
  void push(const PixelBatch& batch);
  /// Throws StreamError if the stream ended early.
  void finish();

  const KernelStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct KernelOptions {
  std::size_t fifo_capacity = 64;
  /// Run the stage chain on its own thread, handing candidates across a
  /// bounded FIFO that blocks the producer when full.
  bool threaded = false;
};

/// Streams `batches` through the kernel and delivers candidates to `consume`
/// through the output FIFO. The delivered sequence does not depend on
/// `options.threaded`.
KernelStats kernel_stream(std::span<const PixelBatch> batches, int width, int height, const SvmModel& model,
                          int scale_id, const CandidateSink& consume, KernelOptions options = {});

std::vector<Candidate> kernel_stream(std::span<const PixelBatch> batches, int width, int height,
                                     const SvmModel& model, int scale_id, KernelStats* stats = nullptr,
                                     KernelOptions options = {});

}  // namespace streamprop
