#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "streamprop/bounded_queue.hpp"
#include "streamprop/errors.hpp"
#include "streamprop/kernel.hpp"

namespace streamprop {

namespace {

// A band contributes at most five output rows to a stage: the row deferred
// from the previous band plus its own four.
constexpr int kMaxGroupRows = kBatchRows + 1;
constexpr int kGradientSlots = 3;

template <typename T>
struct ColumnSlice {
  int x = 0;
  int row0 = 0;
  int count = 0;
  std::array<T, kMaxGroupRows> v{};
};

using GradientColumn = ColumnSlice<std::uint8_t>;
using ScoreColumn = ColumnSlice<double>;

// Gradient stage. Batches of band b arrive column by column. Row 4b+3 needs
// row 4b+4, so each band emits rows 4b-1 .. 4b+2 (the last band runs to the
// bottom edge), one column behind the input. A three-column memory window
// holds the current band; a three-slot line buffer holds rows 4b-2 and 4b-1
// from the previous band and collects rows 4b+2 and 4b+3 for the next one.
// Row 4b+3 is written two columns late into the slot of row 4b-2, whose
// entries die exactly one column behind the output.
class GradientStage {
 public:
  GradientStage(int width, int height) : width_(width), height_(height), bands_(band_count(height)) {
    for (auto& slot : slots_) slot.resize(static_cast<std::size_t>(width));
    stats_.buffer_rows = kGradientSlots;
  }

  bool complete() const { return band_ == bands_; }
  const StageStats& stats() const { return stats_; }

  template <typename Emit>
  void push(const PixelBatch& batch, Emit&& emit) {
    if (complete()) throw StreamError("batch received after the final band");
    if (batch.band != band_ || batch.x != x_) {
      throw StreamError("malformed batch order: expected (band " + std::to_string(band_) + ", x " +
                        std::to_string(x_) + "), got (band " + std::to_string(batch.band) + ", x " +
                        std::to_string(batch.x) + ")");
    }
    if (x_ == 0) begin_band();
    if (batch.valid != valid_) {
      throw StreamError("batch valid count " + std::to_string(batch.valid) + " does not match band height " +
                        std::to_string(valid_));
    }
    ++stats_.items_in;
    const int x = x_;
    window_[static_cast<std::size_t>(x % 3)] = batch.pixels;
    if (!last_) slot(next_row2_)[static_cast<std::size_t>(x)] = batch.pixels[2];
    if (x >= 1) emit_column(x - 1, emit);
    if (!last_ && x >= 2) store_row3(x - 2);
    if (++x_ == width_) end_band(emit);
  }

 private:
  std::vector<Rgb>& slot(int index) { return slots_[static_cast<std::size_t>(index)]; }

  int acquire_slot() {
    for (int i = 0; i < kGradientSlots; ++i) {
      if (!busy_[static_cast<std::size_t>(i)]) {
        busy_[static_cast<std::size_t>(i)] = true;
        return i;
      }
    }
    throw StreamError("gradient line buffer exhausted");
  }

  void release_slot(int index) {
    if (index >= 0) busy_[static_cast<std::size_t>(index)] = false;
  }

  void begin_band() {
    row0_ = band_ * kBatchRows;
    valid_ = std::min(kBatchRows, height_ - row0_);
    last_ = band_ == bands_ - 1;
    if (!last_) {
      next_row2_ = acquire_slot();
      // Row 4b-2's slot is recycled for row 4b+3 once its entries are consumed.
      next_row3_ = prev_row2_ >= 0 ? prev_row2_ : acquire_slot();
    }
    const int used = static_cast<int>(std::count(busy_.begin(), busy_.end(), true));
    stats_.peak_rows = std::max(stats_.peak_rows, used);
  }

  template <typename Emit>
  void end_band(Emit&& emit) {
    emit_column(width_ - 1, emit);
    if (!last_) {
      for (int c = std::max(0, width_ - 2); c < width_; ++c) store_row3(c);
      release_slot(prev_row1_);
      prev_row2_ = next_row2_;
      prev_row1_ = next_row3_;
    } else {
      release_slot(prev_row2_);
      release_slot(prev_row1_);
      prev_row2_ = prev_row1_ = -1;
    }
    next_row2_ = next_row3_ = -1;
    x_ = 0;
    ++band_;
  }

  void store_row3(int c) {
    slot(next_row3_)[static_cast<std::size_t>(c)] = window_[static_cast<std::size_t>(c % 3)][3];
  }

  Rgb pixel(int r, int c) const {
    r = std::clamp(r, 0, height_ - 1);
    c = std::clamp(c, 0, width_ - 1);
    if (r >= row0_) return window_[static_cast<std::size_t>(c % 3)][static_cast<std::size_t>(r - row0_)];
    const int index = r == row0_ - 1 ? prev_row1_ : prev_row2_;
    return slots_[static_cast<std::size_t>(index)][static_cast<std::size_t>(c)];
  }

  template <typename Emit>
  void emit_column(int c, Emit&& emit) {
    GradientColumn out;
    out.x = c;
    out.row0 = band_ == 0 ? 0 : row0_ - 1;
    const int row_end = last_ ? height_ : row0_ + kBatchRows - 1;
    out.count = row_end - out.row0;
    for (int i = 0; i < out.count; ++i) {
      const int r = out.row0 + i;
      out.v[static_cast<std::size_t>(i)] = normed_gradient(pixel(r - 1, c), pixel(r + 1, c), pixel(r, c - 1), pixel(r, c + 1));
    }
    stats_.items_out += static_cast<std::uint64_t>(out.count);
    emit(out);
  }

  int width_;
  int height_;
  int bands_;
  int band_ = 0;
  int x_ = 0;
  int row0_ = 0;
  int valid_ = 0;
  bool last_ = false;

  std::array<std::vector<Rgb>, kGradientSlots> slots_;
  std::array<bool, kGradientSlots> busy_{};
  int prev_row2_ = -1;  // row 4b-2
  int prev_row1_ = -1;  // row 4b-1
  int next_row2_ = -1;  // row 4b+2
  int next_row3_ = -1;  // row 4b+3

  std::array<std::array<Rgb, kBatchRows>, 3> window_{};
  StageStats stats_;
};

// SVM stage. Every gradient row r yields, per anchor column, the eight row
// partials G_{1x8} . w_k (k = 0..7) which belong to anchors y = r - k. The
// partials accumulate in an eight-row ring indexed by y mod 8; an anchor's
// slot is reused by anchor y + 8 only after row y + 7 has completed it in
// that column, so eight rows of partial sums bound the stage.
class SvmStage {
 public:
  SvmStage(int width, int height, const SvmModel& model)
      : win_w_(width - kWindowSize + 1), win_h_(height - kWindowSize + 1), weights_(model.weights) {
    for (auto& row : acc_) row.assign(static_cast<std::size_t>(win_w_), 0.0);
    stats_.buffer_rows = kWindowSize;
  }

  const StageStats& stats() const { return stats_; }

  template <typename Emit>
  void push(const GradientColumn& col, Emit&& emit) {
    stats_.items_in += static_cast<std::uint64_t>(col.count);
    const std::size_t hx = static_cast<std::size_t>(col.x % kWindowSize);
    for (int i = 0; i < col.count; ++i) history_[static_cast<std::size_t>(i)][hx] = col.v[static_cast<std::size_t>(i)];
    if (col.x < kWindowSize - 1) return;

    const int x = col.x - (kWindowSize - 1);
    ScoreColumn out;
    out.x = x;
    for (int i = 0; i < col.count; ++i) {
      const int r = col.row0 + i;
      const auto& hist = history_[static_cast<std::size_t>(i)];
      for (int k = 0; k < kWindowSize; ++k) {
        const int y = r - k;
        if (y < 0 || y >= win_h_) continue;
        double partial = 0.0;
        for (int j = 0; j < kWindowSize; ++j) {
          partial += hist[static_cast<std::size_t>((x + j) % kWindowSize)] *
                     weights_[static_cast<std::size_t>(k * kWindowSize + j)];
        }
        const std::size_t s = static_cast<std::size_t>(y % kWindowSize);
        double& acc = acc_[s][static_cast<std::size_t>(x)];
        if (k == 0) {
          acc = 0.0;
          retain(s);
        }
        acc += partial;
        if (k == kWindowSize - 1) {
          if (out.count == 0) out.row0 = y;
          out.v[static_cast<std::size_t>(out.count++)] = acc;
          release(s);
        }
      }
    }
    stats_.peak_rows = std::max(stats_.peak_rows, live_slots_);
    if (out.count > 0) {
      stats_.items_out += static_cast<std::uint64_t>(out.count);
      emit(out);
    }
  }

 private:
  void retain(std::size_t s) {
    if (live_[s]++ == 0) ++live_slots_;
  }
  void release(std::size_t s) {
    if (--live_[s] == 0) --live_slots_;
  }

  int win_w_;
  int win_h_;
  std::array<double, kWindowArea> weights_;
  std::array<std::vector<double>, kWindowSize> acc_;
  std::array<int, kWindowSize> live_{};
  int live_slots_ = 0;
  std::array<std::array<std::uint8_t, kWindowSize>, kMaxGroupRows> history_{};
  StageStats stats_;
};

// NMS stage: 1x5 row maxima first, then the maximum over the tile's rows.
// Row maxima for the rows in flight (at most five) live in a memory window;
// finished rows fold into per-tile maxima for at most two tile rows. A tile
// row that completes while an earlier one is still open is held back so the
// output stays tile-row-major.
class NmsStage {
 public:
  NmsStage(int width, int height, int scale_id)
      : win_w_(width - kWindowSize + 1),
        win_h_(height - kWindowSize + 1),
        tiles_x_((win_w_ + kNmsTile - 1) / kNmsTile),
        tiles_y_((win_h_ + kNmsTile - 1) / kNmsTile),
        scale_id_(scale_id) {
    for (auto& row : tiles_) row.assign(static_cast<std::size_t>(tiles_x_), Best{});
    stats_.buffer_rows = kNmsTile;
  }

  bool complete() const { return emit_ty_ == tiles_y_; }
  const StageStats& stats() const { return stats_; }

  template <typename Emit>
  void push(const ScoreColumn& col, Emit&& emit) {
    stats_.items_in += static_cast<std::uint64_t>(col.count);
    stats_.peak_rows = std::max(stats_.peak_rows, col.count);
    const int tx = col.x / kNmsTile;
    if (col.x % kNmsTile == 0) row_best_.fill(Best{});
    for (int i = 0; i < col.count; ++i) {
      offer(row_best_[static_cast<std::size_t>(i)], {col.v[static_cast<std::size_t>(i)], col.x, col.row0 + i, true});
    }
    if (col.x != std::min(tx * kNmsTile + kNmsTile - 1, win_w_ - 1)) return;

    for (int i = 0; i < col.count; ++i) {
      const int y = col.row0 + i;
      const int ty = y / kNmsTile;
      Best& tile = tiles_[static_cast<std::size_t>(ty % 2)][static_cast<std::size_t>(tx)];
      offer(tile, row_best_[static_cast<std::size_t>(i)]);
      if (y == std::min(ty * kNmsTile + kNmsTile - 1, win_h_ - 1)) tile.done = true;
    }
    flush(emit);
  }

 private:
  struct Best {
    double score = 0.0;
    int x = 0;
    int y = 0;
    bool set = false;
    bool done = false;
  };

  // Offers arrive in ascending x within a row and ascending y across rows, so
  // strict comparison keeps the smallest (y, x) among equal maxima.
  static void offer(Best& into, const Best& b) {
    if (!into.set || b.score > into.score) {
      into.score = b.score;
      into.x = b.x;
      into.y = b.y;
      into.set = true;
    }
  }

  template <typename Emit>
  void flush(Emit&& emit) {
    while (emit_ty_ < tiles_y_) {
      Best& tile = tiles_[static_cast<std::size_t>(emit_ty_ % 2)][static_cast<std::size_t>(emit_tx_)];
      if (!tile.done) break;
      ++stats_.items_out;
      emit(Candidate{scale_id_, tile.x, tile.y, tile.score});
      tile = Best{};
      if (++emit_tx_ == tiles_x_) {
        emit_tx_ = 0;
        ++emit_ty_;
      }
    }
  }

  int win_w_;
  int win_h_;
  int tiles_x_;
  int tiles_y_;
  int scale_id_;
  std::array<Best, kMaxGroupRows> row_best_{};
  std::array<std::vector<Best>, 2> tiles_;
  int emit_ty_ = 0;
  int emit_tx_ = 0;
  StageStats stats_;
};

struct ProducerCancelled {};

}  // namespace

KernelStats& KernelStats::operator+=(const KernelStats& other) {
  auto add = [](StageStats& a, const StageStats& b) {
    a.items_in += b.items_in;
    a.items_out += b.items_out;
    a.peak_rows = std::max(a.peak_rows, b.peak_rows);
    a.buffer_rows = std::max(a.buffer_rows, b.buffer_rows);
  };
  add(gradient, other.gradient);
  add(svm, other.svm);
  add(nms, other.nms);
  fifo_capacity = std::max(fifo_capacity, other.fifo_capacity);
  fifo_peak = std::max(fifo_peak, other.fifo_peak);
  return *this;
}

struct StreamingKernel::Impl {
  Impl(int width, int height, const SvmModel& model, int scale_id, CandidateSink sink)
      : gradient(width, height), svm(width, height, model), nms(width, height, scale_id), emit(std::move(sink)) {}

  void push(const PixelBatch& batch) {
    gradient.push(batch, [this](const GradientColumn& g) {
      svm.push(g, [this](const ScoreColumn& s) { nms.push(s, emit); });
    });
    refresh();
  }

  void finish() {
    if (!gradient.complete() || !nms.complete()) throw StreamError("batch stream ended before the final band");
    refresh();
  }

  void refresh() {
    stats.gradient = gradient.stats();
    stats.svm = svm.stats();
    stats.nms = nms.stats();
  }

  GradientStage gradient;
  SvmStage svm;
  NmsStage nms;
  CandidateSink emit;
  KernelStats stats;
};

StreamingKernel::StreamingKernel(int width, int height, const SvmModel& model, int scale_id, CandidateSink emit) {
  if (width < kWindowSize || height < kWindowSize) throw InputError("kernel input must be at least 8x8");
  impl_ = std::make_unique<Impl>(width, height, model, scale_id, std::move(emit));
}

StreamingKernel::~StreamingKernel() = default;
StreamingKernel::StreamingKernel(StreamingKernel&&) noexcept = default;
StreamingKernel& StreamingKernel::operator=(StreamingKernel&&) noexcept = default;

void StreamingKernel::push(const PixelBatch& batch) { impl_->push(batch); }
void StreamingKernel::finish() { impl_->finish(); }
const KernelStats& StreamingKernel::stats() const { return impl_->stats; }

KernelStats kernel_stream(std::span<const PixelBatch> batches, int width, int height, const SvmModel& model,
                          int scale_id, const CandidateSink& consume, KernelOptions options) {
  BoundedQueue<Candidate> fifo(options.fifo_capacity);
  KernelStats stats;

  if (!options.threaded) {
    // Cooperative schedule: the consumer drains the FIFO after every batch and
    // whenever the producer finds it full.
    auto drain = [&] {
      while (auto c = fifo.try_pop()) consume(*c);
    };
    StreamingKernel kernel(width, height, model, scale_id, [&](const Candidate& c) {
      if (fifo.full()) drain();
      fifo.try_push(c);
    });
    for (const auto& batch : batches) {
      kernel.push(batch);
      drain();
    }
    kernel.finish();
    drain();
    stats = kernel.stats();
  } else {
    std::exception_ptr failure;
    StreamingKernel kernel(width, height, model, scale_id, [&](const Candidate& c) {
      if (!fifo.push(c)) throw ProducerCancelled{};
    });
    std::jthread producer([&] {
      try {
        for (const auto& batch : batches) kernel.push(batch);
        kernel.finish();
      } catch (const ProducerCancelled&) {
      } catch (...) {
        failure = std::current_exception();
      }
      fifo.close();
    });
    try {
      while (auto c = fifo.pop()) consume(*c);
    } catch (...) {
      fifo.close();
      throw;
    }
    producer.join();
    if (failure) std::rethrow_exception(failure);
    stats = kernel.stats();
  }
  stats.fifo_capacity = fifo.capacity();
  stats.fifo_peak = fifo.peak();
  return stats;
}

std::vector<Candidate> kernel_stream(std::span<const PixelBatch> batches, int width, int height,
                                     const SvmModel& model, int scale_id, KernelStats* stats,
                                     KernelOptions options) {
  std::vector<Candidate> out;
  const KernelStats s =
      kernel_stream(batches, width, height, model, scale_id, [&](const Candidate& c) { out.push_back(c); }, options);
  if (stats) *stats = s;
  return out;
}

}  // namespace streamprop
