#include "streamprop/scaler.hpp"

#include <algorithm>
#include <cmath>

#include "streamprop/errors.hpp"

namespace streamprop {

namespace {

// round(num / den) with halves rounded up, for non-negative operands.
long long round_div(long long num, long long den) { return (2 * num + den) / (2 * den); }

struct Tap {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double ratio = static_cast<double>(src) / static_cast<double>(dst);
  for (int i = 0; i < dst; ++i) {
    double pos = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(pos));
    taps[static_cast<std::size_t>(i)] = {lo, std::min(lo + 1, src - 1), pos - lo};
  }
  return taps;
}

}  // namespace

std::vector<int> default_base_sizes() { return {16, 32, 64, 128, 256}; }

std::vector<ScaleSpec> generate_scales(int orig_w, int orig_h, std::span<const int> base_sizes) {
  if (base_sizes.empty()) throw InputError("base_sizes must not be empty");
  if (orig_w < kWindowSize || orig_h < kWindowSize) {
    throw InputError("image must be at least 8x8 to host a window");
  }
  std::vector<int> sizes(base_sizes.begin(), base_sizes.end());
  for (int s : sizes) {
    if (s < kWindowSize) throw InputError("every base size must be at least 8");
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  auto target = [](int orig, int base) {
    return static_cast<int>(std::max<long long>(kWindowSize, round_div(static_cast<long long>(orig) * kWindowSize, base)));
  };

  std::vector<ScaleSpec> specs;
  specs.reserve(sizes.size() * sizes.size());
  for (int bw : sizes) {
    for (int bh : sizes) {
      specs.push_back({static_cast<int>(specs.size()), bw, bh, target(orig_w, bw), target(orig_h, bh)});
    }
  }
  return specs;
}

RgbImage resize_bilinear(const RgbImage& img, const ScaleSpec& spec) {
  return resize_bilinear(img, spec.target_w, spec.target_h);
}

RgbImage resize_bilinear(const RgbImage& img, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1) throw InputError("resize target must be positive");
  if (target_w == img.width && target_h == img.height) return img;

  const auto xs = bilinear_taps(img.width, target_w);
  const auto ys = bilinear_taps(img.height, target_h);
  RgbImage out(target_w, target_h);
  const std::size_t src_stride = static_cast<std::size_t>(img.width) * 3;
  std::size_t o = 0;
  for (const Tap& ty : ys) {
    const std::uint8_t* top = img.data.data() + static_cast<std::size_t>(ty.lo) * src_stride;
    const std::uint8_t* bot = img.data.data() + static_cast<std::size_t>(ty.hi) * src_stride;
    for (const Tap& tx : xs) {
      const std::size_t a = static_cast<std::size_t>(tx.lo) * 3;
      const std::size_t b = static_cast<std::size_t>(tx.hi) * 3;
      for (std::size_t c = 0; c < 3; ++c) {
        const double upper = (1.0 - tx.frac) * top[a + c] + tx.frac * top[b + c];
        const double lower = (1.0 - tx.frac) * bot[a + c] + tx.frac * bot[b + c];
        const double v = (1.0 - ty.frac) * upper + ty.frac * lower;
        out.data[o++] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

int band_count(int height) { return (height + kBatchRows - 1) / kBatchRows; }

PixelBatch make_batch(const RgbImage& img, int band, int x) {
  PixelBatch batch;
  batch.x = x;
  batch.band = band;
  const int row0 = band * kBatchRows;
  batch.valid = std::min(kBatchRows, img.height - row0);
  for (int r = 0; r < kBatchRows; ++r) {
    batch.pixels[static_cast<std::size_t>(r)] = img.at(x, row0 + std::min(r, batch.valid - 1));
  }
  return batch;
}

std::optional<PixelBatch> BatchStreamer::next() {
  if (band_ >= band_count(img_->height)) return std::nullopt;
  PixelBatch batch = make_batch(*img_, band_, x_);
  if (++x_ == img_->width) {
    x_ = 0;
    ++band_;
  }
  return batch;
}

std::size_t BatchStreamer::total() const {
  return static_cast<std::size_t>(band_count(img_->height)) * static_cast<std::size_t>(img_->width);
}

std::vector<PixelBatch> stream_batches(const RgbImage& img) {
  BatchStreamer streamer(img);
  std::vector<PixelBatch> out;
  out.reserve(streamer.total());
  while (auto b = streamer.next()) out.push_back(*b);
  return out;
}

RgbImage reassemble(std::span<const PixelBatch> batches, int width, int height) {
  RgbImage out(width, height);
  for (const auto& b : batches) {
    for (int r = 0; r < b.valid; ++r) {
      const int y = b.band * kBatchRows + r;
      if (b.x < 0 || b.x >= width || y >= height) throw StreamError("batch outside image bounds");
      out.set(b.x, y, b.pixels[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

std::vector<int> StreamTrace::lane_groups() const {
  std::vector<int> groups;
  for (const auto& e : emissions) {
    if (groups.empty() || groups.back() != e.lane) groups.push_back(e.lane);
  }
  return groups;
}

}  // namespace streamprop
