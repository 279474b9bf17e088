#include "streamprop/synthetic.hpp"

#include <algorithm>
#include <random>

#include "streamprop/errors.hpp"
#include "streamprop/scaler.hpp"

namespace streamprop {

namespace {

// Portable draws: std::*_distribution output differs between standard libraries.
int draw(std::mt19937& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1));
}

std::uint8_t jitter(std::mt19937& rng, int base, int amplitude) {
  return static_cast<std::uint8_t>(std::clamp(base + draw(rng, -amplitude, amplitude), 0, 255));
}

}  // namespace

SyntheticImage planted_square(std::uint32_t seed, const std::string& image_id, const SyntheticOptions& options) {
  if (options.min_side < 1 || options.max_side < options.min_side || options.max_side > options.width ||
      options.max_side > options.height || options.noise < 0) {
    throw InputError("inconsistent synthetic image options");
  }
  std::mt19937 rng(seed);
  const int side = draw(rng, options.min_side, options.max_side);
  const int x0 = draw(rng, 0, options.width - side);
  const int y0 = draw(rng, 0, options.height - side);
  const Rgb background{static_cast<std::uint8_t>(draw(rng, 30, 70)), static_cast<std::uint8_t>(draw(rng, 30, 70)),
                       static_cast<std::uint8_t>(draw(rng, 30, 70))};
  const Rgb foreground{static_cast<std::uint8_t>(draw(rng, 180, 230)), static_cast<std::uint8_t>(draw(rng, 180, 230)),
                       static_cast<std::uint8_t>(draw(rng, 180, 230))};

  SyntheticImage out;
  out.image = RgbImage(options.width, options.height);
  for (int y = 0; y < options.height; ++y) {
    for (int x = 0; x < options.width; ++x) {
      const bool inside = x >= x0 && x < x0 + side && y >= y0 && y < y0 + side;
      const Rgb base = inside ? foreground : background;
      out.image.set(x, y, {jitter(rng, base.r, options.noise), jitter(rng, base.g, options.noise),
                           jitter(rng, base.b, options.noise)});
    }
  }
  out.truth.image_id = image_id;
  out.truth.objects.push_back({"square", BoundingBox{x0, y0, x0 + side - 1, y0 + side - 1}});
  return out;
}

SvmModel center_surround_model(std::span<const int> base_sizes) {
  SvmModel model;
  for (int r = 0; r < kWindowSize; ++r) {
    for (int c = 0; c < kWindowSize; ++c) {
      const int ring = std::min(std::min(r, c), std::min(kWindowSize - 1 - r, kWindowSize - 1 - c));
      model.weights[static_cast<std::size_t>(r * kWindowSize + c)] = ring == 0 ? 1.0 : ring == 1 ? 0.0 : -1.0;
    }
  }
  // Scale ids depend only on the base-size list, so any image size will do.
  for (const auto& spec : generate_scales(kWindowSize, kWindowSize, base_sizes)) {
    if (spec.base_w != spec.base_h) model.calibration[spec.scale_id] = {0.9, 0.0};
  }
  return model;
}

SvmModel center_surround_model() {
  const auto sizes = default_base_sizes();
  return center_surround_model(sizes);
}

}  // namespace streamprop
