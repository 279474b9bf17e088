#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "streamprop/types.hpp"

namespace streamprop {

struct SyntheticOptions {
  int width = 160;
  int height = 120;
  int min_side = 24;
  int max_side = 72;
  int noise = 10;  // per-channel amplitude of the background/foreground texture
};

struct SyntheticImage {
  RgbImage image;
  GroundTruth truth;
};

/// A noisy dark background with one bright axis-aligned square; the square is
/// the single ground-truth object (class "square"). Same seed, same image.
SyntheticImage planted_square(std::uint32_t seed, const std::string& image_id, const SyntheticOptions& options = {});

/// Hand-made window weights: +1 on the outer ring of the 8x8 window, 0 on the
/// next ring, -1 on the 4x4 centre. High when a window frames a closed contour.
/// Non-square scales of `base_sizes` get a stage-II slope of 0.9.
SvmModel center_surround_model(std::span<const int> base_sizes);
SvmModel center_surround_model();

}  // namespace streamprop
