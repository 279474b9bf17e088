#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace streamprop {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster with top-left origin. `data` holds
/// width * height * 3 bytes in R, G, B order.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h);
  RgbImage(int w, int h, std::vector<std::uint8_t> bytes);

  Rgb at(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set(int x, int y, Rgb p) {
    const std::size_t i = offset(x, y);
    data[i] = p.r;
    data[i + 1] = p.g;
    data[i + 2] = p.b;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) * 3;
  }
};

/// Inclusive-corner pixel box (PASCAL VOC convention).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  long long area() const {
    return static_cast<long long>(x1 - x0 + 1) * static_cast<long long>(y1 - y0 + 1);
  }
  bool valid() const { return x1 >= x0 && y1 >= y0; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct GroundTruthObject {
  std::string class_label;
  BoundingBox box;

  friend bool operator==(const GroundTruthObject&, const GroundTruthObject&) = default;
};

struct GroundTruth {
  std::string image_id;
  std::vector<GroundTruthObject> objects;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Per-scale affine stage-II calibration: final = slope * score + offset.
struct Calibration {
  double slope = 1.0;
  double offset = 0.0;

  friend bool operator==(const Calibration&, const Calibration&) = default;
};

inline constexpr int kWindowSize = 8;
inline constexpr int kWindowArea = kWindowSize * kWindowSize;

/// Stage-I window weights (row-major over the 8x8 window) and stage-II
/// per-scale calibration. Scales without an entry use the identity.
struct SvmModel {
  std::array<double, kWindowArea> weights{};
  std::map<int, Calibration> calibration;

  Calibration calibration_for(int scale_id) const {
    auto it = calibration.find(scale_id);
    return it == calibration.end() ? Calibration{} : it->second;
  }

  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

/// NMS survivor: the anchor (top-left) of an 8x8 window in resized coordinates.
struct Candidate {
  int scale_id = 0;
  int x = 0;
  int y = 0;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Proposal {
  BoundingBox box;
  double score = 0.0;
  int scale_id = 0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

}  // namespace streamprop
