#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streamprop/types.hpp"

namespace streamprop {

/// Reads a binary PPM ("P6", maxval 255). Throws ParseError carrying the byte
/// offset of the problem, or InputError when the file cannot be opened.
RgbImage load_ppm(const std::filesystem::path& path);
RgbImage parse_ppm(std::span<const std::uint8_t> bytes);

void save_ppm(const RgbImage& img, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_ppm(const RgbImage& img);

/// Reads `image_id,class_label,x0,y0,x1,y1` lines. Boxes are grouped per
/// image id in order of first appearance; errors carry the line number.
std::vector<GroundTruth> load_annotations(const std::filesystem::path& path);
std::vector<GroundTruth> parse_annotations(std::istream& in);

/// Reads 64 weight lines followed by optional `scale_id slope offset` lines.
SvmModel load_svm_model(const std::filesystem::path& path);
SvmModel parse_svm_model(std::istream& in);
void save_svm_model(const SvmModel& model, const std::filesystem::path& path);
std::string format_svm_model(const SvmModel& model);

struct CurvePoint {
  int nwin = 0;
  double value = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// `x0,y0,x1,y1,score` with six decimals, one row per proposal in input order.
void write_proposals(std::span<const Proposal> proposals, const std::filesystem::path& path);
std::string format_proposals(std::span<const Proposal> proposals);
std::vector<Proposal> parse_proposals(std::istream& in);

/// `nwin,value` rows sorted by ascending nwin.
void write_curve(std::span<const CurvePoint> points, const std::filesystem::path& path);
std::string format_curve(std::span<const CurvePoint> points);

}  // namespace streamprop
