#include "streamprop/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "streamprop/errors.hpp"

namespace streamprop {

RgbImage::RgbImage(int w, int h)
    : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

RgbImage::RgbImage(int w, int h, std::vector<std::uint8_t> bytes)
    : width(w), height(h), data(std::move(bytes)) {
  if (w < 1 || h < 1) throw InputError("image dimensions must be positive");
  if (data.size() != pixel_count() * 3) throw InputError("image data length does not match dimensions");
}

namespace {

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void write_all(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  out.flush();
  if (!out) throw Error("I/O failure writing '" + path.string() + "'");
}

// Header tokenizer for PPM: skips whitespace and '#' comments.
class PpmHeaderReader {
 public:
  PpmHeaderReader(std::span<const std::uint8_t> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }
  std::size_t token_start() const { return token_start_; }

  long read_number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    token_start_ = start;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string("PPM ") + what + " too large at byte " + std::to_string(start), start);
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("PPM header: expected ") + what + " at byte " + std::to_string(start), start);
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void expect_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("PPM header: expected whitespace after maxval at byte " + std::to_string(pos_), pos_);
    }
    ++pos_;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t next = line.find(sep, start);
    out.push_back(trim(line.substr(start, next - start)));
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& message) {
  throw ParseError("line " + std::to_string(line_no) + ": " + message, line_no);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string exact_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RgbImage parse_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw ParseError("unsupported magic at byte 0 (expected binary PPM 'P6')", 0);
  }
  PpmHeaderReader header(bytes, 2);
  const long width = header.read_number("width");
  const long height = header.read_number("height");
  if (width < 1 || height < 1) {
    throw ParseError("PPM dimensions must be positive near byte " + std::to_string(header.token_start()),
                     header.token_start());
  }
  const long maxval = header.read_number("maxval");
  const std::size_t maxval_pos = header.token_start();
  if (maxval != 255) {
    throw ParseError("unsupported maxval " + std::to_string(maxval) + " near byte " + std::to_string(maxval_pos) +
                         " (only 255 is accepted)",
                     maxval_pos);
  }
  header.expect_single_space();
  const std::size_t data_start = header.pos();
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  const std::size_t available = bytes.size() - data_start;
  if (available < expected) {
    throw ParseError("truncated pixel data: expected " + std::to_string(expected) + " bytes from byte " +
                         std::to_string(data_start) + ", file ends at byte " + std::to_string(bytes.size()),
                     bytes.size());
  }
  auto first = bytes.begin() + static_cast<std::ptrdiff_t>(data_start);
  return RgbImage(static_cast<int>(width), static_cast<int>(height),
                  std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(expected)));
}

RgbImage load_ppm(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_ppm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.location());
  }
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_ppm(img);
  write_all(path, std::string(bytes.begin(), bytes.end()));
}

std::vector<GroundTruth> parse_annotations(std::istream& in) {
  std::vector<GroundTruth> out;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (line_no == 1 && text == "image_id,class_label,x0,y0,x1,y1") continue;

    const auto fields = split(text, ',');
    if (fields.size() != 6) {
      line_error(line_no, "expected 6 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) line_error(line_no, "empty image_id");
    int c[4];
    for (int k = 0; k < 4; ++k) {
      if (!parse_number(fields[2 + k], c[k])) {
        line_error(line_no, "non-integer coordinate '" + std::string(fields[2 + k]) + "'");
      }
      if (c[k] < 0) line_error(line_no, "negative coordinate");
    }
    if (c[2] <= c[0]) line_error(line_no, "x1 must be greater than x0");
    if (c[3] <= c[1]) line_error(line_no, "y1 must be greater than y0");

    const std::string id(fields[0]);
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) out.push_back(GroundTruth{id, {}});
    out[it->second].objects.push_back({std::string(fields[1]), BoundingBox{c[0], c[1], c[2], c[3]}});
  }
  return out;
}

std::vector<GroundTruth> load_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_annotations(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.location());
  }
}

SvmModel parse_svm_model(std::istream& in) {
  SvmModel model;
  std::size_t weights = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto tokens = split_ws(text);
    if (tokens.size() == 1) {
      if (!model.calibration.empty()) line_error(line_no, "weight line after calibration lines");
      if (weights == kWindowArea) line_error(line_no, "expected 64 weights, found more");
      double w = 0;
      if (!parse_number(tokens[0], w) || !std::isfinite(w)) {
        line_error(line_no, "invalid weight '" + std::string(tokens[0]) + "'");
      }
      model.weights[weights++] = w;
    } else if (tokens.size() == 3) {
      if (weights != kWindowArea) {
        line_error(line_no, "expected 64 weights, found " + std::to_string(weights));
      }
      int scale_id = 0;
      Calibration cal;
      if (!parse_number(tokens[0], scale_id) || scale_id < 0) line_error(line_no, "invalid scale_id");
      if (!parse_number(tokens[1], cal.slope) || !std::isfinite(cal.slope)) line_error(line_no, "invalid slope");
      if (!parse_number(tokens[2], cal.offset) || !std::isfinite(cal.offset)) line_error(line_no, "invalid offset");
      if (!model.calibration.emplace(scale_id, cal).second) {
        line_error(line_no, "duplicate calibration for scale " + std::to_string(scale_id));
      }
    } else {
      line_error(line_no, "expected a weight or 'scale_id slope offset'");
    }
  }
  if (weights != kWindowArea) {
    throw ParseError("expected 64 weights, found " + std::to_string(weights), line_no);
  }
  return model;
}

SvmModel load_svm_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_svm_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.location());
  }
}

std::string format_svm_model(const SvmModel& model) {
  std::string out;
  for (double w : model.weights) out += exact_double(w) + "\n";
  for (const auto& [id, cal] : model.calibration) {
    out += std::to_string(id) + " " + exact_double(cal.slope) + " " + exact_double(cal.offset) + "\n";
  }
  return out;
}

void save_svm_model(const SvmModel& model, const std::filesystem::path& path) {
  write_all(path, format_svm_model(model));
}

std::string format_proposals(std::span<const Proposal> proposals) {
  std::string out = "x0,y0,x1,y1,score\n";
  for (const auto& p : proposals) {
    out += std::to_string(p.box.x0) + "," + std::to_string(p.box.y0) + "," + std::to_string(p.box.x1) + "," +
           std::to_string(p.box.y1) + "," + fixed6(p.score) + "\n";
  }
  return out;
}

void write_proposals(std::span<const Proposal> proposals, const std::filesystem::path& path) {
  write_all(path, format_proposals(proposals));
}

std::vector<Proposal> parse_proposals(std::istream& in) {
  std::vector<Proposal> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || (line_no == 1 && text == "x0,y0,x1,y1,score")) continue;
    const auto f = split(text, ',');
    Proposal p;
    if (f.size() != 5 || !parse_number(f[0], p.box.x0) || !parse_number(f[1], p.box.y0) ||
        !parse_number(f[2], p.box.x1) || !parse_number(f[3], p.box.y1) || !parse_number(f[4], p.score)) {
      line_error(line_no, "malformed proposal row");
    }
    out.push_back(p);
  }
  return out;
}

std::string format_curve(std::span<const CurvePoint> points) {
  std::vector<CurvePoint> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.nwin < b.nwin; });
  std::string out = "nwin,value\n";
  for (const auto& p : sorted) out += std::to_string(p.nwin) + "," + fixed6(p.value) + "\n";
  return out;
}

void write_curve(std::span<const CurvePoint> points, const std::filesystem::path& path) {
  write_all(path, format_curve(points));
}

}  // namespace streamprop
