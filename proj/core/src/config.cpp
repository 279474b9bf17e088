#include "streamprop/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>

#include "streamprop/errors.hpp"

namespace streamprop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw InputError("invalid value '" + std::string(value) + "' for config key '" + std::string(key) + "'");
}

int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, text);
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) bad_value(key, text);
  return v;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') bad_value(key, text);
    text = text.substr(1, text.size() - 2);
  }
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = trim(text.substr(start, comma - start));
    if (item.empty()) bad_value(key, text);
    out.push_back(parse_int(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string_view to_string(Scheduler s) { return s == Scheduler::kPlain ? "plain" : "pingpong"; }

void PipelineConfig::validate() const {
  if (base_sizes.empty()) throw InputError("base_sizes must not be empty");
  for (int s : base_sizes) {
    if (s < 8) throw InputError("every base size must be at least 8");
  }
  if (top_n_per_scale < 1) throw InputError("top_n_per_scale must be positive");
  if (top_k < 1) throw InputError("top_k must be positive");
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) throw InputError("iou_thresh must lie in (0, 1)");
  if (budgets.empty()) throw InputError("budgets must not be empty");
  for (int b : budgets) {
    if (b < 1) throw InputError("every budget must be positive");
  }
  if (threads < 1) throw InputError("threads must be positive");
  if (fifo_capacity < 1) throw InputError("fifo_capacity must be positive");
}

namespace {

void assign(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = unquote(value);
  if (key == "base_sizes") {
    cfg.base_sizes = parse_int_list(key, value);
  } else if (key == "scheduler") {
    if (value == "plain") {
      cfg.scheduler = Scheduler::kPlain;
    } else if (value == "pingpong") {
      cfg.scheduler = Scheduler::kPingPong;
    } else {
      bad_value(key, value);
    }
  } else if (key == "top_n_per_scale") {
    cfg.top_n_per_scale = parse_int(key, value);
  } else if (key == "top_k") {
    cfg.top_k = parse_int(key, value);
  } else if (key == "iou_thresh") {
    cfg.iou_thresh = parse_double(key, value);
  } else if (key == "budgets") {
    cfg.budgets = parse_int_list(key, value);
  } else if (key == "model_path") {
    cfg.model_path = std::string(value);
  } else if (key == "threads") {
    cfg.threads = parse_int(key, value);
  } else if (key == "fifo_capacity") {
    cfg.fifo_capacity = parse_int(key, value);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  PipelineConfig next = cfg;
  assign(next, key, value);
  next.validate();
  cfg = std::move(next);
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    // Strip trailing comments that are not inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '"') quoted = !quoted;
      if (text[i] == '#' && !quoted) {
        text = text.substr(0, i);
        break;
      }
    }
    text = trim(text);
    if (text.empty() || text.front() == '[') continue;  // blank line or table header
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value", line_no);
    }
    try {
      apply_setting(base, text.substr(0, eq), text.substr(eq + 1));
    } catch (const InputError& e) {
      throw ParseError("config line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

std::string format_config(const PipelineConfig& cfg) {
  char thresh[64];
  std::snprintf(thresh, sizeof thresh, "%.17g", cfg.iou_thresh);
  std::string out;
  out += "base_sizes = [" + join(cfg.base_sizes) + "]\n";
  out += "scheduler = \"" + std::string(to_string(cfg.scheduler)) + "\"\n";
  out += "top_n_per_scale = " + std::to_string(cfg.top_n_per_scale) + "\n";
  out += "top_k = " + std::to_string(cfg.top_k) + "\n";
  out += "iou_thresh = " + std::string(thresh) + "\n";
  out += "budgets = [" + join(cfg.budgets) + "]\n";
  if (!cfg.model_path.empty()) out += "model_path = \"" + cfg.model_path + "\"\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  out += "fifo_capacity = " + std::to_string(cfg.fifo_capacity) + "\n";
  return out;
}

}  // namespace streamprop
