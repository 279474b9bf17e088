#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "streamprop/scaler.hpp"

namespace streamprop {

enum class Scheduler { kPlain, kPingPong };

std::string_view to_string(Scheduler s);

/// Operating point of the proposal pipeline. Defaults: 25 scales from
/// {16..256}, plain scheduler, 150 per scale, 1000 overall, IoU 0.4,
/// budgets {1, 10, 100, 1000}.
struct PipelineConfig {
  std::vector<int> base_sizes = default_base_sizes();
  Scheduler scheduler = Scheduler::kPlain;
  int top_n_per_scale = 150;
  int top_k = 1000;
  double iou_thresh = 0.4;
  std::vector<int> budgets = {1, 10, 100, 1000};
  std::string model_path;
  int threads = 1;
  int fifo_capacity = 64;

  /// Throws InputError on out-of-range values.
  void validate() const;
};

/// Sets one key from its textual value; unknown keys and bad values throw
/// InputError. Lists accept "16,32" or "[16, 32]".
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key = value` lines ('#' starts a comment) on top of `base`.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Text form accepted by parse_config.
std::string format_config(const PipelineConfig& cfg);

}  // namespace streamprop
