#include "streamprop/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <thread>

#include "streamprop/errors.hpp"
#include "streamprop/imageio.hpp"
#include "streamprop/selector.hpp"

namespace streamprop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ScaleOutput {
  std::vector<Candidate> selected;
  ScaleReport report;
};

ScaleOutput process_scale(const RgbImage& img, const ScaleSpec& spec, const PipelineConfig& cfg,
                          const SvmModel& model) {
  ScaleOutput out;
  out.report.spec = spec;
  const RgbImage resized = resize_bilinear(img, spec);

  std::vector<PixelBatch> batches;
  if (cfg.scheduler == Scheduler::kPingPong) {
    auto streamed = pingpong_stream(resized);
    batches = std::move(streamed.batches);
    out.report.trace = summarize(streamed.trace);
  } else {
    batches = stream_batches(resized);
  }

  CandidateHeap heap(static_cast<std::size_t>(cfg.top_n_per_scale));
  KernelOptions options;
  options.fifo_capacity = static_cast<std::size_t>(cfg.fifo_capacity);
  out.report.stats = kernel_stream(
      batches, resized.width, resized.height, model, spec.scale_id,
      [&](const Candidate& c) {
        ++out.report.candidates;
        heap.push(c);
      },
      options);
  out.selected = heap.finalize();
  out.report.selected = out.selected.size();
  return out;
}

// Runs work(i) for i in [0, n) on up to `threads` workers and rethrows the
// failure with the lowest index.
template <typename Work>
void parallel_for(std::size_t n, int threads, Work&& work) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            work(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 1099511628211ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ULL;
};

}  // namespace

TraceSummary summarize(const StreamTrace& trace) {
  TraceSummary s;
  s.warmup_steps = trace.warmup_steps;
  s.total_steps = trace.total_steps;
  s.gap_count = trace.gap_count;
  const auto groups = trace.lane_groups();
  s.lane_switches = groups.empty() ? 0 : groups.size() - 1;
  return s;
}

KernelStats ImageReport::totals() const {
  KernelStats total;
  for (const auto& s : scales) total += s.stats;
  return total;
}

PipelineResult run_pipeline(const RgbImage& img, const PipelineConfig& cfg, const SvmModel& model) {
  cfg.validate();
  if (img.width < kWindowSize || img.height < kWindowSize) throw InputError("image must be at least 8x8");
  const auto start = Clock::now();

  const auto specs = generate_scales(img.width, img.height, cfg.base_sizes);
  std::vector<ScaleOutput> outputs(specs.size());
  parallel_for(specs.size(), cfg.threads, [&](std::size_t i) { outputs[i] = process_scale(img, specs[i], cfg, model); });

  // Deterministic merge: scale_id order, each scale in its ranked order.
  ProposalHeap heap(static_cast<std::size_t>(cfg.top_k));
  PipelineResult result;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (const auto& c : outputs[i].selected) {
      heap.push(Proposal{window_to_bbox(c, specs[i], img.width, img.height), stage2_calibrate(c, model), c.scale_id});
    }
    result.report.scales.push_back(std::move(outputs[i].report));
  }
  result.proposals = heap.finalize();
  result.report.seconds = seconds_since(start);
  return result;
}

std::uint64_t proposals_digest(std::span<const Proposal> proposals) {
  Fnv1a h;
  h.update(format_proposals(proposals));
  return h.value();
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

EvalResult run_eval(const std::filesystem::path& image_dir, std::span<const GroundTruth> annotations,
                    const PipelineConfig& cfg, const SvmModel& model, const std::filesystem::path& out_dir) {
  cfg.validate();
  EvalResult result;
  std::vector<GroundTruth> present;
  for (const auto& gt : annotations) {
    const auto path = image_dir / (gt.image_id + ".ppm");
    if (!std::filesystem::exists(path)) {
      result.warnings.push_back("image '" + gt.image_id + "' not found at " + path.string() + "; excluded");
      continue;
    }
    const RgbImage img = load_ppm(path);
    result.proposals[gt.image_id] = run_pipeline(img, cfg, model).proposals;
    result.objects += gt.objects.size();
    present.push_back(gt);
  }
  result.images_evaluated = present.size();
  result.detection_rate = detection_rate(result.proposals, present, cfg.iou_thresh, cfg.budgets);
  result.mabo = mabo(result.proposals, present, cfg.budgets);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_curve(result.detection_rate, out_dir / "dr.csv");
    write_curve(result.mabo, out_dir / "mabo.csv");
  }
  return result;
}

BenchReport run_bench(std::span<const BenchImage> images, const PipelineConfig& cfg, const SvmModel& model,
                      int repeats) {
  if (images.empty()) throw InputError("bench needs at least one image");
  if (repeats < 1) throw InputError("repeats must be at least 1");
  cfg.validate();

  BenchReport report;
  report.images = images.size();
  report.repeats = repeats;
  report.scheduler = cfg.scheduler;
  for (int rep = 0; rep < repeats; ++rep) {
    Fnv1a digest;
    KernelStats stats;
    std::vector<double> image_seconds;
    std::vector<std::vector<ScaleReport>> scales;
    const auto start = Clock::now();
    for (const auto& item : images) {
      auto result = run_pipeline(item.image, cfg, model);
      digest.update(item.name);
      digest.update(format_proposals(result.proposals));
      stats += result.report.totals();
      image_seconds.push_back(result.report.seconds);
      scales.push_back(std::move(result.report.scales));
    }
    const double elapsed = std::max(seconds_since(start), 1e-9);
    report.seconds_samples.push_back(elapsed);
    report.fps_samples.push_back(static_cast<double>(images.size()) / elapsed);
    report.digests.push_back(digest.value());
    if (rep == 0) {
      report.stats = stats;
    } else if (!(stats == report.stats) || digest.value() != report.digests.front()) {
      report.deterministic = false;
    }
    report.image_seconds = std::move(image_seconds);
    report.scales = std::move(scales);
  }
  std::vector<double> sorted = report.fps_samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  report.median_fps = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return report;
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace streamprop
