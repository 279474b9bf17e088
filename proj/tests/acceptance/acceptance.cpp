// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "streamprop/eval.hpp"
#include "streamprop/kernel.hpp"
#include "streamprop/pipeline.hpp"
#include "streamprop/scaler.hpp"
#include "streamprop/selector.hpp"
#include "streamprop/synthetic.hpp"
#include "support/oracles.hpp"

namespace sp = streamprop;
namespace oracle = streamprop::oracle;

namespace {

// Pinned sample sizes, time limits and thresholds.
constexpr int kKernelImages = 500;
constexpr double kKernelSeconds = 30.0;
constexpr int kTopkStreams = 1200;
constexpr int kTopkMaxLength = 5000;
constexpr double kTopkSeconds = 10.0;
constexpr int kSpotChecks = 10'000;
constexpr int kNmsMaps = 2000;
constexpr int kSchedulerImages = 500;
constexpr int kGapFreeMinSide = 32;
constexpr int kMetricFixtures = 500;
constexpr int kSyntheticImages = 50;
constexpr double kSyntheticIou = 0.5;
constexpr int kSyntheticBudget = 10;
constexpr double kSyntheticMinDr = 0.9;
constexpr double kSyntheticSeconds = 60.0;
constexpr int kBenchRepeats = 3;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body, double limit_seconds = 0.0) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_seconds > 0.0 && secs >= limit_seconds) {
    out.pass = false;
    out.detail += " [over time limit " + std::to_string(static_cast<int>(limit_seconds)) + "s]";
  }
  if (!out.pass) ++failures;
  std::printf("criterion %d: %s  %s -- %s (%.2fs)\n", id, out.pass ? "PASS" : "FAIL", title, out.detail.c_str(),
              secs);
  std::fflush(stdout);
}

int uniform(std::mt19937& rng, int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); }

Outcome streaming_matches_dense() {
  std::mt19937 rng(20240601);
  int checked = 0;
  std::size_t candidates = 0;
  for (int i = 0; i < kKernelImages; ++i) {
    const int w = uniform(rng, 8, 64), h = uniform(rng, 8, 64);
    const sp::RgbImage img = oracle::random_image(rng, w, h);
    const sp::SvmModel model = oracle::random_integer_model(rng);
    const auto batches = sp::stream_batches(img);
    sp::KernelOptions opts;
    opts.threaded = i % 2 == 1;
    const auto streamed = sp::kernel_stream(batches, w, h, model, i, nullptr, opts);
    const auto dense = sp::dense_pipeline(img, model, i);
    const auto brute = oracle::pipeline(img, model, i);
    if (streamed != dense || dense != brute) {
      return {false, "mismatch on image " + std::to_string(i) + " (" + std::to_string(w) + "x" + std::to_string(h) + ")"};
    }
    ++checked;
    candidates += streamed.size();
  }
  return {true, std::to_string(checked) + " images, " + std::to_string(candidates) +
                    " candidates identical (streaming = dense = brute force)"};
}

Outcome topk_matches_sort() {
  std::mt19937 rng(77);
  const std::size_t ks[] = {1, 10, 100, 1000};
  for (int i = 0; i < kTopkStreams; ++i) {
    const std::size_t k = ks[i % 4];
    const std::size_t n = static_cast<std::size_t>(uniform(rng, 0, kTopkMaxLength));
    // Distinct scores: a shuffled arithmetic sequence with a random offset.
    std::vector<double> stream(n);
    const double offset = static_cast<double>(uniform(rng, -100000, 100000));
    for (std::size_t j = 0; j < n; ++j) stream[j] = offset + 0.5 * static_cast<double>(j);
    std::shuffle(stream.begin(), stream.end(), rng);

    sp::ProposalHeap heap(k);
    for (double s : stream) heap.push({{0, 0, 0, 0}, s, 0});
    if (!heap.heap_property_holds() || heap.size() != std::min(k, n)) {
      return {false, "heap invariant broken on stream " + std::to_string(i)};
    }
    if (heap.max_sift_depth() > static_cast<int>(std::ceil(std::log2(static_cast<double>(k))))) {
      return {false, "sift depth above ceil(log2 k) on stream " + std::to_string(i)};
    }
    std::vector<double> got;
    for (const auto& p : heap.finalize()) got.push_back(p.score);
    if (got != oracle::top_k(stream, k)) return {false, "result differs from oracle on stream " + std::to_string(i)};
  }
  return {true, std::to_string(kTopkStreams) + " streams, k in {1,10,100,1000}, lengths 0-5000"};
}

Outcome formula_spot_checks() {
  std::mt19937 rng(5150);
  auto pixel = [&] {
    return sp::Rgb{static_cast<std::uint8_t>(rng() & 255), static_cast<std::uint8_t>(rng() & 255),
                   static_cast<std::uint8_t>(rng() & 255)};
  };
  auto arr = [](sp::Rgb p) { return std::array<int, 3>{p.r, p.g, p.b}; };

  for (int i = 0; i < kSpotChecks; ++i) {
    const sp::Rgb a = pixel(), b = pixel();
    if (sp::rgb_distance(a, b) != oracle::distance(arr(a), arr(b))) return {false, "rgb_distance case " + std::to_string(i)};
  }

  // Gradient: 3x3 neighbourhoods, half of them biased towards saturation.
  int saturated = 0;
  for (int i = 0; i < kSpotChecks; ++i) {
    sp::RgbImage img = oracle::random_image(rng, 3, 3);
    if (i % 2) {
      img.set(1, 0, {0, 0, 0});
      img.set(1, 2, {static_cast<std::uint8_t>(uniform(rng, 100, 255)), 0, 0});
      img.set(0, 1, {0, 0, 0});
      img.set(2, 1, {0, static_cast<std::uint8_t>(uniform(rng, 100, 255)), 0});
    }
    const int g = sp::calc_gradients_dense(img).at(1, 1);
    const int ix = oracle::distance(oracle::px(img, 1, 0), oracle::px(img, 1, 2));
    const int iy = oracle::distance(oracle::px(img, 0, 1), oracle::px(img, 2, 1));
    const int expected = ix + iy > 255 ? 255 : ix + iy;
    if (g != expected) return {false, "gradient case " + std::to_string(i)};
    saturated += ix + iy > 255;
  }

  // SVM: one 8x8 window per case, integer weights up to +-1000.
  for (int i = 0; i < kSpotChecks; ++i) {
    sp::GradientMap grad{8, 8, std::vector<std::uint8_t>(64)};
    std::vector<int> gi(64);
    for (std::size_t j = 0; j < 64; ++j) gi[j] = grad.g[j] = static_cast<std::uint8_t>(rng() & 255);
    const sp::SvmModel model = oracle::random_integer_model(rng, 1000);
    const auto s = sp::svm_score_dense(grad, model);
    if (s.s.size() != 1 || s.s[0] != static_cast<double>(oracle::window_scores(gi, 8, 8, model)[0])) {
      return {false, "svm case " + std::to_string(i)};
    }
  }
  return {true, std::to_string(kSpotChecks) + " cases each for distance, gradient (" + std::to_string(saturated) +
                    " saturated) and 64-term dot product"};
}

Outcome nms_tiling() {
  std::mt19937 rng(4242);
  std::size_t total = 0;
  for (int i = 0; i < kNmsMaps; ++i) {
    const int w = uniform(rng, 1, 40), h = uniform(rng, 1, 40);
    sp::ScoreMap map{w, h, std::vector<double>(static_cast<std::size_t>(w * h))};
    const int spread = i % 3 == 0 ? 3 : 100000;  // some maps full of ties
    for (auto& v : map.s) v = static_cast<double>(uniform(rng, -spread, spread));
    const auto cands = sp::nms_select_dense(map, 0);
    const std::size_t expected = static_cast<std::size_t>(((w + 4) / 5) * ((h + 4) / 5));
    if (cands.size() != expected) return {false, "count mismatch on map " + std::to_string(i)};
    for (std::size_t t = 0; t < cands.size(); ++t) {
      const int tiles_x = (w + 4) / 5;
      const int tx = static_cast<int>(t) % tiles_x, ty = static_cast<int>(t) / tiles_x;
      const auto& c = cands[t];
      if (c.x / 5 != tx || c.y / 5 != ty) return {false, "candidate outside its tile on map " + std::to_string(i)};
      if (c.score != map.at(c.x, c.y)) return {false, "score mismatch on map " + std::to_string(i)};
      for (int y = ty * 5; y < std::min(h, ty * 5 + 5); ++y) {
        for (int x = tx * 5; x < std::min(w, tx * 5 + 5); ++x) {
          const double v = map.at(x, y);
          const bool earlier = y < c.y || (y == c.y && x < c.x);
          if (v > c.score || (v == c.score && earlier)) return {false, "non-maximal candidate on map " + std::to_string(i)};
        }
      }
    }
    total += cands.size();
  }
  return {true, std::to_string(kNmsMaps) + " maps, " + std::to_string(total) +
                    " candidates, count = ceil(w/5)*ceil(h/5), each the tile max"};
}

Outcome scheduler_equivalence() {
  std::mt19937 rng(99);
  int gap_free_checked = 0;
  std::size_t gaps = 0;
  for (int i = 0; i < kSchedulerImages; ++i) {
    const int w = uniform(rng, 1, 96), h = uniform(rng, 1, 96);
    const sp::RgbImage img = oracle::random_image(rng, w, h);
    const auto pp = sp::pingpong_stream(img);
    if (pp.batches != sp::stream_batches(img)) return {false, "sequence differs on image " + std::to_string(i)};
    if (w >= kGapFreeMinSide && h >= kGapFreeMinSide) {
      ++gap_free_checked;
      gaps += pp.trace.gap_count;
    }
  }
  if (gaps != 0) return {false, std::to_string(gaps) + " post-warm-up gaps on images >= 32x32"};
  return {true, std::to_string(kSchedulerImages) + " images identical; " + std::to_string(gap_free_checked) +
                    " images >= 32x32 with gap_count = 0"};
}

Outcome metric_monotonicity() {
  std::mt19937 rng(31337);
  auto box = [&] {
    const int x0 = uniform(rng, 0, 100), y0 = uniform(rng, 0, 100);
    return sp::BoundingBox{x0, y0, x0 + uniform(rng, 0, 40), y0 + uniform(rng, 0, 40)};
  };
  for (int i = 0; i < kSpotChecks; ++i) {
    const sp::BoundingBox a = box(), b = box();
    if (sp::iou(a, b) != sp::iou(b, a) || sp::iou(a, a) != 1.0) return {false, "iou symmetry/identity case " + std::to_string(i)};
  }
  const std::vector<int> budgets{1, 2, 5, 10, 20, 50, 100};
  for (int f = 0; f < kMetricFixtures; ++f) {
    std::vector<sp::GroundTruth> gt;
    sp::ProposalSet ps;
    const int images = uniform(rng, 1, 6);
    for (int i = 0; i < images; ++i) {
      sp::GroundTruth g{"i" + std::to_string(i), {}};
      const int objects = uniform(rng, 0, 4);
      for (int o = 0; o < objects; ++o) g.objects.push_back({std::string(1, static_cast<char>('a' + uniform(rng, 0, 2))), box()});
      const int n = uniform(rng, 0, 120);
      for (int p = 0; p < n; ++p) ps[g.image_id].push_back({box(), -static_cast<double>(p), 0});
      gt.push_back(std::move(g));
    }
    gt.push_back({"anchor", {{"a", box()}}});
    const auto dr = sp::detection_rate(ps, gt, 0.4, budgets);
    const auto dr_strict = sp::detection_rate(ps, gt, 0.7, budgets);
    const auto mb = sp::mabo(ps, gt, budgets);
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      if (dr_strict[i].value > dr[i].value) return {false, "threshold monotonicity on fixture " + std::to_string(f)};
      if (i > 0 && (dr[i].value < dr[i - 1].value || mb[i].value < mb[i - 1].value)) {
        return {false, "budget monotonicity on fixture " + std::to_string(f)};
      }
    }
  }
  return {true, std::to_string(kSpotChecks) + " iou pairs; " + std::to_string(kMetricFixtures) +
                    " fixtures with DR and MABO non-decreasing in #WIN"};
}

Outcome synthetic_detection_rate() {
  const sp::SvmModel model = sp::center_surround_model();
  const sp::PipelineConfig cfg;
  std::vector<sp::GroundTruth> gt;
  sp::ProposalSet ps;
  std::map<std::string, std::vector<sp::BoundingBox>> boxes;
  for (int i = 0; i < kSyntheticImages; ++i) {
    const std::string id = "square" + std::to_string(i);
    const auto s = sp::planted_square(static_cast<std::uint32_t>(i), id);
    auto result = sp::run_pipeline(s.image, cfg, model);
    for (const auto& p : result.proposals) boxes[id].push_back(p.box);
    ps[id] = std::move(result.proposals);
    gt.push_back(s.truth);
  }
  const std::vector<int> budgets{kSyntheticBudget};
  const double dr = sp::detection_rate(ps, gt, kSyntheticIou, budgets).front().value;
  const double brute = oracle::detection_rate(boxes, gt, kSyntheticIou, kSyntheticBudget);
  char buf[160];
  std::snprintf(buf, sizeof buf, "DR@%d (IoU %.1f) = %.4f over %d images, brute-force evaluator = %.4f, need >= %.2f",
                kSyntheticBudget, kSyntheticIou, dr, kSyntheticImages, brute, kSyntheticMinDr);
  return {dr == brute && dr >= kSyntheticMinDr, buf};
}

Outcome bench_report() {
  std::mt19937 rng(8);
  std::vector<sp::BenchImage> images;
  for (int i = 0; i < 3; ++i) {
    images.push_back({"img" + std::to_string(i), oracle::blocky_image(rng, uniform(rng, 60, 200), uniform(rng, 60, 200))});
  }
  const sp::SvmModel model = oracle::random_integer_model(rng);
  sp::PipelineConfig cfg;
  cfg.scheduler = sp::Scheduler::kPingPong;

  const auto a = sp::run_bench(images, cfg, model, kBenchRepeats);
  const auto b = sp::run_bench(images, cfg, model, 1);
  if (a.fps_samples.size() != static_cast<std::size_t>(kBenchRepeats) || !(a.median_fps > 0.0)) {
    return {false, "missing fps samples"};
  }
  if (!a.deterministic || a.digests.front() != b.digests.front() || !(a.stats == b.stats)) {
    return {false, "non-timing fields differ between runs"};
  }

  std::uint64_t batches = 0, pixels = 0, windows = 0, tiles = 0, gaps = 0;
  for (const auto& img : images) {
    for (const auto& spec : sp::generate_scales(img.image.width, img.image.height, cfg.base_sizes)) {
      const auto w = static_cast<std::uint64_t>(spec.target_w), h = static_cast<std::uint64_t>(spec.target_h);
      batches += (h + 3) / 4 * w;
      pixels += w * h;
      windows += (w - 7) * (h - 7);
      tiles += ((w - 7 + 4) / 5) * ((h - 7 + 4) / 5);
    }
  }
  for (const auto& per_image : a.scales)
    for (const auto& s : per_image) gaps += s.trace ? s.trace->gap_count : 0;
  const auto& st = a.stats;
  const bool counts = st.gradient.items_in == batches && st.gradient.items_out == pixels && st.svm.items_in == pixels &&
                      st.svm.items_out == windows && st.nms.items_in == windows && st.nms.items_out == tiles;
  const std::string detail = "svm items " + std::to_string(st.svm.items_out) + " = sum(win_w*win_h) " +
                             std::to_string(windows) + ", nms out " + std::to_string(st.nms.items_out) + " = " +
                             std::to_string(tiles) + ", digest " + sp::hex_digest(a.digests.front()) +
                             " stable, pingpong gaps " + std::to_string(gaps);
  return {counts, detail};
}

}  // namespace

int main() {
  run(1, "streaming kernel = dense composition", streaming_matches_dense, kKernelSeconds);
  run(2, "top-k heap = sort-truncate oracle", topk_matches_sort, kTopkSeconds);
  run(3, "formula spot-checks", formula_spot_checks);
  run(4, "NMS tiling count and maximality", nms_tiling);
  run(5, "Ping-Pong scheduler equivalence", scheduler_equivalence);
  run(6, "metric monotonicity and IoU symmetry", metric_monotonicity);
  run(7, "synthetic planted squares", synthetic_detection_rate, kSyntheticSeconds);
  run(8, "bench report determinism and closed-form counts", bench_report);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
