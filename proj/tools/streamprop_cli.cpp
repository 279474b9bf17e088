#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamprop/config.hpp"
#include "streamprop/errors.hpp"
#include "streamprop/imageio.hpp"
#include "streamprop/pipeline.hpp"
#include "streamprop/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace streamprop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;

struct CommonArgs {
  std::string config;
  std::string model;
  std::optional<int> threads;
  std::optional<std::string> scheduler;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool model_required) {
  cmd->add_option("--config", args.config, "key = value config file")->check(CLI::ExistingFile);
  auto* model = cmd->add_option("--model", args.model, "SVM model file (64 weights + calibration lines)");
  if (model_required) model->required();
  cmd->add_option("--threads", args.threads, "worker threads (overrides STREAMPROP_THREADS)")->check(CLI::PositiveNumber);
  cmd->add_option("--scheduler", args.scheduler, "plain | pingpong")->check(CLI::IsMember({"plain", "pingpong"}));
}

// defaults < config file < STREAMPROP_THREADS < flags
PipelineConfig resolve_config(const CommonArgs& args) {
  PipelineConfig cfg = args.config.empty() ? PipelineConfig{} : load_config(args.config);
  if (const char* env = std::getenv("STREAMPROP_THREADS"); env && *env) apply_setting(cfg, "threads", env);
  if (args.threads) cfg.threads = *args.threads;
  if (args.scheduler) apply_setting(cfg, "scheduler", *args.scheduler);
  if (!args.model.empty()) cfg.model_path = args.model;
  if (cfg.model_path.empty()) throw InputError("no model given (use --model or model_path in the config)");
  cfg.validate();
  return cfg;
}

json stats_json(const KernelStats& k) {
  auto stage = [](const StageStats& s) {
    return json{{"items_in", s.items_in}, {"items_out", s.items_out}, {"peak_rows", s.peak_rows},
                {"buffer_rows", s.buffer_rows}};
  };
  return json{{"gradient", stage(k.gradient)},
              {"svm", stage(k.svm)},
              {"nms", stage(k.nms)},
              {"fifo", {{"capacity", k.fifo_capacity}, {"peak", k.fifo_peak}}}};
}

json scale_json(const ScaleReport& s) {
  json j{{"scale_id", s.spec.scale_id},
         {"base", {s.spec.base_w, s.spec.base_h}},
         {"target", {s.spec.target_w, s.spec.target_h}},
         {"candidates", s.candidates},
         {"selected", s.selected}};
  if (s.trace) {
    j["trace"] = {{"warmup_steps", s.trace->warmup_steps},
                  {"total_steps", s.trace->total_steps},
                  {"gap_count", s.trace->gap_count},
                  {"lane_switches", s.trace->lane_switches}};
  }
  return j;
}

int cmd_propose(const CommonArgs& common, const std::string& image_path, const std::string& out) {
  const PipelineConfig cfg = resolve_config(common);
  const SvmModel model = load_svm_model(cfg.model_path);
  const RgbImage img = load_ppm(image_path);
  const PipelineResult result = run_pipeline(img, cfg, model);
  write_proposals(result.proposals, out);
  std::printf("%zu proposals from %zu scales in %.3f s, digest %s\n", result.proposals.size(),
              result.report.scales.size(), result.report.seconds,
              hex_digest(proposals_digest(result.proposals)).c_str());
  return kExitOk;
}

int cmd_eval(const CommonArgs& common, const std::string& images, const std::string& ann, const std::string& out_dir) {
  const PipelineConfig cfg = resolve_config(common);
  const SvmModel model = load_svm_model(cfg.model_path);
  const auto gt = load_annotations(ann);
  fs::create_directories(out_dir);
  const EvalResult r = run_eval(images, gt, cfg, model, out_dir);
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%zu images, %zu objects, IoU threshold %.2f\n", r.images_evaluated, r.objects, cfg.iou_thresh);
  for (std::size_t i = 0; i < r.detection_rate.size(); ++i) {
    std::printf("#WIN %5d  DR %.4f  MABO %.4f\n", r.detection_rate[i].nwin, r.detection_rate[i].value,
                r.mabo[i].value);
  }
  return kExitOk;
}

int cmd_bench(const CommonArgs& common, const std::string& images_dir, int repeats, const std::string& report_path) {
  const PipelineConfig cfg = resolve_config(common);
  const SvmModel model = load_svm_model(cfg.model_path);
  std::vector<BenchImage> images;
  for (const auto& p : list_images(images_dir)) images.push_back({p.filename().string(), load_ppm(p)});
  const BenchReport r = run_bench(images, cfg, model, repeats);

  json per_image = json::array();
  for (std::size_t i = 0; i < images.size(); ++i) {
    json scales = json::array();
    for (const auto& s : r.scales[i]) scales.push_back(scale_json(s));
    per_image.push_back({{"name", images[i].name},
                         {"width", images[i].image.width},
                         {"height", images[i].image.height},
                         {"seconds", r.image_seconds[i]},
                         {"scales", scales}});
  }
  json digests = json::array();
  for (auto d : r.digests) digests.push_back(hex_digest(d));
  const json report{{"images", r.images},
                    {"repeats", r.repeats},
                    {"scheduler", std::string(to_string(r.scheduler))},
                    {"threads", cfg.threads},
                    {"fps", r.median_fps},
                    {"fps_samples", r.fps_samples},
                    {"seconds_samples", r.seconds_samples},
                    {"digests", digests},
                    {"deterministic", r.deterministic},
                    {"stage_stats", stats_json(r.stats)},
                    {"per_image", per_image}};
  const std::string text = report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path);
    if (!(out << text)) throw Error("cannot write '" + report_path + "'");
    std::printf("%zu images x %d repeats: median %.1f fps, deterministic %s\n", r.images, r.repeats, r.median_fps,
                r.deterministic ? "yes" : "no");
  }
  return r.deterministic ? kExitOk : kExitFailure;
}

int cmd_synth(const std::string& out_dir, int count, unsigned seed) {
  const fs::path dir(out_dir);
  fs::create_directories(dir / "images");
  std::ofstream ann(dir / "annotations.csv");
  ann << "image_id,class_label,x0,y0,x1,y1\n";
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "square%03d", i);
    const auto s = planted_square(seed + static_cast<unsigned>(i), id);
    save_ppm(s.image, dir / "images" / (std::string(id) + ".ppm"));
    for (const auto& o : s.truth.objects) {
      ann << id << ',' << o.class_label << ',' << o.box.x0 << ',' << o.box.y0 << ',' << o.box.x1 << ',' << o.box.y1
          << '\n';
    }
  }
  if (!ann) throw Error("cannot write annotations in '" + out_dir + "'");
  save_svm_model(center_surround_model(), dir / "model.txt");
  std::printf("wrote %d images, annotations.csv and model.txt to %s\n", count, out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming objectness region proposals"};
  app.require_subcommand(1);

  CommonArgs propose_args, eval_args, bench_args;
  std::string image, out, images, ann, out_dir, report, synth_dir;
  int repeats = 3, count = 50;
  unsigned seed = 0;

  auto* propose = app.add_subcommand("propose", "propose windows for one image");
  add_common(propose, propose_args, false);
  propose->add_option("--image", image, "input PPM")->required();
  propose->add_option("--out", out, "output proposals CSV")->required();

  auto* eval = app.add_subcommand("eval", "DR and MABO curves over an annotated image set");
  add_common(eval, eval_args, false);
  eval->add_option("--images", images, "directory of <image_id>.ppm")->required();
  eval->add_option("--ann", ann, "annotations CSV")->required();
  eval->add_option("--out-dir", out_dir, "where dr.csv and mabo.csv go")->required();

  auto* bench = app.add_subcommand("bench", "throughput and stage statistics as JSON");
  add_common(bench, bench_args, false);
  bench->add_option("--images", images, "directory of PPM images")->required();
  bench->add_option("--repeats", repeats, "timed passes over the set")->check(CLI::PositiveNumber);
  bench->add_option("--report", report, "write the JSON here instead of stdout");

  auto* synth = app.add_subcommand("synth", "write a planted-square dataset and a matching model");
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--count", count, "number of images")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "first seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*propose) return cmd_propose(propose_args, image, out);
    if (*eval) return cmd_eval(eval_args, images, ann, out_dir);
    if (*bench) return cmd_bench(bench_args, images, repeats, report);
    if (*synth) return cmd_synth(synth_dir, count, seed);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
