#include <benchmark/benchmark.h>

#include <random>

#include "streamprop/kernel.hpp"
#include "streamprop/pipeline.hpp"
#include "streamprop/scaler.hpp"
#include "streamprop/selector.hpp"
#include "streamprop/synthetic.hpp"

using namespace streamprop;

namespace {

RgbImage noise_image(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  RgbImage img(w, h);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

SvmModel integer_model(unsigned seed) {
  std::mt19937 rng(seed);
  SvmModel m;
  for (auto& w : m.weights) w = static_cast<double>(static_cast<int>(rng() % 33) - 16);
  return m;
}

void set_pixels(benchmark::State& state, int side) {
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_DenseKernel(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const RgbImage img = noise_image(side, side, 1);
  const SvmModel m = integer_model(2);
  for (auto _ : state) benchmark::DoNotOptimize(dense_pipeline(img, m, 0));
  set_pixels(state, side);
}
BENCHMARK(BM_DenseKernel)->Arg(64)->Arg(128)->Arg(256);

void BM_StreamingKernel(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const RgbImage img = noise_image(side, side, 1);
  const SvmModel m = integer_model(2);
  const auto batches = stream_batches(img);
  KernelOptions opts;
  opts.threaded = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(kernel_stream(batches, side, side, m, 0, nullptr, opts));
  set_pixels(state, side);
}
BENCHMARK(BM_StreamingKernel)->Args({64, 0})->Args({128, 0})->Args({256, 0})->Args({256, 1})->UseRealTime();

void BM_BatchStream(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const RgbImage img = noise_image(side, side, 3);
  const bool pingpong = state.range(1) != 0;
  for (auto _ : state) {
    if (pingpong) {
      benchmark::DoNotOptimize(pingpong_stream(img));
    } else {
      benchmark::DoNotOptimize(stream_batches(img));
    }
  }
  set_pixels(state, side);
}
BENCHMARK(BM_BatchStream)->Args({256, 0})->Args({256, 1})->UseRealTime();

void BM_Resize(benchmark::State& state) {
  const RgbImage img = noise_image(640, 480, 4);
  for (auto _ : state) benchmark::DoNotOptimize(resize_bilinear(img, 320, 240));
}
BENCHMARK(BM_Resize);

void BM_TopKHeap(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(5);
  std::vector<Candidate> stream(100'000);
  for (auto& c : stream) c.score = static_cast<double>(rng());
  for (auto _ : state) {
    CandidateHeap heap(k);
    for (const auto& c : stream) heap.push(c);
    benchmark::DoNotOptimize(heap.finalize());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_TopKHeap)->Arg(10)->Arg(150)->Arg(1000);

void BM_Pipeline(benchmark::State& state) {
  const RgbImage img = state.range(0) == 0 ? planted_square(7, "s").image : noise_image(500, 375, 6);
  const SvmModel m = center_surround_model();
  PipelineConfig cfg;
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(img, cfg, m));
  state.SetItemsProcessed(state.iterations());  // images
}
BENCHMARK(BM_Pipeline)->Args({0, 1})->Args({1, 1})->Args({1, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
