#include <gtest/gtest.h>

#include <random>

#include "streamprop/scaler.hpp"
#include "support/oracles.hpp"

namespace streamprop {
namespace {

TEST(PingPong, SixteenSquareMatchesPlainStream) {
  std::mt19937 rng(1);
  const RgbImage img = oracle::random_image(rng, 16, 16);
  EXPECT_EQ(pingpong_stream(img).batches, stream_batches(img));
}

TEST(PingPong, LanesAlternateByBand) {
  std::mt19937 rng(2);
  const RgbImage img = oracle::random_image(rng, 16, 16);
  const auto groups = pingpong_stream(img).trace.lane_groups();
  ASSERT_GE(groups.size(), 4u);
  EXPECT_EQ(std::vector<int>(groups.begin(), groups.begin() + 4), (std::vector<int>{0, 1, 0, 1}));
}

TEST(PingPong, NoGapsOnSixtyFourSquare) {
  std::mt19937 rng(3);
  const RgbImage img = oracle::random_image(rng, 64, 64);
  const auto result = pingpong_stream(img);
  EXPECT_EQ(result.trace.gap_count, 0u);
  EXPECT_EQ(result.trace.emissions.size(), 16u * 64u);
  EXPECT_GT(result.trace.warmup_steps, 0u);
}

TEST(PingPong, TraceIsConsistent) {
  std::mt19937 rng(4);
  const RgbImage img = oracle::random_image(rng, 37, 21);
  const auto result = pingpong_stream(img);
  const auto& e = result.trace.emissions;
  ASSERT_EQ(e.size(), result.batches.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_EQ(e[i].batch_index, i);
    EXPECT_EQ(e[i].lane, result.batches[i].band % 2);
    if (i > 0) EXPECT_GT(e[i].step, e[i - 1].step);
  }
  EXPECT_EQ(result.trace.warmup_steps, e.front().step);
  EXPECT_EQ(result.trace.total_steps, e.back().step + 1);
  EXPECT_EQ(result.trace.gap_count, result.trace.total_steps - result.trace.warmup_steps - e.size());
}

TEST(PingPong, SlowFetchExposesGaps) {
  std::mt19937 rng(5);
  const RgbImage img = oracle::random_image(rng, 33, 40);
  const auto slow = pingpong_stream(img, PingPongOptions{1});
  EXPECT_EQ(slow.batches, stream_batches(img));
  EXPECT_GT(slow.trace.gap_count, 0u);
}

TEST(PingPong, NarrowAndShortImages) {
  std::mt19937 rng(6);
  for (auto [w, h] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{4, 9}, std::pair{5, 4}, std::pair{2, 17}}) {
    const RgbImage img = oracle::random_image(rng, w, h);
    EXPECT_EQ(pingpong_stream(img).batches, stream_batches(img)) << w << "x" << h;
  }
}

TEST(PingPong, RandomImagesEquivalentAndGapFreeAboveThirtyTwo) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 80), h = 1 + static_cast<int>(rng() % 80);
    const RgbImage img = oracle::random_image(rng, w, h);
    const auto result = pingpong_stream(img);
    ASSERT_EQ(result.batches, stream_batches(img)) << w << "x" << h;
    if (w >= 32 && h >= 32) EXPECT_EQ(result.trace.gap_count, 0u) << w << "x" << h;
  }
}

}  // namespace
}  // namespace streamprop
