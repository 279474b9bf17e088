#include <algorithm>

#include "streamprop/errors.hpp"
#include "streamprop/kernel.hpp"

namespace streamprop {

GradientMap calc_gradients_dense(const RgbImage& img) {
  GradientMap out{img.width, img.height, std::vector<std::uint8_t>(img.pixel_count())};
  const int w = img.width;
  const int h = img.height;
  for (int y = 0; y < h; ++y) {
    const int up = std::max(y - 1, 0);
    const int down = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int left = std::max(x - 1, 0);
      const int right = std::min(x + 1, w - 1);
      out.g[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] =
          normed_gradient(img.at(x, up), img.at(x, down), img.at(left, y), img.at(right, y));
    }
  }
  return out;
}

ScoreMap svm_score_dense(const GradientMap& grad, const SvmModel& model) {
  if (grad.width < kWindowSize || grad.height < kWindowSize) {
    throw InputError("gradient map smaller than one 8x8 window");
  }
  ScoreMap out;
  out.win_w = grad.width - kWindowSize + 1;
  out.win_h = grad.height - kWindowSize + 1;
  out.s.resize(static_cast<std::size_t>(out.win_w) * static_cast<std::size_t>(out.win_h));
  for (int y = 0; y < out.win_h; ++y) {
    for (int x = 0; x < out.win_w; ++x) {
      double score = 0.0;
      for (int r = 0; r < kWindowSize; ++r) {
        double row = 0.0;
        for (int c = 0; c < kWindowSize; ++c) {
          row += grad.at(x + c, y + r) * model.weights[static_cast<std::size_t>(r * kWindowSize + c)];
        }
        score += row;
      }
      out.s[static_cast<std::size_t>(y) * static_cast<std::size_t>(out.win_w) + static_cast<std::size_t>(x)] = score;
    }
  }
  return out;
}

std::vector<Candidate> nms_select_dense(const ScoreMap& scores, int scale_id) {
  std::vector<Candidate> out;
  for (int ty = 0; ty < scores.win_h; ty += kNmsTile) {
    for (int tx = 0; tx < scores.win_w; tx += kNmsTile) {
      Candidate best{scale_id, tx, ty, scores.at(tx, ty)};
      const int y_end = std::min(ty + kNmsTile, scores.win_h);
      const int x_end = std::min(tx + kNmsTile, scores.win_w);
      for (int y = ty; y < y_end; ++y) {
        for (int x = tx; x < x_end; ++x) {
          if (scores.at(x, y) > best.score) best = {scale_id, x, y, scores.at(x, y)};
        }
      }
      out.push_back(best);
    }
  }
  return out;
}

std::vector<Candidate> dense_pipeline(const RgbImage& img, const SvmModel& model, int scale_id) {
  return nms_select_dense(svm_score_dense(calc_gradients_dense(img), model), scale_id);
}

}  // namespace streamprop
