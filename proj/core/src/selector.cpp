#include "streamprop/selector.hpp"

#include "streamprop/errors.hpp"

namespace streamprop {

std::vector<Candidate> topn_per_scale(const std::vector<Candidate>& candidates, std::size_t n) {
  if (n == 0) throw InputError("top_n_per_scale must be positive");
  if (!candidates.empty()) {
    const int scale = candidates.front().scale_id;
    for (const auto& c : candidates) {
      if (c.scale_id != scale) throw InputError("topn_per_scale requires candidates from a single scale");
    }
  }
  CandidateHeap heap(n);
  for (const auto& c : candidates) heap.push(c);
  return heap.finalize();
}

double stage2_calibrate(const Candidate& cand, const SvmModel& model) {
  const Calibration cal = model.calibration_for(cand.scale_id);
  return cal.slope * cand.score + cal.offset;
}

namespace {

// round(v * num / den) half-up; v may be 0, num and den are positive.
int scale_round(long long v, long long num, long long den) {
  return static_cast<int>((2 * v * num + den) / (2 * den));
}

}  // namespace

BoundingBox window_to_bbox(const Candidate& cand, const ScaleSpec& spec, int orig_w, int orig_h) {
  BoundingBox box;
  box.x0 = scale_round(cand.x, orig_w, spec.target_w);
  box.y0 = scale_round(cand.y, orig_h, spec.target_h);
  box.x1 = scale_round(cand.x + kWindowSize, orig_w, spec.target_w) - 1;
  box.y1 = scale_round(cand.y + kWindowSize, orig_h, spec.target_h) - 1;
  box.x0 = std::clamp(box.x0, 0, orig_w - 1);
  box.y0 = std::clamp(box.y0, 0, orig_h - 1);
  box.x1 = std::clamp(box.x1, box.x0, orig_w - 1);
  box.y1 = std::clamp(box.y1, box.y0, orig_h - 1);
  return box;
}

}  // namespace streamprop
