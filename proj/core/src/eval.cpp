#include "streamprop/eval.hpp"

#include <algorithm>

#include "streamprop/errors.hpp"

namespace streamprop {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const long long iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0) + 1;
  const long long ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0) + 1;
  if (iw <= 0 || ih <= 0) return 0.0;
  const long long inter = iw * ih;
  return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

namespace {

void check_budgets(std::span<const int> budgets) {
  for (int m : budgets) {
    if (m < 1) throw InputError("every #WIN budget must be positive");
  }
}

std::size_t count_objects(std::span<const GroundTruth> gt) {
  std::size_t n = 0;
  for (const auto& image : gt) n += image.objects.size();
  return n;
}

const std::vector<Proposal>* proposals_for(const ProposalSet& set, const std::string& id) {
  auto it = set.find(id);
  return it == set.end() ? nullptr : &it->second;
}

// Best IoU of `box` against each prefix of `ranked`: best[i] covers the first i+1.
std::vector<double> running_best(const BoundingBox& box, const std::vector<Proposal>* ranked) {
  std::vector<double> best;
  if (!ranked) return best;
  best.reserve(ranked->size());
  double current = 0.0;
  for (const auto& p : *ranked) {
    current = std::max(current, iou(box, p.box));
    best.push_back(current);
  }
  return best;
}

double best_within(const std::vector<double>& running, int m) {
  if (running.empty()) return 0.0;
  const std::size_t n = std::min(running.size(), static_cast<std::size_t>(m));
  return running[n - 1];
}

}  // namespace

std::vector<CurvePoint> detection_rate(const ProposalSet& proposals, std::span<const GroundTruth> gt, double thresh,
                                       std::span<const int> budgets) {
  if (!(thresh > 0.0 && thresh < 1.0)) throw InputError("IoU threshold must lie in (0, 1)");
  check_budgets(budgets);
  const std::size_t total = count_objects(gt);
  if (total == 0) throw InputError("detection rate is undefined without ground-truth objects");

  std::vector<std::size_t> hits(budgets.size(), 0);
  for (const auto& image : gt) {
    const auto* ranked = proposals_for(proposals, image.image_id);
    for (const auto& obj : image.objects) {
      const auto running = running_best(obj.box, ranked);
      for (std::size_t b = 0; b < budgets.size(); ++b) {
        if (!running.empty() && best_within(running, budgets[b]) >= thresh) ++hits[b];
      }
    }
  }
  std::vector<CurvePoint> out;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    out.push_back({budgets[b], static_cast<double>(hits[b]) / static_cast<double>(total)});
  }
  return out;
}

std::vector<CurvePoint> mabo(const ProposalSet& proposals, std::span<const GroundTruth> gt,
                             std::span<const int> budgets) {
  check_budgets(budgets);
  if (count_objects(gt) == 0) throw InputError("MABO is undefined without ground-truth objects");

  struct ClassSums {
    std::vector<double> overlap;
    std::size_t objects = 0;
  };
  std::map<std::string, ClassSums> classes;
  for (const auto& image : gt) {
    const auto* ranked = proposals_for(proposals, image.image_id);
    for (const auto& obj : image.objects) {
      auto& sums = classes[obj.class_label];
      sums.overlap.resize(budgets.size(), 0.0);
      ++sums.objects;
      const auto running = running_best(obj.box, ranked);
      for (std::size_t b = 0; b < budgets.size(); ++b) sums.overlap[b] += best_within(running, budgets[b]);
    }
  }
  std::vector<CurvePoint> out;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    double total = 0.0;
    for (const auto& [label, sums] : classes) total += sums.overlap[b] / static_cast<double>(sums.objects);
    out.push_back({budgets[b], total / static_cast<double>(classes.size())});
  }
  return out;
}

}  // namespace streamprop
