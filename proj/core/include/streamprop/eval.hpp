#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "streamprop/imageio.hpp"
#include "streamprop/types.hpp"

namespace streamprop {

/// Ranked (descending score) proposals per image id.
using ProposalSet = std::map<std::string, std::vector<Proposal>>;

inline constexpr double kDefaultIouThreshold = 0.4;

/// Intersection over union with inclusive-corner areas.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Fraction of ground-truth objects hit (IoU >= thresh) by at least one of the
/// first m proposals of their image, pooled over all images, for each budget m.
/// One proposal may cover several objects. Throws InputError when there are
/// no ground-truth objects at all.
std::vector<CurvePoint> detection_rate(const ProposalSet& proposals, std::span<const GroundTruth> gt, double thresh,
                                       std::span<const int> budgets);

/// Mean over classes of the average best overlap between each object and the
/// first m proposals of its image.
std::vector<CurvePoint> mabo(const ProposalSet& proposals, std::span<const GroundTruth> gt,
                             std::span<const int> budgets);

}  // namespace streamprop
