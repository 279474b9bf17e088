#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "streamprop/scaler.hpp"
#include "streamprop/types.hpp"

namespace streamprop {

/// Size-bounded min-heap that retains the k largest items of a stream.
///
/// A newcomer joins while there is room; once full it replaces the root only
/// when strictly larger and is then pushed down ("bubble-push"). Among equal
/// scores the latest arrival sits nearest the root, so ties keep the earlier
/// arrivals. `ScoreOf` maps an item to its score.
template <typename T, typename ScoreOf>
class TopKHeap {
 public:
  explicit TopKHeap(std::size_t capacity, ScoreOf score_of = {}) : capacity_(capacity), score_of_(std::move(score_of)) {
    if (capacity_ == 0) throw std::invalid_argument("TopKHeap capacity must be positive");
    store_.reserve(capacity_);
  }

  void push(T item) {
    Entry e{std::move(item), arrivals_++};
    if (store_.size() < capacity_) {
      store_.push_back(std::move(e));
      sift_up(store_.size() - 1);
    } else if (score(e) > score(store_.front())) {
      store_.front() = std::move(e);
      sift_down(0);
    }
  }

  /// Drains the heap: descending score, earlier arrival first among ties.
  std::vector<T> finalize() {
    std::vector<Entry> entries = std::move(store_);
    store_.clear();
    std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
      const double sa = score(a);
      const double sb = score(b);
      return sa != sb ? sa > sb : a.arrival < b.arrival;
    });
    std::vector<T> out;
    out.reserve(entries.size());
    for (auto& e : entries) out.push_back(std::move(e.item));
    return out;
  }

  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return store_.empty(); }

  /// Deepest single sift (levels moved) seen so far.
  int max_sift_depth() const { return max_sift_depth_; }

  /// True when every parent orders at or below its children.
  bool heap_property_holds() const {
    for (std::size_t i = 1; i < store_.size(); ++i) {
      if (below(store_[i], store_[(i - 1) / 2])) return false;
    }
    return true;
  }

  /// Stored items in heap-array order (for inspection).
  std::vector<T> items() const {
    std::vector<T> out;
    for (const auto& e : store_) out.push_back(e.item);
    return out;
  }

 private:
  struct Entry {
    T item;
    std::uint64_t arrival;
  };

  double score(const Entry& e) const { return score_of_(e.item); }

  // Heap order: lower score first; among equal scores the later arrival.
  bool below(const Entry& a, const Entry& b) const {
    const double sa = score(a);
    const double sb = score(b);
    return sa != sb ? sa < sb : a.arrival > b.arrival;
  }

  void sift_up(std::size_t i) {
    int depth = 0;
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!below(store_[i], store_[parent])) break;
      std::swap(store_[i], store_[parent]);
      i = parent;
      ++depth;
    }
    max_sift_depth_ = std::max(max_sift_depth_, depth);
  }

  void sift_down(std::size_t i) {
    int depth = 0;
    const std::size_t n = store_.size();
    while (true) {
      const std::size_t l = 2 * i + 1;
      const std::size_t r = l + 1;
      std::size_t least = i;
      if (l < n && below(store_[l], store_[least])) least = l;
      if (r < n && below(store_[r], store_[least])) least = r;
      if (least == i) break;
      std::swap(store_[i], store_[least]);
      i = least;
      ++depth;
    }
    max_sift_depth_ = std::max(max_sift_depth_, depth);
  }

  std::size_t capacity_;
  ScoreOf score_of_;
  std::vector<Entry> store_;
  std::uint64_t arrivals_ = 0;
  int max_sift_depth_ = 0;
};

struct CandidateScore {
  double operator()(const Candidate& c) const { return c.score; }
};
struct ProposalScore {
  double operator()(const Proposal& p) const { return p.score; }
};

using CandidateHeap = TopKHeap<Candidate, CandidateScore>;
using ProposalHeap = TopKHeap<Proposal, ProposalScore>;

/// The n best candidates of one scale, descending, ties by arrival.
std::vector<Candidate> topn_per_scale(const std::vector<Candidate>& candidates, std::size_t n);

/// Per-scale affine calibration: slope * score + offset.
double stage2_calibrate(const Candidate& cand, const SvmModel& model);

/// Maps a resized-image window back to an inclusive original-image box,
/// rounding both corners half-up and clamping to the image.
BoundingBox window_to_bbox(const Candidate& cand, const ScaleSpec& spec, int orig_w, int orig_h);

}  // namespace streamprop
