#pragma once

#include "repx/motion_series.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace repx {

/// DTW warping path with 1-based (i, j) pairs in chronological order:
/// starts at (1, 1), ends at (n, m), steps by (1,0), (0,1) or (1,1).
struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

/// Multi-axis DTW. Cell cost is the L1 distance between rows; backtracking
/// prefers the diagonal, then (i-1, j), then (i, j-1) on ties.
WarpPath dtw_dist_path_multi(const Samples& s, const Samples& t);
WarpPath dtw_dist_path_multi(const MotionSeries& s, const MotionSeries& t);

enum class Side { Signal, Anchor };

/// Micro-segment correspondences. anchors[k] = (signal index, anchor index),
/// both 0-based, at the start of anchor segment k.
struct SegmentAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> anchors;
  std::size_t n_seg = 10;
  std::size_t seg_len = 0;
  std::size_t signal_length = 0;
  std::size_t anchor_length = 0;

  std::size_t count() const noexcept { return anchors.size(); }

  /// [begin, end) of every segment on one side. Signal-side segment k runs
  /// from anchors[k].first to anchors[k+1].first (first one starts at 0), so
  /// it may be empty when the path stalls on the signal axis.
  std::vector<std::pair<std::size_t, std::size_t>> bounds(Side side) const;

  /// Segment id holding timestep `t` on one side.
  std::size_t segment_of(std::size_t t, Side side) const;

  /// Trivial alignment of a series with itself.
  static SegmentAlignment identity(std::size_t length, std::size_t n_seg);
};

struct SegmentationConfig {
  std::size_t n_seg = 10;
  /// Centered moving-average window applied to both inputs before DTW.
  /// Clamped to the largest odd value not exceeding the shorter series.
  int smooth_window = 5;
};

SegmentAlignment micro_segmentation(const Samples& s, const Samples& t, const SegmentationConfig& cfg = {});
SegmentAlignment micro_segmentation(const MotionSeries& s, const MotionSeries& t,
                                    const SegmentationConfig& cfg = {});

}  // namespace repx
