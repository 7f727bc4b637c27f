#include "repx/alignment.hpp"

#include "repx/error.hpp"
#include "repx/signal_prep.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace repx {
namespace {

double row_l1(const Samples& s, Eigen::Index i, const Samples& t, Eigen::Index j) {
  return (s.row(i) - t.row(j)).cwiseAbs().sum();
}

}  // namespace

WarpPath dtw_dist_path_multi(const Samples& s, const Samples& t) {
  if (s.rows() == 0 || t.rows() == 0) throw DataError("dtw: empty series");
  if (s.cols() != t.cols()) {
    throw DataError("dtw: axis mismatch (" + std::to_string(s.cols()) + " vs " + std::to_string(t.cols()) + ")");
  }
  const std::size_t n = static_cast<std::size_t>(s.rows());
  const std::size_t m = static_cast<std::size_t>(t.rows());
  const std::size_t width = m + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> dtw((n + 1) * width, inf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dtw[i * width + j]; };
  at(0, 0) = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = row_l1(s, static_cast<Eigen::Index>(i - 1), t, static_cast<Eigen::Index>(j - 1));
      at(i, j) = cost + std::min({at(i - 1, j), at(i, j - 1), at(i - 1, j - 1)});
    }
  }

  WarpPath path;
  path.total_cost = at(n, m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    path.pairs.emplace_back(i, j);
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
  }
  // (0, 0) is the DP origin, not a sample pair.
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

WarpPath dtw_dist_path_multi(const MotionSeries& s, const MotionSeries& t) {
  return dtw_dist_path_multi(s.samples(), t.samples());
}

std::vector<std::pair<std::size_t, std::size_t>> SegmentAlignment::bounds(Side side) const {
  const std::size_t length = side == Side::Signal ? signal_length : anchor_length;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(anchors.size());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    std::size_t begin = side == Side::Signal ? anchors[k].first : anchors[k].second;
    if (k == 0) begin = 0;
    const std::size_t end =
        k + 1 < anchors.size() ? (side == Side::Signal ? anchors[k + 1].first : anchors[k + 1].second) : length;
    out.emplace_back(begin, std::max(begin, end));
  }
  return out;
}

std::size_t SegmentAlignment::segment_of(std::size_t t, Side side) const {
  const auto b = bounds(side);
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (t >= b[k].first && t < b[k].second) return k;
  }
  throw DataError("timestep " + std::to_string(t) + " lies outside the aligned range");
}

SegmentAlignment SegmentAlignment::identity(std::size_t length, std::size_t n_seg) {
  if (n_seg < 1 || n_seg > length) throw ConfigError("n_seg must lie in [1, series length]");
  SegmentAlignment seg;
  seg.n_seg = n_seg;
  seg.seg_len = length / n_seg;
  seg.signal_length = length;
  seg.anchor_length = length;
  for (std::size_t start = 0; start < length; start += seg.seg_len) seg.anchors.emplace_back(start, start);
  return seg;
}

SegmentAlignment micro_segmentation(const Samples& s_raw, const Samples& t_raw, const SegmentationConfig& cfg) {
  const std::size_t len_t = static_cast<std::size_t>(t_raw.rows());
  if (cfg.n_seg < 1 || cfg.n_seg > len_t) {
    throw ConfigError("n_seg = " + std::to_string(cfg.n_seg) + " must lie in [1, " + std::to_string(len_t) + "]");
  }
  if (s_raw.rows() == 0) throw DataError("micro_segmentation: empty signal");

  int window = static_cast<int>(std::min<Eigen::Index>(cfg.smooth_window, std::min(s_raw.rows(), t_raw.rows())));
  if (window % 2 == 0) --window;
  const Samples s = window > 1 ? moving_average(s_raw, window) : s_raw;
  const Samples t = window > 1 ? moving_average(t_raw, window) : t_raw;
  const WarpPath path = dtw_dist_path_multi(s, t);

  SegmentAlignment seg;
  seg.n_seg = cfg.n_seg;
  seg.seg_len = len_t / cfg.n_seg;
  seg.signal_length = static_cast<std::size_t>(s.rows());
  seg.anchor_length = len_t;

  // Path pairs are chronological, so each anchor column is a contiguous run.
  std::size_t cursor = 0;
  for (std::size_t start = 0; start < len_t; start += seg.seg_len) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> pick{0, start};
    while (cursor < path.pairs.size() && path.pairs[cursor].second - 1 < start) ++cursor;
    for (std::size_t p = cursor; p < path.pairs.size() && path.pairs[p].second - 1 == start; ++p) {
      const std::size_t i = path.pairs[p].first - 1;
      const double d = row_l1(s, static_cast<Eigen::Index>(i), t, static_cast<Eigen::Index>(start));
      if (d < best) {
        best = d;
        pick = {i, start};
      }
    }
    seg.anchors.push_back(pick);
  }
  return seg;
}

SegmentAlignment micro_segmentation(const MotionSeries& s, const MotionSeries& t, const SegmentationConfig& cfg) {
  if (s.axes() != t.axes()) throw DataError("micro_segmentation: axis mismatch");
  return micro_segmentation(s.samples(), t.samples(), cfg);
}

}  // namespace repx
