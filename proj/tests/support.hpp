#pragma once

#include "repx/motion_series.hpp"
#include "repx/scorer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace repx::testutil {

inline Samples random_samples(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Samples x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = normal(rng);
  return x;
}

inline MotionSeries random_series(std::size_t rows, std::uint64_t seed, double scale = 1.0) {
  return MotionSeries(random_samples(rows, kImuAxes, seed, scale));
}

/// f(x) = c * <w, x>, clamped nowhere; gradient is c * w regardless of x.
class LinearScorer final : public ComparativeScorer {
 public:
  explicit LinearScorer(Samples w, double c = 1.0) : w_(std::move(w)), c_(c) {}
  double score(const MotionSeries& signal, const MotionSeries&) const override {
    return c_ * signal.samples().cwiseProduct(w_).sum();
  }
  Samples grad_signal(const MotionSeries&, const MotionSeries&) const override { return c_ * w_; }
  const Samples& w() const { return w_; }

 private:
  Samples w_;
  double c_;
};

/// Minimum total cost over every monotone path from (0,0) to (n-1,m-1),
/// enumerated explicitly.
inline double brute_force_dtw(const Samples& s, const Samples& t) {
  const Eigen::Index n = s.rows();
  const Eigen::Index m = t.rows();
  double best = std::numeric_limits<double>::infinity();
  auto walk = [&](auto&& self, Eigen::Index i, Eigen::Index j, double acc) -> void {
    acc += (s.row(i) - t.row(j)).cwiseAbs().sum();
    if (acc >= best) return;
    if (i == n - 1 && j == m - 1) {
      best = acc;
      return;
    }
    if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, acc);
    if (i + 1 < n) self(self, i + 1, j, acc);
    if (j + 1 < m) self(self, i, j + 1, acc);
  };
  walk(walk, 0, 0, 0.0);
  return best;
}

// Independent re-derivation of the segment anchors: full DP table, naive
// backtrack, then a plain scan of the path for each segment start.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_anchors(const Samples& s, const Samples& t,
                                                                     std::size_t n_seg) {
  const std::size_t n = static_cast<std::size_t>(s.rows());
  const std::size_t m = static_cast<std::size_t>(t.rows());
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, 1e300));
  d[0][0] = 0;
  auto cost = [&](std::size_t i, std::size_t j) {
    return (s.row(static_cast<Eigen::Index>(i)) - t.row(static_cast<Eigen::Index>(j))).cwiseAbs().sum();
  };
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      d[i][j] = cost(i - 1, j - 1) + std::min(d[i - 1][j - 1], std::min(d[i - 1][j], d[i][j - 1]));
  std::vector<std::pair<std::size_t, std::size_t>> path;
  std::size_t i = n, j = m;
  while (i >= 1 && j >= 1) {
    path.emplace_back(i, j);
    if (i == 1 && j == 1) break;
    const double a = d[i - 1][j - 1], b = d[i - 1][j], c = d[i][j - 1];
    if (a <= b && a <= c) {
      --i;
      --j;
    } else if (b <= c) {
      --i;
    } else {
      --j;
    }
  }
  const std::size_t len = m / n_seg;
  std::vector<std::pair<std::size_t, std::size_t>> anchors;
  for (std::size_t start = 0; start < m; start += len) {
    double best = 1e300;
    std::pair<std::size_t, std::size_t> pick{0, start};
    // Scan in chronological order so ties keep the earliest signal index.
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      if (it->second - 1 != start) continue;
      const double c = cost(it->first - 1, start);
      if (c < best) {
        best = c;
        pick = {it->first - 1, start};
      }
    }
    anchors.push_back(pick);
  }
  return anchors;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("repx_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace repx::testutil
