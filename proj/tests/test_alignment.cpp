#include "repx/alignment.hpp"
#include "repx/error.hpp"
#include "repx/signal_prep.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace repx;

namespace {

Samples column(std::initializer_list<double> v) {
  Samples x(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double d : v) x(i++, 0) = d;
  return x;
}

void expect_valid_path(const WarpPath& p, std::size_t n, std::size_t m) {
  ASSERT_FALSE(p.pairs.empty());
  EXPECT_EQ(p.pairs.front(), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(p.pairs.back(), (std::pair<std::size_t, std::size_t>{n, m}));
  for (std::size_t k = 1; k < p.pairs.size(); ++k) {
    const auto di = p.pairs[k].first - p.pairs[k - 1].first;
    const auto dj = p.pairs[k].second - p.pairs[k - 1].second;
    EXPECT_TRUE((di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1));
  }
}

double path_cost(const Samples& s, const Samples& t, const WarpPath& p) {
  double c = 0.0;
  for (const auto& [i, j] : p.pairs) c += (s.row(static_cast<Eigen::Index>(i - 1)) - t.row(static_cast<Eigen::Index>(j - 1))).cwiseAbs().sum();
  return c;
}

}  // namespace

TEST(Dtw, IdenticalSeriesCostZeroOnDiagonal) {
  const auto x = testutil::random_samples(12, 6, 1);
  const auto p = dtw_dist_path_multi(x, x);
  EXPECT_EQ(p.total_cost, 0.0);
  ASSERT_EQ(p.pairs.size(), 12u);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(p.pairs[k], (std::pair<std::size_t, std::size_t>{k + 1, k + 1}));
}

TEST(Dtw, SmallOneAxisExample) {
  // s = [0,0,1], t = [0,1]: the path (1,1),(2,1),(3,2) matches every sample
  // exactly, so the minimum over all monotone paths is 0.
  const auto s = column({0, 0, 1});
  const auto t = column({0, 1});
  const auto p = dtw_dist_path_multi(s, t);
  EXPECT_EQ(p.total_cost, testutil::brute_force_dtw(s, t));
  EXPECT_EQ(p.total_cost, 0.0);
  const std::vector<std::pair<std::size_t, std::size_t>> expected = {{1, 1}, {2, 1}, {3, 2}};
  EXPECT_EQ(p.pairs, expected);
}

TEST(Dtw, SinglePointSeries) {
  Samples s = Samples::Zero(1, 6), t = Samples::Zero(1, 6);
  s(0, 0) = 2;
  t(0, 0) = 5;
  const auto p = dtw_dist_path_multi(s, t);
  EXPECT_EQ(p.total_cost, 3.0);
  ASSERT_EQ(p.pairs.size(), 1u);
  EXPECT_EQ(p.pairs[0], (std::pair<std::size_t, std::size_t>{1, 1}));
}

TEST(Dtw, EmptyOrMismatchedInputsAreRejected) {
  EXPECT_THROW(dtw_dist_path_multi(Samples(0, 6), Samples::Zero(3, 6)), DataError);
  EXPECT_THROW(dtw_dist_path_multi(Samples::Zero(3, 2), Samples::Zero(3, 6)), DataError);
}

TEST(Dtw, TiesPreferDiagonalThenUp) {
  const Samples zeros3 = Samples::Zero(3, 1);
  const Samples zeros2 = Samples::Zero(2, 1);
  const auto p = dtw_dist_path_multi(zeros3, zeros2);
  // From (3,2): diagonal to (2,1), then up to (1,1).
  const std::vector<std::pair<std::size_t, std::size_t>> expected = {{1, 1}, {2, 1}, {3, 2}};
  EXPECT_EQ(p.pairs, expected);
  const auto q = dtw_dist_path_multi(zeros2, zeros3);
  const std::vector<std::pair<std::size_t, std::size_t>> expected_q = {{1, 1}, {1, 2}, {2, 3}};
  EXPECT_EQ(q.pairs, expected_q);
}

TEST(Dtw, CostIsSymmetricAndPathsValid) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> len(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    const auto m = static_cast<std::size_t>(len(rng));
    const auto s = testutil::random_samples(n, 3, 1000 + static_cast<std::uint64_t>(trial));
    const auto t = testutil::random_samples(m, 3, 5000 + static_cast<std::uint64_t>(trial));
    const auto p = dtw_dist_path_multi(s, t);
    const auto q = dtw_dist_path_multi(t, s);
    EXPECT_NEAR(p.total_cost, q.total_cost, 1e-9);
    EXPECT_GE(p.total_cost, 0.0);
    expect_valid_path(p, n, m);
    EXPECT_NEAR(path_cost(s, t, p), p.total_cost, 1e-9);
  }
}

TEST(Dtw, MatchesExhaustiveOracleOnSmallAlphabet) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(1, 6), val(0, 2), axes(1, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = axes(rng);
    Samples s(len(rng), d), t(len(rng), d);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = val(rng);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = val(rng);
    EXPECT_EQ(dtw_dist_path_multi(s, t).total_cost, testutil::brute_force_dtw(s, t));
  }
}

TEST(MicroSegmentation, IdenticalSeriesMapToThemselves) {
  const auto x = testutil::random_samples(10, 6, 3);
  SegmentationConfig cfg;
  cfg.n_seg = 2;
  const auto seg = micro_segmentation(x, x, cfg);
  const std::vector<std::pair<std::size_t, std::size_t>> expected = {{0, 0}, {5, 5}};
  EXPECT_EQ(seg.anchors, expected);
  EXPECT_EQ(seg.seg_len, 5u);
}

TEST(MicroSegmentation, SingleSegment) {
  const auto s = testutil::random_samples(9, 2, 4);
  const auto t = testutil::random_samples(7, 2, 5);
  SegmentationConfig cfg;
  cfg.n_seg = 1;
  cfg.smooth_window = 1;
  const auto seg = micro_segmentation(s, t, cfg);
  ASSERT_EQ(seg.count(), 1u);
  EXPECT_EQ(seg.anchors[0].second, 0u);
  EXPECT_EQ(seg.anchors, testutil::brute_force_anchors(s, t, 1));
}

TEST(MicroSegmentation, EightVersusSixMatchesBruteForce) {
  const auto s = testutil::random_samples(8, 2, 6);
  const auto t = testutil::random_samples(6, 2, 7);
  SegmentationConfig cfg;
  cfg.n_seg = 3;
  const auto seg = micro_segmentation(s, t, cfg);
  EXPECT_EQ(seg.anchors, testutil::brute_force_anchors(moving_average(s, 5), moving_average(t, 5), 3));
}

TEST(MicroSegmentation, RandomPairsMatchBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(20, 60);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testutil::random_samples(static_cast<std::size_t>(len(rng)), 6, 300 + static_cast<std::uint64_t>(trial));
    const auto t = testutil::random_samples(static_cast<std::size_t>(len(rng)), 6, 700 + static_cast<std::uint64_t>(trial));
    const auto seg = micro_segmentation(s, t, SegmentationConfig{});
    EXPECT_EQ(seg.anchors, testutil::brute_force_anchors(moving_average(s, 5), moving_average(t, 5), 10)) << trial;
  }
}

TEST(MicroSegmentation, SegmentCountIsCeilOfLengthOverN) {
  for (std::size_t m : {20u, 23u, 29u, 30u}) {
    const auto s = testutil::random_samples(25, 6, m);
    const auto t = testutil::random_samples(m, 6, m + 1);
    const auto seg = micro_segmentation(s, t, SegmentationConfig{});
    const std::size_t len = m / 10;
    EXPECT_EQ(seg.count(), (m + len - 1) / len) << m;
  }
}

TEST(MicroSegmentation, AnchorsLieOnThePath) {
  const auto s = testutil::random_samples(37, 6, 9);
  const auto t = testutil::random_samples(41, 6, 10);
  SegmentationConfig cfg;
  cfg.smooth_window = 1;
  const auto seg = micro_segmentation(s, t, cfg);
  const auto path = dtw_dist_path_multi(s, t);
  for (std::size_t k = 0; k < seg.count(); ++k) {
    const auto& [i, j] = seg.anchors[k];
    EXPECT_EQ(j, k * seg.seg_len);
    EXPECT_NE(std::find(path.pairs.begin(), path.pairs.end(), std::make_pair(i + 1, j + 1)), path.pairs.end());
  }
}

TEST(MicroSegmentation, TooManySegmentsIsAConfigError) {
  const auto s = testutil::random_samples(8, 6, 1);
  SegmentationConfig cfg;
  cfg.n_seg = 9;
  EXPECT_THROW(micro_segmentation(s, s, cfg), ConfigError);
  cfg.n_seg = 0;
  EXPECT_THROW(micro_segmentation(s, s, cfg), ConfigError);
}

TEST(MicroSegmentation, SmoothingWindowShrinksForShortInputs) {
  const auto s = testutil::random_samples(4, 6, 1);
  const auto t = testutil::random_samples(3, 6, 2);
  SegmentationConfig cfg;
  cfg.n_seg = 3;
  EXPECT_NO_THROW(micro_segmentation(s, t, cfg));
}

TEST(SegmentAlignment, BoundsCoverBothSeries) {
  const auto s = testutil::random_samples(57, 6, 11);
  const auto t = testutil::random_samples(48, 6, 12);
  const auto seg = micro_segmentation(s, t, SegmentationConfig{});
  for (Side side : {Side::Signal, Side::Anchor}) {
    const auto b = seg.bounds(side);
    EXPECT_EQ(b.front().first, 0u);
    EXPECT_EQ(b.back().second, side == Side::Signal ? 57u : 48u);
    for (std::size_t k = 1; k < b.size(); ++k) EXPECT_EQ(b[k].first, b[k - 1].second);
  }
  EXPECT_EQ(seg.segment_of(0, Side::Anchor), 0u);
  EXPECT_EQ(seg.segment_of(47, Side::Anchor), seg.count() - 1);
  EXPECT_THROW(seg.segment_of(48, Side::Anchor), DataError);
}

TEST(SegmentAlignment, IdentityHelper) {
  const auto seg = SegmentAlignment::identity(25, 5);
  EXPECT_EQ(seg.count(), 5u);
  EXPECT_EQ(seg.bounds(Side::Signal)[2], (std::pair<std::size_t, std::size_t>{10, 15}));
  EXPECT_THROW(SegmentAlignment::identity(3, 5), ConfigError);
}
