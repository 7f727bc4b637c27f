#include "repx/attribution.hpp"

#include "repx/error.hpp"
#include "repx/signal_prep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

namespace repx {

std::string_view method_name(AttributionMethod m) {
  switch (m) {
    case AttributionMethod::Saliency:
      return "saliency";
    case AttributionMethod::InputXGradient:
      return "ixg";
    case AttributionMethod::IntegratedGradients:
      return "ig";
  }
  return "unknown";
}

AttributionMethod parse_method(std::string_view name) {
  if (name == "saliency" || name == "sa") return AttributionMethod::Saliency;
  if (name == "ixg" || name == "xg" || name == "input_x_gradient") return AttributionMethod::InputXGradient;
  if (name == "ig" || name == "integrated_gradients") return AttributionMethod::IntegratedGradients;
  throw ConfigError("unknown attribution method '" + std::string(name) + "' (expected saliency, ixg or ig)");
}

void RefinementConfig::validate() const {
  if (!(top_t > 0.0 && top_t <= 1.0)) throw ConfigError("top_T must lie in (0, 1]");
  if (!(amplify >= 1.0)) throw ConfigError("amplify must be >= 1");
  if (smooth_window < 1 || smooth_window % 2 == 0) throw ConfigError("smooth_window must be a positive odd integer");
  if (!(attenuate >= 0.0 && attenuate <= 1.0)) throw ConfigError("attenuate must lie in [0, 1]");
}

AttributionMap saliency(const ComparativeScorer& scorer, const MotionSeries& signal, const MotionSeries& anchor) {
  return {scorer.grad_signal(signal, anchor).cwiseAbs(), AttributionMethod::Saliency, false};
}

AttributionMap input_x_gradient(const ComparativeScorer& scorer, const MotionSeries& signal,
                                const MotionSeries& anchor) {
  return {signal.samples().cwiseProduct(scorer.grad_signal(signal, anchor)), AttributionMethod::InputXGradient,
          false};
}

AttributionMap integrated_gradients(const ComparativeScorer& scorer, const MotionSeries& signal,
                                    const MotionSeries& anchor, const MotionSeries& baseline, int steps) {
  if (steps < 1) throw ConfigError("integrated gradients needs steps >= 1");
  if (baseline.length() != signal.length() || baseline.axes() != signal.axes()) {
    throw DataError("integrated gradients: baseline shape does not match the signal");
  }
  const Samples delta = signal.samples() - baseline.samples();
  Samples accum = Samples::Zero(delta.rows(), delta.cols());
  for (int k = 1; k <= steps; ++k) {
    const double alpha = static_cast<double>(k) / steps;
    const MotionSeries point = signal.with_samples(baseline.samples() + alpha * delta);
    accum += scorer.grad_signal(point, anchor);
  }
  return {delta.cwiseProduct(accum / steps), AttributionMethod::IntegratedGradients, false};
}

MotionSeries sample_baseline(const MotionSeries& anchor, std::size_t rows, std::uint64_t seed) {
  const Samples& a = anchor.samples();
  const Eigen::RowVectorXd mean = a.colwise().mean();
  const Eigen::RowVectorXd sd =
      ((a.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(a.rows())).sqrt();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Samples out(static_cast<Eigen::Index>(rows), a.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = mean(c) + sd(c) * normal(rng);
  return MotionSeries(std::move(out), anchor.fs_hz(), anchor.label());
}

AttributionMap attribute(AttributionMethod method, const ComparativeScorer& scorer, const MotionSeries& signal,
                         const MotionSeries& anchor, const std::optional<MotionSeries>& baseline, int ig_steps) {
  switch (method) {
    case AttributionMethod::Saliency:
      return saliency(scorer, signal, anchor);
    case AttributionMethod::InputXGradient:
      return input_x_gradient(scorer, signal, anchor);
    case AttributionMethod::IntegratedGradients:
      if (!baseline) throw ConfigError("integrated gradients requires a baseline");
      return integrated_gradients(scorer, signal, anchor, *baseline, ig_steps);
  }
  throw ConfigError("unknown attribution method");
}

std::pair<AttributionMap, AttributionMap> normalize_joint(const AttributionMap& signal_map,
                                                          const AttributionMap& anchor_map) {
  if (signal_map.method != anchor_map.method) {
    throw ConfigError("normalize_joint: maps come from different attribution methods");
  }
  const double scale = std::max(signal_map.max_abs(), anchor_map.max_abs());
  AttributionMap s = signal_map;
  AttributionMap a = anchor_map;
  if (scale > 0.0) {
    s.values /= scale;
    a.values /= scale;
  }
  s.normalized = a.normalized = true;
  return {std::move(s), std::move(a)};
}

std::vector<std::size_t> extract_top_segments(const AttributionMap& map, const SegmentAlignment& seg, double top_t,
                                              Side side, bool rom_prior) {
  const Eigen::Index rows = map.values.rows();
  const Eigen::Index cols = map.values.cols();
  if (rows == 0 || cols == 0) throw DataError("extract_top_segments: empty attribution map");
  if (!(top_t > 0.0 && top_t <= 1.0)) throw ConfigError("top_T must lie in (0, 1]");
  const std::size_t expected = side == Side::Signal ? seg.signal_length : seg.anchor_length;
  if (static_cast<std::size_t>(rows) != expected) {
    throw DataError("extract_top_segments: map has " + std::to_string(rows) + " rows, alignment expects " +
                    std::to_string(expected));
  }

  const std::size_t cells = static_cast<std::size_t>(rows * cols);
  std::vector<double> magnitude(cells);
  for (Eigen::Index r = 0; r < rows; ++r) {
    // Triangular weight in [0.5, 1], peaking mid-repetition.
    const double prior =
        rom_prior && rows > 1 ? 1.0 - 0.5 * std::abs(2.0 * static_cast<double>(r) / (rows - 1) - 1.0) : 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      magnitude[static_cast<std::size_t>(r * cols + c)] = std::abs(map.values(r, c)) * prior;
    }
  }
  const auto keep = static_cast<std::size_t>(std::ceil(top_t * static_cast<double>(cells) - 1e-9));
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return magnitude[a] > magnitude[b]; });

  const auto bounds = seg.bounds(side);
  std::vector<std::size_t> row_segment(static_cast<std::size_t>(rows), 0);
  for (std::size_t k = 0; k < bounds.size(); ++k)
    for (std::size_t t = bounds[k].first; t < bounds[k].second; ++t) row_segment[t] = k;

  std::vector<bool> hit(bounds.size(), false);
  for (std::size_t i = 0; i < std::min(keep, cells); ++i) hit[row_segment[order[i] / static_cast<std::size_t>(cols)]] = true;
  std::vector<std::size_t> ids;
  for (std::size_t k = 0; k < hit.size(); ++k)
    if (hit[k]) ids.push_back(k);
  return ids;
}

std::vector<bool> segment_mask(const SegmentAlignment& seg, const std::vector<std::size_t>& ids, Side side) {
  const auto bounds = seg.bounds(side);
  std::vector<bool> mask(side == Side::Signal ? seg.signal_length : seg.anchor_length, false);
  for (std::size_t id : ids) {
    if (id >= bounds.size()) {
      throw ConfigError("segment id " + std::to_string(id) + " out of range (have " + std::to_string(bounds.size()) +
                        " segments)");
    }
    for (std::size_t t = bounds[id].first; t < bounds[id].second; ++t) mask[t] = true;
  }
  return mask;
}

AttributionMap refine_with_mask(const AttributionMap& map, const std::vector<bool>& mask,
                                const RefinementConfig& cfg) {
  cfg.validate();
  if (mask.size() != static_cast<std::size_t>(map.values.rows())) {
    throw DataError("refine: mask length does not match the attribution map");
  }
  Samples scaled = map.values;
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    scaled.row(r) *= mask[static_cast<std::size_t>(r)] ? cfg.amplify : cfg.attenuate;
  }
  const int rows = static_cast<int>(scaled.rows());
  const int window = std::min(cfg.smooth_window, rows % 2 == 1 ? rows : rows - 1);
  Samples smoothed = window > 1 ? moving_average(scaled, window) : scaled;
  const double peak = smoothed.size() == 0 ? 0.0 : smoothed.cwiseAbs().maxCoeff();
  if (peak > 0.0) smoothed /= peak;
  return {std::move(smoothed), map.method, true};
}

AttributionMap refine_attribution(const AttributionMap& map, const std::vector<std::size_t>& critical,
                                  const SegmentAlignment& seg, const RefinementConfig& cfg, Side side) {
  const std::size_t expected = side == Side::Signal ? seg.signal_length : seg.anchor_length;
  if (static_cast<std::size_t>(map.values.rows()) != expected) {
    throw DataError("refine_attribution: map length does not match the alignment");
  }
  return refine_with_mask(map, segment_mask(seg, critical, side), cfg);
}

void write_attribution_csv(const AttributionMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write attribution CSV: " + path.string());
  const Eigen::Index cols = map.values.cols();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (c) out << ',';
    if (cols == static_cast<Eigen::Index>(kImuAxes)) {
      out << kAxisNames[c];
    } else {
      out << 'a' << c;
    }
  }
  out << '\n';
  out.precision(17);
  for (Eigen::Index r = 0; r < map.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << map.values(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace repx
