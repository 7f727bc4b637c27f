#pragma once

#include "repx/alignment.hpp"
#include "repx/motion_series.hpp"
#include "repx/scorer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace repx {

enum class AttributionMethod { Saliency, InputXGradient, IntegratedGradients };

std::string_view method_name(AttributionMethod m);
/// Accepts the CLI spellings: saliency, ixg, ig.
AttributionMethod parse_method(std::string_view name);

/// Per-timestep, per-axis importance aligned with its source series.
struct AttributionMap {
  Samples values;
  AttributionMethod method = AttributionMethod::Saliency;
  bool normalized = false;

  double max_abs() const { return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff(); }
};

struct RefinementConfig {
  double top_t = 0.10;
  double amplify = 2.0;
  int smooth_window = 5;
  double attenuate = 1.0;
  /// Range-of-motion prior: favour segments near the middle of the repetition
  /// when picking critical segments. Off for stability analysis.
  bool rom_prior = false;

  void validate() const;
};

AttributionMap saliency(const ComparativeScorer& scorer, const MotionSeries& signal, const MotionSeries& anchor);

AttributionMap input_x_gradient(const ComparativeScorer& scorer, const MotionSeries& signal,
                                const MotionSeries& anchor);

/// Right-endpoint Riemann sum over the straight path baseline -> signal.
AttributionMap integrated_gradients(const ComparativeScorer& scorer, const MotionSeries& signal,
                                    const MotionSeries& anchor, const MotionSeries& baseline, int steps = 50);

/// Normal baseline on the anchor's scale: per axis, mean(anchor) + std(anchor) * z.
MotionSeries sample_baseline(const MotionSeries& anchor, std::size_t rows, std::uint64_t seed);

/// Dispatches on method. `baseline` is only read for integrated gradients.
AttributionMap attribute(AttributionMethod method, const ComparativeScorer& scorer, const MotionSeries& signal,
                         const MotionSeries& anchor, const std::optional<MotionSeries>& baseline = std::nullopt,
                         int ig_steps = 50);

/// Divides both maps by their shared max |value|. All-zero pairs come back
/// unchanged (still flagged normalized).
std::pair<AttributionMap, AttributionMap> normalize_joint(const AttributionMap& signal_map,
                                                          const AttributionMap& anchor_map);

/// Sorted ids of the micro-segments that hold at least one of the top
/// ceil(top_t * cells) cells by |value|. Ties at the cutoff go to the earlier
/// cell in row-major order.
std::vector<std::size_t> extract_top_segments(const AttributionMap& map, const SegmentAlignment& seg, double top_t,
                                              Side side = Side::Signal, bool rom_prior = false);

/// Amplify rows where mask is true, attenuate the rest, smooth along time
/// with a centered moving average, renormalize to max |value| = 1.
AttributionMap refine_with_mask(const AttributionMap& map, const std::vector<bool>& mask,
                                const RefinementConfig& cfg);

/// Refinement driven by critical micro-segments.
AttributionMap refine_attribution(const AttributionMap& map, const std::vector<std::size_t>& critical,
                                  const SegmentAlignment& seg, const RefinementConfig& cfg,
                                  Side side = Side::Signal);

/// Per-row mask of the timesteps covered by the given segments.
std::vector<bool> segment_mask(const SegmentAlignment& seg, const std::vector<std::size_t>& ids, Side side);

/// CSV with header ax,ay,az,gx,gy,gz (or a0..aK for other widths), one row per timestep.
void write_attribution_csv(const AttributionMap& map, const std::filesystem::path& path);

}  // namespace repx
