#pragma once

#include "repx/alignment.hpp"
#include "repx/attribution.hpp"
#include "repx/kinematics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace repx {

/// Outcome of one signal-vs-anchor analysis. Segment numbers meant for
/// display (worst_segment, stability_segment) are 1-based; critical_segments
/// holds 0-based ids.
struct AnalysisReport {
  double similarity = 0.0;
  AttributionMethod method = AttributionMethod::IntegratedGradients;

  EulerAxis primary_axis = EulerAxis::Pitch;
  double rom_signal_deg = 0.0;
  double rom_anchor_deg = 0.0;
  double rom_diff_deg = 0.0;
  double rom_signed_deg = 0.0;  // signal - anchor
  int worst_segment = 1;

  std::vector<std::optional<double>> njs_signal;
  std::vector<std::optional<double>> njs_anchor;
  double njs_delta_min = 0.0;  // min over segments of signal - anchor
  int stability_segment = 1;

  double dtw_cost = 0.0;
  SegmentAlignment segments;
  std::vector<std::size_t> critical_segments;

  std::vector<std::string> feedback;
};

}  // namespace repx
