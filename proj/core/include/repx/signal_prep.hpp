#pragma once

#include "repx/motion_series.hpp"

#include <array>
#include <vector>

namespace repx {

struct FilterConfig {
  double cutoff_hz = 20.0;
  int order = 4;
  int ma_window = 5;
  /// Forward-backward filtering (magnitude |H|^2, no phase shift). When false
  /// a single causal pass is run (magnitude |H|).
  bool zero_phase = true;
};

/// One second-order section, a0 normalized to 1: b0 b1 b2 / 1 a1 a2.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 2> a{};
};

/// Digital Butterworth low-pass as cascaded sections (bilinear transform with
/// cutoff prewarping). Odd orders get one first-order section with b2 = a2 = 0.
std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double fs_hz);

/// Runs the section cascade over one channel. The initial state is the
/// step-response steady state scaled by x[0], so a constant input passes
/// through unchanged from the first sample.
std::vector<double> sos_filter(const std::vector<Biquad>& sections, const std::vector<double>& x);

/// Zero-phase forward-backward filtering with odd-extension padding.
std::vector<double> sos_filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x);

MotionSeries butterworth_lowpass(const MotionSeries& series, const FilterConfig& cfg);

/// Centered moving average per axis; windows are truncated at the edges.
Samples moving_average(const Samples& samples, int window);
MotionSeries moving_average(const MotionSeries& series, int window);

/// Noise removal: low-pass, then moving average.
MotionSeries primitive_removal(const MotionSeries& series, const FilterConfig& cfg);

}  // namespace repx
