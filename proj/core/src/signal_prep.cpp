#include "repx/signal_prep.hpp"

#include "repx/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace repx {
namespace {

void check_filter_config(const FilterConfig& cfg, double fs_hz) {
  if (cfg.order < 1) {
    throw ConfigError("filter order must be positive, got " + std::to_string(cfg.order));
  }
  if (!(cfg.cutoff_hz > 0.0) || !(cfg.cutoff_hz < fs_hz / 2.0)) {
    throw ConfigError("cutoff " + std::to_string(cfg.cutoff_hz) + " Hz must lie in (0, " +
                      std::to_string(fs_hz / 2.0) + ") Hz for fs = " + std::to_string(fs_hz));
  }
}

// State of a transposed direct form II section at steady state for a unit step.
std::array<double, 2> steady_state(const Biquad& s) {
  const double gain = (s.b[0] + s.b[1] + s.b[2]) / (1.0 + s.a[0] + s.a[1]);
  const double z2 = s.b[2] - s.a[1] * gain;
  const double z1 = s.b[1] - s.a[0] * gain + z2;
  return {z1, z2};
}

double dc_gain(const Biquad& s) { return (s.b[0] + s.b[1] + s.b[2]) / (1.0 + s.a[0] + s.a[1]); }

std::vector<double> run_cascade(const std::vector<Biquad>& sections, std::vector<double> x, double x0) {
  double scale = x0;
  for (const auto& s : sections) {
    auto z = steady_state(s);
    z[0] *= scale;
    z[1] *= scale;
    for (double& v : x) {
      const double in = v;
      const double out = s.b[0] * in + z[0];
      z[0] = s.b[1] * in - s.a[0] * out + z[1];
      z[1] = s.b[2] * in - s.a[1] * out;
      v = out;
    }
    scale *= dc_gain(s);
  }
  return x;
}

Samples map_columns(const Samples& in, auto&& fn) {
  Samples out(in.rows(), in.cols());
  std::vector<double> column(static_cast<std::size_t>(in.rows()));
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    for (Eigen::Index r = 0; r < in.rows(); ++r) column[static_cast<std::size_t>(r)] = in(r, c);
    const std::vector<double> filtered = fn(column);
    for (Eigen::Index r = 0; r < in.rows(); ++r) out(r, c) = filtered[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace

std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double fs_hz) {
  check_filter_config(FilterConfig{cutoff_hz, order, 1, true}, fs_hz);
  const double k = 2.0 * fs_hz;
  const double wc = k * std::tan(std::numbers::pi * cutoff_hz / fs_hz);

  std::vector<Biquad> sections;
  for (int p = 0; p < order / 2; ++p) {
    // Analog prototype pole pair at angle theta from the negative real axis.
    const double theta = std::numbers::pi * (2.0 * p + order + 1) / (2.0 * order);
    const double a1 = -2.0 * std::cos(theta) * wc;  // s^2 + a1 s + a0
    const double a0 = wc * wc;
    const double d0 = k * k + a1 * k + a0;
    Biquad s;
    s.b = {a0 / d0, 2.0 * a0 / d0, a0 / d0};
    s.a = {(2.0 * a0 - 2.0 * k * k) / d0, (k * k - a1 * k + a0) / d0};
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double d0 = k + wc;
    Biquad s;
    s.b = {wc / d0, wc / d0, 0.0};
    s.a = {(wc - k) / d0, 0.0};
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> sos_filter(const std::vector<Biquad>& sections, const std::vector<double>& x) {
  if (x.empty()) return {};
  return run_cascade(sections, x, x.front());
}

std::vector<double> sos_filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return x;
  const std::size_t pad = std::min<std::size_t>(3 * (2 * sections.size() + 1), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  std::vector<double> fwd = run_cascade(sections, ext, ext.front());
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = run_cascade(sections, fwd, fwd.front());
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad), bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

MotionSeries butterworth_lowpass(const MotionSeries& series, const FilterConfig& cfg) {
  check_filter_config(cfg, series.fs_hz());
  require_finite(series.samples(), "butterworth_lowpass input");
  const auto sections = design_butterworth_lowpass(cfg.order, cfg.cutoff_hz, series.fs_hz());
  Samples out = map_columns(series.samples(), [&](const std::vector<double>& col) {
    return cfg.zero_phase ? sos_filtfilt(sections, col) : sos_filter(sections, col);
  });
  return series.with_samples(std::move(out));
}

Samples moving_average(const Samples& samples, int window) {
  const Eigen::Index n = samples.rows();
  if (window < 1 || window % 2 == 0 || window > n) {
    throw ConfigError("moving average window must be odd and in [1, " + std::to_string(n) + "], got " +
                      std::to_string(window));
  }
  const Eigen::Index half = window / 2;
  Samples out(n, samples.cols());
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, t - half);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, t + half);
    out.row(t) = samples.middleRows(lo, hi - lo + 1).colwise().mean();
  }
  return out;
}

MotionSeries moving_average(const MotionSeries& series, int window) {
  return series.with_samples(moving_average(series.samples(), window));
}

MotionSeries primitive_removal(const MotionSeries& series, const FilterConfig& cfg) {
  return moving_average(butterworth_lowpass(series, cfg), cfg.ma_window);
}

}  // namespace repx
