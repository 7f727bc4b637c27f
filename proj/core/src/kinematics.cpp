#include "repx/kinematics.hpp"

#include "repx/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace repx {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr std::array<std::size_t, 3> kGyroAxes = {3, 4, 5};

}  // namespace

EulerAxis parse_euler_axis(std::string_view name) {
  if (name == "roll") return EulerAxis::Roll;
  if (name == "pitch") return EulerAxis::Pitch;
  if (name == "yaw") return EulerAxis::Yaw;
  throw ConfigError("unknown Euler axis '" + std::string(name) + "' (expected roll, pitch or yaw)");
}

std::string_view euler_axis_name(EulerAxis axis) {
  switch (axis) {
    case EulerAxis::Roll:
      return "roll";
    case EulerAxis::Pitch:
      return "pitch";
    case EulerAxis::Yaw:
      return "yaw";
  }
  return "unknown";
}

EulerSeries euler_from_imu(const MotionSeries& series) {
  if (series.axes() != kImuAxes) {
    throw DataError("euler_from_imu needs 6 axes, got " + std::to_string(series.axes()));
  }
  const std::size_t n = series.length();
  EulerSeries out;
  out.fs_hz = series.fs_hz();
  out.roll.resize(n);
  out.pitch.resize(n);
  out.yaw.resize(n);
  const double dt = 1.0 / series.fs_hz();
  double yaw_rad = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double ax = series(t, 0) / kGravity;
    const double ay = series(t, 1) / kGravity;
    const double az = series(t, 2) / kGravity;
    const double norm = std::sqrt(ax * ax + ay * ay + az * az);
    if (norm == 0.0) throw DataError("euler_from_imu: zero accelerometer norm at timestep " + std::to_string(t));
    out.pitch[t] = std::asin(std::clamp(-ax / norm, -1.0, 1.0)) * kRadToDeg;
    out.roll[t] = std::atan2(ay, az) * kRadToDeg;
    if (t > 0) yaw_rad += 0.5 * (series(t - 1, 5) + series(t, 5)) * dt;
    out.yaw[t] = yaw_rad * kRadToDeg;
  }
  return out;
}

double njs(std::span<const double> movement, double fs_hz, const NjsConfig& cfg) {
  const std::size_t n = movement.size();
  if (n < 4) throw DataError("njs needs at least 4 samples, got " + std::to_string(n));
  if (!(fs_hz > 0.0)) throw DataError("njs: sampling frequency must be positive");
  if (cfg.derivative_order != 1 && cfg.derivative_order != 2) {
    throw ConfigError("njs derivative_order must be 1 or 2");
  }
  if (!(cfg.epsilon_floor > 0.0)) throw ConfigError("njs epsilon_floor must be positive");

  double amplitude = 0.0;
  for (double v : movement) amplitude = std::max(amplitude, std::abs(v));
  if (amplitude == 0.0) throw DataError("njs: zero movement amplitude");

  const double dt = 1.0 / fs_hz;
  double sum_sq = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double jerk = cfg.derivative_order == 2
                            ? (movement[i + 1] - 2.0 * movement[i] + movement[i - 1]) / (dt * dt)
                            : (movement[i + 1] - movement[i - 1]) / (2.0 * dt);
    sum_sq += jerk * jerk;
  }
  const double tau = static_cast<double>(n) / fs_hz;
  const double arg = std::abs(std::pow(tau, cfg.tau_exponent) / (amplitude * amplitude) * sum_sq * dt);
  return -std::log(std::max(arg, cfg.epsilon_floor));
}

NjsResult njs_axes(const Samples& samples, double fs_hz, std::span<const std::size_t> axes, const NjsConfig& cfg) {
  NjsResult out;
  std::vector<double> column(static_cast<std::size_t>(samples.rows()));
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t axis : axes) {
    if (axis >= static_cast<std::size_t>(samples.cols())) throw DataError("njs_axes: axis index out of range");
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
      column[static_cast<std::size_t>(r)] = samples(r, static_cast<Eigen::Index>(axis));
    }
    const bool moving = std::any_of(column.begin(), column.end(), [](double v) { return v != 0.0; });
    if (!moving) {
      out.per_axis.push_back(std::nullopt);
      continue;
    }
    const double value = njs(column, fs_hz, cfg);
    out.per_axis.push_back(value);
    sum += value;
    ++used;
  }
  if (used == 0) throw DataError("njs: no movement on any selected axis");
  out.mean = sum / static_cast<double>(used);
  return out;
}

NjsResult njs_axes(const MotionSeries& series, const NjsConfig& cfg) {
  if (series.axes() != kImuAxes) throw DataError("njs_axes: expected 6-axis IMU series");
  return njs_axes(series.samples(), series.fs_hz(), kGyroAxes, cfg);
}

double range_of_motion(const EulerSeries& euler, EulerAxis axis) {
  const std::vector<double>& v =
      axis == EulerAxis::Roll ? euler.roll : (axis == EulerAxis::Pitch ? euler.pitch : euler.yaw);
  if (v.empty()) throw DataError("range_of_motion: empty Euler series");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double rom_difference(const EulerSeries& signal_euler, const EulerSeries& anchor_euler, EulerAxis axis) {
  return std::abs(range_of_motion(signal_euler, axis) - range_of_motion(anchor_euler, axis));
}

std::vector<std::optional<double>> stability_profile(const MotionSeries& series, const SegmentAlignment& seg,
                                                     Side side, const NjsConfig& cfg) {
  if (series.axes() != kImuAxes) throw DataError("stability_profile: expected 6-axis IMU series");
  const std::size_t expected = side == Side::Signal ? seg.signal_length : seg.anchor_length;
  if (series.length() != expected) throw DataError("stability_profile: series length does not match the alignment");
  std::vector<std::optional<double>> out;
  for (const auto& [begin, end] : seg.bounds(side)) {
    if (end - begin < 4) {
      out.push_back(std::nullopt);
      continue;
    }
    const Samples part = series.samples().middleRows(static_cast<Eigen::Index>(begin),
                                                     static_cast<Eigen::Index>(end - begin));
    try {
      out.push_back(njs_axes(part, series.fs_hz(), kGyroAxes, cfg).mean);
    } catch (const DataError&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

void write_euler_csv(const EulerSeries& euler, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write Euler CSV: " + path.string());
  out << "t,roll,pitch,yaw\n";
  out.precision(17);
  for (std::size_t i = 0; i < euler.size(); ++i) {
    out << static_cast<double>(i) / euler.fs_hz << ',' << euler.roll[i] << ',' << euler.pitch[i] << ','
        << euler.yaw[i] << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace repx
