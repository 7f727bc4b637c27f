#pragma once

#include "repx/alignment.hpp"
#include "repx/motion_series.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace repx {

inline constexpr double kGravity = 9.81;

/// Orientation per timestep, degrees. Yaw is the running integral of gz and
/// is not wrapped.
struct EulerSeries {
  std::vector<double> roll;
  std::vector<double> pitch;
  std::vector<double> yaw;
  double fs_hz = kDefaultFs;

  std::size_t size() const noexcept { return pitch.size(); }
};

enum class EulerAxis { Roll, Pitch, Yaw };
EulerAxis parse_euler_axis(std::string_view name);
std::string_view euler_axis_name(EulerAxis axis);

/// pitch = asin(-ax/|a|), roll = atan2(ay, az) from the accelerometer (gravity
/// is not removed, so dynamic acceleration leaks into both); yaw by
/// trapezoidal integration of gz from 0.
EulerSeries euler_from_imu(const MotionSeries& series);

/// Jerk-based smoothness. Higher is smoother.
///
///   NJS = -ln max(| tau^p / A^2 * sum_i jerk_i^2 * dt |, epsilon_floor)
///
/// with tau = N / fs, dt = 1 / fs, A = max |m| of the movement signal m and
/// jerk the `derivative_order`-th central difference of m (interior points
/// only). With p = 3 and jerk = m'' the argument is unit-free:
/// s^3 * (u/s^2)^2 * s / u^2.
struct NjsConfig {
  double epsilon_floor = 1e-12;
  bool per_axis = true;
  double tau_exponent = 3.0;
  int derivative_order = 2;
};

double njs(std::span<const double> movement, double fs_hz, const NjsConfig& cfg = {});

struct NjsResult {
  std::vector<std::optional<double>> per_axis;  // nullopt for axes without movement
  double mean = 0.0;
};

/// NJS over the selected columns (default: the three gyro axes). Columns with
/// zero amplitude are skipped; all-zero input throws DataError.
NjsResult njs_axes(const Samples& samples, double fs_hz, std::span<const std::size_t> axes, const NjsConfig& cfg = {});
NjsResult njs_axes(const MotionSeries& series, const NjsConfig& cfg = {});

/// max - min of one Euler angle, degrees.
double range_of_motion(const EulerSeries& euler, EulerAxis axis = EulerAxis::Pitch);

/// |ROM(signal) - ROM(anchor)| on the primary angle.
double rom_difference(const EulerSeries& signal_euler, const EulerSeries& anchor_euler,
                      EulerAxis axis = EulerAxis::Pitch);

/// Mean gyro-axis NJS per micro-segment. Segments shorter than 4 samples,
/// or without movement, are nullopt.
std::vector<std::optional<double>> stability_profile(const MotionSeries& series, const SegmentAlignment& seg,
                                                     Side side = Side::Signal, const NjsConfig& cfg = {});

/// CSV with header t,roll,pitch,yaw.
void write_euler_csv(const EulerSeries& euler, const std::filesystem::path& path);

}  // namespace repx
