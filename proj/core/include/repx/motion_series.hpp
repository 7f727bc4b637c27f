#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>

namespace repx {

/// Row-major sample matrix: one row per timestep, one column per axis.
using Samples = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kImuAxes = 6;
inline constexpr double kDefaultFs = 50.0;
inline constexpr const char* kAxisNames[kImuAxes] = {"ax", "ay", "az", "gx", "gy", "gz"};

struct SeriesLabel {
  std::string subject;
  std::string exercise;
  int repetition = -1;
  /// Ground truth, known for synthetic data only.
  std::optional<double> true_rom_deg;
  std::optional<double> jitter_std;
};

/// A repetition of IMU data. Columns are [ax, ay, az, gx, gy, gz] for real
/// recordings (accel in m/s^2, gyro in rad/s); alignment code also accepts
/// fewer axes. Construction enforces N >= 2, finite values and fs > 0.
class MotionSeries {
 public:
  MotionSeries() = default;
  explicit MotionSeries(Samples samples, double fs_hz = kDefaultFs, SeriesLabel label = {});

  const Samples& samples() const noexcept { return samples_; }
  double fs_hz() const noexcept { return fs_hz_; }
  const SeriesLabel& label() const noexcept { return label_; }
  void set_label(SeriesLabel label) { label_ = std::move(label); }

  std::size_t length() const noexcept { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t axes() const noexcept { return static_cast<std::size_t>(samples_.cols()); }
  double operator()(std::size_t t, std::size_t axis) const {
    return samples_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(axis));
  }

  /// Same metadata, new samples (validated).
  MotionSeries with_samples(Samples samples) const;

 private:
  Samples samples_;
  double fs_hz_ = kDefaultFs;
  SeriesLabel label_;
};

/// Throws DataError if any entry is NaN or infinite.
void require_finite(const Samples& samples, const char* what);

}  // namespace repx
