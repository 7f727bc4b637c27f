#include "repx/motion_series.hpp"

#include "repx/error.hpp"

#include <cmath>
#include <string>

namespace repx {

void require_finite(const Samples& samples, const char* what) {
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      if (!std::isfinite(samples(r, c))) {
        throw DataError(std::string(what) + ": non-finite value at row " + std::to_string(r) +
                        ", axis " + std::to_string(c));
      }
    }
  }
}

MotionSeries::MotionSeries(Samples samples, double fs_hz, SeriesLabel label)
    : samples_(std::move(samples)), fs_hz_(fs_hz), label_(std::move(label)) {
  if (samples_.rows() < 2) {
    throw DataError("motion series needs at least 2 samples, got " + std::to_string(samples_.rows()));
  }
  if (samples_.cols() < 1) {
    throw DataError("motion series needs at least one axis");
  }
  if (!(fs_hz_ > 0.0) || !std::isfinite(fs_hz_)) {
    throw DataError("sampling frequency must be positive, got " + std::to_string(fs_hz_));
  }
  require_finite(samples_, "motion series");
}

MotionSeries MotionSeries::with_samples(Samples samples) const {
  return MotionSeries(std::move(samples), fs_hz_, label_);
}

}  // namespace repx
