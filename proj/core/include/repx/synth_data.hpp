#pragma once

#include "repx/motion_series.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace repx {

enum class Exercise { ShoulderAbduction, ForwardFlexion };
std::string_view exercise_name(Exercise e);
Exercise parse_exercise(std::string_view name);

/// One synthetic repetition. The watch sits on the wrist with its x axis
/// along the forearm, so with the arm hanging the accelerometer reads
/// (-g, 0, 0) and pitch = 90 deg - elevation. Abduction rotates about the
/// sensor y axis, forward flexion about the sensor z axis.
struct ExerciseSpec {
  Exercise exercise = Exercise::ShoulderAbduction;
  double rom_deg = 90.0;
  double duration_s = 5.0;
  double jitter_std = 0.0;
  double fs_hz = kDefaultFs;
  std::uint64_t seed = 0;
  /// Fractions of the repetition spent raising and holding; lowering takes the rest.
  double raise_fraction = 0.4;
  double hold_fraction = 0.2;

  void validate() const;
};

inline const std::vector<double> kDefaultRomLevels = {30.0, 60.0, 90.0, 120.0, 150.0};

/// Minimum-jerk raise-hold-lower arc converted to ideal accelerometer
/// (gravity projection only) and gyroscope readings, plus seeded Gaussian
/// noise of jitter_std on every axis.
MotionSeries generate(const ExerciseSpec& spec);

/// Elevation angle (rad) of the noise-free arc at time t.
double elevation_at(const ExerciseSpec& spec, double t);

}  // namespace repx
