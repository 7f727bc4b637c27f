#include "repx/synth_data.hpp"

#include "repx/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace repx {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kGravity = 9.81;

// Minimum-jerk blend 0 -> 1 and its derivative with respect to s.
double min_jerk(double s) { return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }
double min_jerk_rate(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }

struct Elevation {
  double angle;  // rad
  double rate;   // rad/s
};

Elevation elevation(const ExerciseSpec& spec, double t) {
  const double rom = spec.rom_deg * kDegToRad;
  const double raise = spec.raise_fraction * spec.duration_s;
  const double hold_end = (spec.raise_fraction + spec.hold_fraction) * spec.duration_s;
  const double lower = spec.duration_s - hold_end;
  if (t <= 0.0) return {0.0, 0.0};
  if (t < raise) {
    const double s = t / raise;
    return {rom * min_jerk(s), rom * min_jerk_rate(s) / raise};
  }
  if (t <= hold_end) return {rom, 0.0};
  if (t < spec.duration_s) {
    const double s = (t - hold_end) / lower;
    return {rom * (1.0 - min_jerk(s)), -rom * min_jerk_rate(s) / lower};
  }
  return {0.0, 0.0};
}

}  // namespace

std::string_view exercise_name(Exercise e) {
  return e == Exercise::ShoulderAbduction ? "shoulder_abduction" : "forward_flexion";
}

Exercise parse_exercise(std::string_view name) {
  if (name == "shoulder_abduction" || name == "abduction") return Exercise::ShoulderAbduction;
  if (name == "forward_flexion" || name == "flexion") return Exercise::ForwardFlexion;
  throw ConfigError("unknown exercise '" + std::string(name) + "'");
}

void ExerciseSpec::validate() const {
  if (!(rom_deg > 0.0 && rom_deg <= 180.0)) throw ConfigError("rom_deg must lie in (0, 180]");
  if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
  if (!(jitter_std >= 0.0)) throw ConfigError("jitter_std must be non-negative");
  if (!(fs_hz > 0.0)) throw ConfigError("fs_hz must be positive");
  if (!(raise_fraction > 0.0 && hold_fraction >= 0.0 && raise_fraction + hold_fraction < 1.0)) {
    throw ConfigError("raise/hold fractions must leave time for lowering");
  }
  if (duration_s * fs_hz < 2.0) throw ConfigError("repetition shorter than two samples");
}

double elevation_at(const ExerciseSpec& spec, double t) { return elevation(spec, t).angle; }

MotionSeries generate(const ExerciseSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.fs_hz));
  Samples x(n, static_cast<Eigen::Index>(kImuAxes));
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.fs_hz;
    const auto [angle, rate] = elevation(spec, t);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    if (spec.exercise == Exercise::ShoulderAbduction) {
      x.row(i) << -kGravity * c, 0.0, -kGravity * s, 0.0, rate, 0.0;
    } else {
      x.row(i) << -kGravity * c, kGravity * s, 0.0, 0.0, 0.0, rate;
    }
    if (spec.jitter_std > 0.0) {
      for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) += spec.jitter_std * noise(rng);
    }
  }
  SeriesLabel label;
  label.exercise = std::string(exercise_name(spec.exercise));
  label.true_rom_deg = spec.rom_deg;
  label.jitter_std = spec.jitter_std;
  return MotionSeries(std::move(x), spec.fs_hz, std::move(label));
}

}  // namespace repx
