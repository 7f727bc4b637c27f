#include "repx/error.hpp"
#include "repx/kinematics.hpp"
#include "repx/synth_data.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace repx;

TEST(Synth, ShapeAndLabel) {
  ExerciseSpec spec;
  const auto x = generate(spec);
  EXPECT_EQ(x.length(), 250u);
  EXPECT_EQ(x.axes(), 6u);
  EXPECT_EQ(x.fs_hz(), 50.0);
  EXPECT_EQ(x.label().exercise, "shoulder_abduction");
  EXPECT_EQ(x.label().true_rom_deg, 90.0);
}

TEST(Synth, RestingArmPointsDown) {
  for (auto e : {Exercise::ShoulderAbduction, Exercise::ForwardFlexion}) {
    ExerciseSpec spec;
    spec.exercise = e;
    const auto euler = euler_from_imu(generate(spec));
    EXPECT_NEAR(*std::max_element(euler.pitch.begin(), euler.pitch.end()), 90.0, 2.0);
    EXPECT_NEAR(euler.pitch.front(), 90.0, 1e-9);
  }
}

TEST(Synth, RomIsRecoveredAtEveryLevel) {
  for (auto e : {Exercise::ShoulderAbduction, Exercise::ForwardFlexion}) {
    for (double rom : kDefaultRomLevels) {
      ExerciseSpec spec;
      spec.exercise = e;
      spec.rom_deg = rom;
      EXPECT_NEAR(range_of_motion(euler_from_imu(generate(spec))), rom, 3.0) << exercise_name(e) << " " << rom;
    }
  }
}

TEST(Synth, NoiselessAccelerometerHasGravityNorm) {
  ExerciseSpec spec;
  spec.exercise = Exercise::ForwardFlexion;
  spec.rom_deg = 150;
  const auto x = generate(spec);
  for (std::size_t t = 0; t < x.length(); ++t) {
    EXPECT_NEAR(x.samples().row(static_cast<Eigen::Index>(t)).head<3>().norm(), 9.81, 1e-9);
  }
}

TEST(Synth, GyroIsTheElevationRate) {
  ExerciseSpec spec;
  spec.fs_hz = 1000;
  const auto x = generate(spec);
  double integral = 0.0, peak = 0.0;
  for (std::size_t t = 1; t < x.length(); ++t) {
    integral += 0.5 * (x(t - 1, 4) + x(t, 4)) / spec.fs_hz;
    peak = std::max(peak, integral);
  }
  EXPECT_NEAR(peak, std::numbers::pi / 2, 1e-3);
  EXPECT_NEAR(integral, 0.0, 1e-3);
}

TEST(Synth, ElevationProfile) {
  ExerciseSpec spec;
  EXPECT_EQ(elevation_at(spec, 0.0), 0.0);
  EXPECT_NEAR(elevation_at(spec, 1.0), std::numbers::pi / 4, 1e-12);  // halfway through the raise
  EXPECT_NEAR(elevation_at(spec, 2.5), std::numbers::pi / 2, 1e-12);
  EXPECT_EQ(elevation_at(spec, 5.0), 0.0);
}

TEST(Synth, SameSeedIsBitIdentical) {
  ExerciseSpec spec;
  spec.jitter_std = 0.1;
  spec.seed = 5;
  EXPECT_EQ(generate(spec).samples(), generate(spec).samples());
  auto other = spec;
  other.seed = 6;
  EXPECT_NE(generate(spec).samples(), generate(other).samples());
}

TEST(Synth, JitterHasRequestedSpread) {
  ExerciseSpec clean, noisy;
  noisy.jitter_std = 0.2;
  noisy.duration_s = 200;
  clean.duration_s = 200;
  const Samples d = generate(noisy).samples() - generate(clean).samples();
  const double sd = std::sqrt(d.array().square().mean());
  EXPECT_NEAR(sd, 0.2, 0.005);
}

TEST(Synth, InvalidSpecsRejected) {
  ExerciseSpec spec;
  spec.rom_deg = 0;
  EXPECT_THROW(generate(spec), ConfigError);
  spec = {};
  spec.raise_fraction = 0.7;
  spec.hold_fraction = 0.3;
  EXPECT_THROW(generate(spec), ConfigError);
  spec = {};
  spec.jitter_std = -1;
  EXPECT_THROW(generate(spec), ConfigError);
  EXPECT_THROW(parse_exercise("squat"), ConfigError);
  EXPECT_EQ(parse_exercise("flexion"), Exercise::ForwardFlexion);
}
