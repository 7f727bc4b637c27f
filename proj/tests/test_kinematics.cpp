#include "repx/error.hpp"
#include "repx/kinematics.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

using namespace repx;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sine(double f, double fs, double seconds, double amp = 1.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = amp * std::sin(2 * kPi * f * static_cast<double>(i) / fs);
  return v;
}

MotionSeries gravity_only(double roll_deg, double pitch_deg, std::size_t n = 10, double gz = 0.0) {
  const double r = roll_deg * kPi / 180, p = pitch_deg * kPi / 180;
  Samples x(static_cast<Eigen::Index>(n), 6);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    x.row(t) << -kGravity * std::sin(p), kGravity * std::cos(p) * std::sin(r), kGravity * std::cos(p) * std::cos(r),
        0, 0, gz;
  }
  return MotionSeries(x, 50.0);
}

}  // namespace

TEST(Euler, GravityOnlyAngles) {
  for (double roll : {-60.0, 0.0, 30.0}) {
    for (double pitch : {-45.0, 0.0, 20.0, 80.0}) {
      const auto e = euler_from_imu(gravity_only(roll, pitch));
      EXPECT_NEAR(e.pitch[3], pitch, 1e-9);
      EXPECT_NEAR(e.roll[3], roll, 1e-9);
      EXPECT_EQ(e.yaw[3], 0.0);
    }
  }
}

TEST(Euler, YawIntegratesGyroZ) {
  // 1 rad/s for 2 s at 50 Hz: 101 samples cover exactly 2 s.
  const auto e = euler_from_imu(gravity_only(0, 0, 101, 1.0));
  EXPECT_NEAR(e.yaw.back(), 2.0 * 180.0 / kPi, 1e-9);
  EXPECT_EQ(e.yaw.front(), 0.0);
}

TEST(Euler, ZeroAccelerationRejected) {
  EXPECT_THROW(euler_from_imu(MotionSeries(Samples::Zero(4, 6))), DataError);
  EXPECT_THROW(euler_from_imu(MotionSeries(Samples::Ones(4, 3))), DataError);
}

TEST(Njs, SinusoidMatchesQuadrature) {
  // m'' = -(2 pi f)^2 m, so sum jerk^2 dt ~ (2 pi f)^4 T / 2 over whole cycles.
  const double f = 1.0, fs = 1000.0, T = 3.0;
  const double expected = -std::log(std::pow(T, 4) * std::pow(2 * kPi * f, 4) / 2.0);
  EXPECT_NEAR(njs(sine(f, fs, T), fs), expected, 1e-2);
}

TEST(Njs, InvariantToAmplitudeAndDuration) {
  const double fs = 500.0;
  const double a = njs(sine(1.0, fs, 2.0), fs);
  EXPECT_NEAR(njs(sine(1.0, fs, 2.0, 7.5), fs), a, 1e-12);
  EXPECT_NEAR(njs(sine(0.5, fs, 4.0), fs), a, 1e-3);
  EXPECT_NEAR(njs(sine(1.0, 2 * fs, 2.0), 2 * fs), a, 1e-3);
}

TEST(Njs, JitterLowersSmoothness) {
  const double fs = 50.0;
  const auto clean = sine(0.2, fs, 5.0);
  auto noisy = clean;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (auto& v : noisy) v += noise(rng);
  EXPECT_LT(njs(noisy, fs), njs(clean, fs));
}

TEST(Njs, FloorAndErrors) {
  const std::vector<double> ramp = {0, 1, 2, 3, 4, 5};
  NjsConfig cfg;
  EXPECT_DOUBLE_EQ(njs(ramp, 50.0, cfg), -std::log(cfg.epsilon_floor));
  EXPECT_THROW(njs(std::vector<double>{1, 2, 3}, 50.0), DataError);
  EXPECT_THROW(njs(std::vector<double>(6, 0.0), 50.0), DataError);
  cfg.derivative_order = 3;
  EXPECT_THROW(njs(ramp, 50.0, cfg), ConfigError);
}

TEST(Njs, FirstDerivativeVariant) {
  NjsConfig cfg;
  cfg.derivative_order = 1;
  cfg.tau_exponent = 1.0;
  // m' = 2 pi f cos: sum (m')^2 dt ~ (2 pi f)^2 T / 2, tau^1 / A^2 = T.
  const double f = 1.0, fs = 1000.0, T = 2.0;
  EXPECT_NEAR(njs(sine(f, fs, T), fs, cfg), -std::log(T * T * std::pow(2 * kPi * f, 2) / 2.0), 1e-2);
}

TEST(Njs, AxesSkipStillColumns) {
  Samples x = Samples::Zero(100, 6);
  const auto s = sine(0.5, 50.0, 2.0);
  for (Eigen::Index t = 0; t < 100; ++t) x(t, 4) = s[static_cast<std::size_t>(t)];
  const auto r = njs_axes(MotionSeries(x));
  ASSERT_EQ(r.per_axis.size(), 3u);
  EXPECT_FALSE(r.per_axis[0].has_value());
  ASSERT_TRUE(r.per_axis[1].has_value());
  EXPECT_DOUBLE_EQ(r.mean, *r.per_axis[1]);
  EXPECT_THROW(njs_axes(MotionSeries(Samples::Zero(100, 6))), DataError);
}

TEST(Rom, RangeAndDifference) {
  EulerSeries a, b;
  a.pitch = {0, 10, 45, 20};
  a.roll = {0, 0, 0, 0};
  a.yaw = {0, 0, 0, 0};
  b.pitch = {-5, 30};
  b.roll = {1, 2};
  b.yaw = {0, 0};
  EXPECT_DOUBLE_EQ(range_of_motion(a), 45.0);
  EXPECT_DOUBLE_EQ(rom_difference(a, b), 10.0);
  EXPECT_DOUBLE_EQ(rom_difference(a, b, EulerAxis::Roll), 1.0);
  EXPECT_THROW(range_of_motion(EulerSeries{}), DataError);
}

TEST(Stability, ProfilePerSegment) {
  Samples x = testutil::random_samples(60, 6, 3);
  const auto seg = SegmentAlignment::identity(60, 5);
  const auto profile = stability_profile(MotionSeries(x), seg);
  ASSERT_EQ(profile.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    ASSERT_TRUE(profile[k].has_value());
    const Samples part = x.middleRows(static_cast<Eigen::Index>(12 * k), 12);
    const std::size_t gyro[] = {3, 4, 5};
    EXPECT_DOUBLE_EQ(*profile[k], njs_axes(part, 50.0, gyro).mean);
  }
}

TEST(Stability, ShortSegmentsAreEmpty) {
  const auto seg = SegmentAlignment::identity(9, 3);
  const auto profile = stability_profile(MotionSeries(testutil::random_samples(9, 6, 1)), seg);
  for (const auto& p : profile) EXPECT_FALSE(p.has_value());
}

TEST(EulerCsv, Format) {
  EulerSeries e;
  e.roll = {1, 2};
  e.pitch = {3, 4};
  e.yaw = {5, 6};
  e.fs_hz = 10;
  const auto path = testutil::scratch_dir("euler") / "e.csv";
  write_euler_csv(e, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,roll,pitch,yaw");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1,3,5");
  std::getline(in, line);
  EXPECT_EQ(line, "0.10000000000000001,2,4,6");
}

TEST(EulerAxisNames, RoundTrip) {
  for (auto a : {EulerAxis::Roll, EulerAxis::Pitch, EulerAxis::Yaw}) EXPECT_EQ(parse_euler_axis(euler_axis_name(a)), a);
  EXPECT_THROW(parse_euler_axis("heading"), ConfigError);
}
