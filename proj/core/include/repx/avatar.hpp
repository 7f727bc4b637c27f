#pragma once

#include "repx/alignment.hpp"
#include "repx/kinematics.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <numbers>
#include <string_view>
#include <vector>

namespace repx {

/// Shoulder at the origin, z up, arm hanging along -z at zero angles.
/// Joint vector: [shoulder yaw (z), shoulder pitch (y), shoulder roll (x),
/// elbow flexion], radians; shoulder rotation is intrinsic Z-Y-X.
struct ArmModel {
  double upper_arm_len = 0.30;
  double forearm_len = 0.25;
  /// When false the elbow is held straight (0 rad) and IK solves the shoulder only.
  bool hinge_enabled = false;
  double elbow_min = 0.0;
  double elbow_max = 150.0 * std::numbers::pi / 180.0;

  double reach() const noexcept { return upper_arm_len + forearm_len; }
  void validate() const;
};

using JointAngles = Eigen::Vector4d;

struct ArmPose {
  Eigen::Vector3d elbow;
  Eigen::Vector3d wrist;
};

Eigen::Matrix3d rotation_zyx(double yaw, double pitch, double roll);

ArmPose forward_kinematics(const ArmModel& model, const JointAngles& angles);

struct IkConfig {
  double tolerance = 1e-6;     // meters
  double min_step = 1e-10;
  int max_iterations = 200;
  double lambda_init = 1e-3;
  double lambda_down = 0.5;
  double lambda_up = 4.0;
  double fd_step = 1e-6;       // radians
};

struct IkSolution {
  JointAngles angles = JointAngles::Zero();
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// ||f||^2 after each accepted step, in order.
  std::vector<double> accepted_sq_residuals;
};

/// Levenberg-Marquardt: (J^T J + lambda I) dx = -J^T f with f = FK_wrist(x) - target,
/// forward-difference Jacobian, lambda halved on accepted steps and
/// quadrupled on rejected ones, elbow clamped to its limits after each step.
/// With the hinge enabled the elbow starts from the law-of-cosines angle for
/// the target distance instead of init(3).
IkSolution lm_solve_ik(const ArmModel& model, const Eigen::Vector3d& target, const JointAngles& init,
                       const IkConfig& cfg = {});

enum class VisualMode { Overall, Stability, Rom };
std::string_view visual_mode_name(VisualMode mode);
VisualMode parse_visual_mode(std::string_view name);

struct AvatarFrame {
  Eigen::Vector3d shoulder = Eigen::Vector3d::Zero();
  Eigen::Vector3d elbow = Eigen::Vector3d::Zero();
  Eigen::Vector3d wrist = Eigen::Vector3d::Zero();
  double t = 0.0;
  bool highlight = false;
  VisualMode mode = VisualMode::Overall;
  JointAngles angles = JointAngles::Zero();
  double residual = 0.0;
  bool converged = true;
};

/// Per-frame IK, warm-started from the previous frame (first frame from zeros).
std::vector<AvatarFrame> trajectory_from_wrist(const ArmModel& model, const std::vector<Eigen::Vector3d>& targets,
                                               double fs_hz, const IkConfig& cfg = {});

/// Straight-arm wrist target per timestep: Rz(yaw) Ry(-pitch) Rx(roll) (0, 0, -reach).
/// Positive pitch swings the arm forward (+x), positive roll sideways (+y).
std::vector<Eigen::Vector3d> wrist_targets_from_euler(const EulerSeries& euler, const ArmModel& model);

/// Marks frames inside the critical segments and tags them with `mode`.
void mark_frames(std::vector<AvatarFrame>& frames, const SegmentAlignment& seg,
                 const std::vector<std::size_t>& critical, VisualMode mode, Side side);

/// Anchor frame index paired with a signal frame: same relative position
/// inside the corresponding micro-segment.
std::size_t corresponding_anchor_index(const SegmentAlignment& seg, std::size_t signal_index);

/// JSON-lines, one object per signal frame:
/// {"index","t","segment","highlight","mode","signal":{"shoulder","elbow","wrist"},"anchor":{...,"index"}}
/// The "anchor" member is omitted when no anchor frames are given.
void export_frames(const std::vector<AvatarFrame>& signal_frames, const std::vector<AvatarFrame>& anchor_frames,
                   const SegmentAlignment& seg, const std::vector<std::size_t>& critical, VisualMode mode,
                   const std::filesystem::path& path);

/// Front (y-z) and side (x-z) stick-figure views of one frame.
void write_frame_svg(const AvatarFrame& frame, const ArmModel& model, const std::filesystem::path& path);

}  // namespace repx
