#include "repx/avatar.hpp"

#include "repx/attribution.hpp"

#include "repx/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace repx {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Eigen::Vector3d wrist_of(const ArmModel& model, const JointAngles& x) { return forward_kinematics(model, x).wrist; }

JointAngles clamp_joints(const ArmModel& model, JointAngles x) {
  x(3) = model.hinge_enabled ? std::clamp(x(3), model.elbow_min, model.elbow_max) : 0.0;
  return x;
}

nlohmann::json vec_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

void ArmModel::validate() const {
  if (!(upper_arm_len > 0.0) || !(forearm_len > 0.0)) throw ConfigError("arm segment lengths must be positive");
  if (!(elbow_min <= elbow_max)) throw ConfigError("elbow limits are inverted");
}

Eigen::Matrix3d rotation_zyx(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

ArmPose forward_kinematics(const ArmModel& model, const JointAngles& angles) {
  const Eigen::Matrix3d shoulder = rotation_zyx(angles(0), angles(1), angles(2));
  // Hinge about the upper arm's local y axis; positive flexion brings the hand forward.
  const Eigen::Matrix3d hinge = Eigen::AngleAxisd(-angles(3), Eigen::Vector3d::UnitY()).toRotationMatrix();
  ArmPose pose;
  pose.elbow = shoulder * Eigen::Vector3d(0.0, 0.0, -model.upper_arm_len);
  pose.wrist = pose.elbow + shoulder * hinge * Eigen::Vector3d(0.0, 0.0, -model.forearm_len);
  return pose;
}

IkSolution lm_solve_ik(const ArmModel& model, const Eigen::Vector3d& target, const JointAngles& init,
                       const IkConfig& cfg) {
  model.validate();
  if (!target.allFinite()) throw DataError("lm_solve_ik: non-finite target");
  if (!init.allFinite()) throw DataError("lm_solve_ik: non-finite initial angles");

  IkSolution sol;
  JointAngles x = init;
  if (model.hinge_enabled) {
    // |wrist|^2 = l1^2 + l2^2 + 2 l1 l2 cos(elbow) fixes the elbow; its
    // gradient vanishes at the straight arm, so LM cannot find it from there.
    const double l1 = model.upper_arm_len, l2 = model.forearm_len;
    const double c = (target.squaredNorm() - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    x(3) = std::acos(std::clamp(c, -1.0, 1.0));
  }
  x = clamp_joints(model, x);
  Eigen::Vector3d f = wrist_of(model, x) - target;
  double cost = f.squaredNorm();
  double lambda = cfg.lambda_init;
  const int active = model.hinge_enabled ? 4 : 3;

  while (std::sqrt(cost) > cfg.tolerance && sol.iterations < cfg.max_iterations) {
    ++sol.iterations;
    Eigen::Matrix<double, 3, 4> jac = Eigen::Matrix<double, 3, 4>::Zero();
    for (int c = 0; c < active; ++c) {
      JointAngles xp = x;
      xp(c) += cfg.fd_step;
      jac.col(c) = (wrist_of(model, xp) - wrist_of(model, x)) / cfg.fd_step;
    }
    const Eigen::Matrix4d normal = jac.transpose() * jac + lambda * Eigen::Matrix4d::Identity();
    const JointAngles step = normal.ldlt().solve(-jac.transpose() * f);
    if (!step.allFinite()) break;

    const JointAngles candidate = clamp_joints(model, x + step);
    const Eigen::Vector3d f_new = wrist_of(model, candidate) - target;
    const double cost_new = f_new.squaredNorm();
    const double moved = (candidate - x).norm();
    if (cost_new < cost) {
      x = candidate;
      f = f_new;
      cost = cost_new;
      lambda *= cfg.lambda_down;
      sol.accepted_sq_residuals.push_back(cost);
    } else {
      lambda *= cfg.lambda_up;
    }
    if (moved <= cfg.min_step) break;
  }

  sol.angles = x;
  sol.residual = std::sqrt(cost);
  sol.converged = sol.residual <= cfg.tolerance;
  return sol;
}

std::string_view visual_mode_name(VisualMode mode) {
  switch (mode) {
    case VisualMode::Overall:
      return "Overall";
    case VisualMode::Stability:
      return "STB";
    case VisualMode::Rom:
      return "ROM";
  }
  return "unknown";
}

VisualMode parse_visual_mode(std::string_view name) {
  if (name == "Overall" || name == "overall") return VisualMode::Overall;
  if (name == "STB" || name == "stb" || name == "stability") return VisualMode::Stability;
  if (name == "ROM" || name == "rom") return VisualMode::Rom;
  throw ConfigError("unknown visualization mode '" + std::string(name) + "' (expected Overall, STB or ROM)");
}

std::vector<AvatarFrame> trajectory_from_wrist(const ArmModel& model, const std::vector<Eigen::Vector3d>& targets,
                                               double fs_hz, const IkConfig& cfg) {
  if (targets.empty()) throw DataError("trajectory_from_wrist: no targets");
  if (!(fs_hz > 0.0)) throw DataError("trajectory_from_wrist: sampling frequency must be positive");
  std::vector<AvatarFrame> frames;
  frames.reserve(targets.size());
  JointAngles warm = JointAngles::Zero();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const IkSolution sol = lm_solve_ik(model, targets[i], warm, cfg);
    const ArmPose pose = forward_kinematics(model, sol.angles);
    AvatarFrame frame;
    frame.elbow = pose.elbow;
    frame.wrist = pose.wrist;
    frame.t = static_cast<double>(i) / fs_hz;
    frame.angles = sol.angles;
    frame.residual = sol.residual;
    frame.converged = sol.converged;
    frames.push_back(frame);
    warm = sol.angles;
  }
  return frames;
}

std::vector<Eigen::Vector3d> wrist_targets_from_euler(const EulerSeries& euler, const ArmModel& model) {
  if (euler.size() == 0) throw DataError("wrist_targets_from_euler: empty Euler series");
  if (euler.roll.size() != euler.size() || euler.yaw.size() != euler.size()) {
    throw DataError("wrist_targets_from_euler: roll/pitch/yaw lengths differ");
  }
  const Eigen::Vector3d hanging(0.0, 0.0, -model.reach());
  std::vector<Eigen::Vector3d> out;
  out.reserve(euler.size());
  for (std::size_t i = 0; i < euler.size(); ++i) {
    out.push_back(rotation_zyx(euler.yaw[i] * kDegToRad, -euler.pitch[i] * kDegToRad, euler.roll[i] * kDegToRad) *
                  hanging);
  }
  return out;
}

void mark_frames(std::vector<AvatarFrame>& frames, const SegmentAlignment& seg,
                 const std::vector<std::size_t>& critical, VisualMode mode, Side side) {
  const std::vector<bool> mask = segment_mask(seg, critical, side);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].highlight = i < mask.size() && mask[i];
    frames[i].mode = mode;
  }
}

std::size_t corresponding_anchor_index(const SegmentAlignment& seg, std::size_t signal_index) {
  const auto sig = seg.bounds(Side::Signal);
  const auto anc = seg.bounds(Side::Anchor);
  const std::size_t k = seg.segment_of(signal_index, Side::Signal);
  const double frac = static_cast<double>(signal_index - sig[k].first) /
                      static_cast<double>(std::max<std::size_t>(1, sig[k].second - sig[k].first));
  const std::size_t span = anc[k].second - anc[k].first;
  const auto offset = static_cast<std::size_t>(std::floor(frac * static_cast<double>(span)));
  return std::min(anc[k].first + offset, seg.anchor_length - 1);
}

void export_frames(const std::vector<AvatarFrame>& signal_frames, const std::vector<AvatarFrame>& anchor_frames,
                   const SegmentAlignment& seg, const std::vector<std::size_t>& critical, VisualMode mode,
                   const std::filesystem::path& path) {
  if (signal_frames.empty()) throw DataError("export_frames: no frames");
  const bool aligned = seg.signal_length == signal_frames.size();
  const std::vector<bool> mask = aligned ? segment_mask(seg, critical, Side::Signal) : std::vector<bool>{};

  std::ofstream out(path);
  if (!out) throw IoError("cannot write frame file: " + path.string());
  for (std::size_t i = 0; i < signal_frames.size(); ++i) {
    const AvatarFrame& f = signal_frames[i];
    nlohmann::json j;
    j["index"] = i;
    j["t"] = f.t;
    j["segment"] = aligned ? nlohmann::json(seg.segment_of(i, Side::Signal)) : nlohmann::json(nullptr);
    j["highlight"] = aligned && mask[i];
    j["mode"] = visual_mode_name(mode);
    j["signal"] = {{"shoulder", vec_json(f.shoulder)}, {"elbow", vec_json(f.elbow)}, {"wrist", vec_json(f.wrist)},
                   {"converged", f.converged}};
    if (!anchor_frames.empty() && aligned && seg.anchor_length == anchor_frames.size()) {
      const std::size_t a = corresponding_anchor_index(seg, i);
      const AvatarFrame& g = anchor_frames[a];
      j["anchor"] = {{"index", a},
                     {"shoulder", vec_json(g.shoulder)},
                     {"elbow", vec_json(g.elbow)},
                     {"wrist", vec_json(g.wrist)},
                     {"converged", g.converged}};
    }
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

void write_frame_svg(const AvatarFrame& frame, const ArmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write SVG: " + path.string());
  const double scale = 160.0 / model.reach();
  const char* color = frame.highlight ? "#d62728" : "#1f77b4";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"220\" viewBox=\"0 0 400 220\">\n";
  auto panel = [&](double cx, int h, int v, const char* title) {
    auto px = [&](const Eigen::Vector3d& p) { return cx + p(h) * scale; };
    auto py = [&](const Eigen::Vector3d& p) { return 110.0 - p(v) * scale * 0.6; };
    out << fmt::format("  <text x=\"{:.1f}\" y=\"14\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", cx, title);
    out << fmt::format(
        "  <polyline points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"4\"/>\n",
        px(frame.shoulder), py(frame.shoulder), px(frame.elbow), py(frame.elbow), px(frame.wrist), py(frame.wrist),
        color);
    out << fmt::format("  <circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\"/>\n", px(frame.shoulder), py(frame.shoulder));
  };
  panel(100.0, 1, 2, "front (y-z)");
  panel(300.0, 0, 2, "side (x-z)");
  out << fmt::format("  <text x=\"200\" y=\"212\" font-size=\"10\" text-anchor=\"middle\">t = {:.2f} s, {}</text>\n",
                     frame.t, visual_mode_name(frame.mode));
  out << "</svg>\n";
}

}  // namespace repx
