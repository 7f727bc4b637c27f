#pragma once

#include "repx/alignment.hpp"
#include "repx/attribution.hpp"
#include "repx/avatar.hpp"
#include "repx/feedback.hpp"
#include "repx/kinematics.hpp"
#include "repx/report.hpp"
#include "repx/scorer.hpp"
#include "repx/signal_prep.hpp"
#include "repx/synth_data.hpp"
#include "repx/xai_metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace repx {

struct ExerciseProfile {
  Exercise exercise = Exercise::ShoulderAbduction;
  EulerAxis primary_axis = EulerAxis::Pitch;
  double high_similarity = 0.9;
  double medium_similarity = 0.7;
  VisualMode mode = VisualMode::Rom;
};

struct PipelineConfig {
  FilterConfig filter;
  bool preprocess = true;
  SegmentationConfig segmentation;
  AttributionMethod method = AttributionMethod::IntegratedGradients;
  int ig_steps = 50;
  RefinementConfig refinement;
  SurrogateParams scorer;
  std::string scorer_weights;  // JSON weight file; empty means the seeded surrogate
  MetricSettings metrics;
  ExerciseProfile profile;
  NjsConfig njs;
  ArmModel arm;
  IkConfig ik;
  std::string templates;  // JSON template file; empty means the built-in set
  std::string output_dir = "out";
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  std::size_t max_pairs_per_subject = 100;
  std::optional<double> fs_hz;  // overrides the rate inferred from CSV time stamps
  bool svg = false;

  void validate() const;
};

/// Every key with its value; this is what `print-config` emits.
std::string config_to_json(const PipelineConfig& cfg);
/// Partial documents are merged over the defaults. Unknown keys and type
/// mismatches throw ConfigError naming the offending key path.
PipelineConfig config_from_json(const std::string& text, const std::string& source = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

std::unique_ptr<ComparativeScorer> make_scorer(const PipelineConfig& cfg);
TemplateSet make_templates(const PipelineConfig& cfg);
EvaluationConfig evaluation_config(const PipelineConfig& cfg);

/// Sensor angles to the straight-arm pose used by the avatar. The sensor x
/// axis runs along the forearm, so elevation = 90 - pitch; abduction raises
/// the arm sideways (roll), flexion forwards (pitch).
EulerSeries arm_euler_from_sensor(const EulerSeries& sensor, Exercise exercise);

struct Analysis {
  AnalysisReport report;
  MotionSeries signal;  // after primitive removal
  MotionSeries anchor;
  AttributionMap signal_raw;
  AttributionMap anchor_raw;
  AttributionMap signal_refined;
  AttributionMap anchor_refined;
  EulerSeries signal_euler;
  EulerSeries anchor_euler;
  std::vector<AvatarFrame> signal_frames;
  std::vector<AvatarFrame> anchor_frames;
};

/// Filter, align, attribute, refine, measure, phrase and pose one pair.
Analysis analyze_pair(const MotionSeries& signal, const MotionSeries& anchor, const ComparativeScorer& scorer,
                      const TemplateSet& templates, const PipelineConfig& cfg);

std::string report_to_json(const AnalysisReport& report);

/// report.json, attribution_{signal,anchor}[_refined].csv,
/// euler_{signal,anchor}.csv, frames.jsonl, feedback.txt (and frame.svg).
void write_analysis(const Analysis& analysis, const PipelineConfig& cfg, const std::filesystem::path& dir);

/// Corpus layout: one sub-directory per subject holding one CSV per
/// repetition. Within a subject every pair i < j of files (sorted by name)
/// is a candidate, file i as anchor; above `max_pairs_per_subject` a seeded
/// sample is kept. Throws DataError when no subject has two repetitions.
std::vector<PairInput> load_corpus_pairs(const std::filesystem::path& dir, std::size_t max_pairs_per_subject,
                                         std::uint64_t seed, std::optional<double> fs_hz = std::nullopt);

struct CorpusSpec {
  std::vector<Exercise> exercises = {Exercise::ShoulderAbduction};
  std::vector<double> rom_levels = kDefaultRomLevels;
  std::size_t repetitions = 3;
  std::size_t subjects = 1;
  double jitter_std = 0.05;
  double duration_s = 5.0;
  /// Each repetition's duration is scaled by a uniform factor in [1 - s, 1 + s].
  double timing_spread = 0.1;
  double fs_hz = kDefaultFs;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Writes <dir>/subjectNN/<exercise>_romR_repK.csv plus manifest.json and
/// returns the manifest path.
std::filesystem::path generate_corpus(const CorpusSpec& spec, const std::filesystem::path& dir);

}  // namespace repx
