#pragma once

#include "repx/alignment.hpp"
#include "repx/attribution.hpp"
#include "repx/motion_series.hpp"
#include "repx/scorer.hpp"
#include "repx/signal_prep.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace repx {

/// FMI values are kept in nats; reports multiply by this factor.
inline constexpr double kFmiReportScale = 1.0e4;

enum class Variant { Raw, Modified, Randomized };
std::string_view variant_name(Variant v);

struct MetricReport {
  double monotonicity = 0.0;
  double fmi = 0.0;  // nats
  double continuity = 0.0;
  AttributionMethod method = AttributionMethod::Saliency;
  Variant variant = Variant::Raw;
};

/// e_i = |score(signal) - score(signal with cell i replaced)| in row-major cell order.
struct OcclusionImportance {
  std::vector<double> e;
};

OcclusionImportance occlusion_importance(const ComparativeScorer& scorer, const MotionSeries& signal,
                                         const MotionSeries& anchor, std::span<const double> baseline_per_axis);
OcclusionImportance occlusion_importance(const ComparativeScorer& scorer, const MotionSeries& signal,
                                         const MotionSeries& anchor, double baseline_value);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman correlation between |a| and e. Without ties the closed form
/// 1 - 6 sum d^2 / (n (n^2 - 1)) is used; with ties, Pearson on average ranks.
/// `factor6 = false` evaluates the closed form without the 6 (ties still use
/// Pearson), clamped to [-1, 1].
double monotonicity(std::span<const double> attribution, std::span<const double> importance, bool factor6 = true);
double monotonicity(const AttributionMap& map, const OcclusionImportance& e, bool factor6 = true);

/// Plug-in entropy (nats) of a `bins`-bin histogram over the min-max range.
double histogram_entropy(std::span<const double> values, int bins);

/// Histogram mutual information (nats) between paired samples; each variable
/// is binned over its own min-max range. Constant variables give 0.
double mutual_information(std::span<const double> x, std::span<const double> y, int bins);

/// Feature mutual information between a series and its attribution (nats).
double fmi(const Samples& x, const AttributionMap& map, int bins = 200);

/// max over timesteps t and neighbours 1 <= |t - t'| <= k of
/// ||a_t - a_t'||_1 / max(||x_t - x_t'||_2, 1e-9).
double continuity(const Samples& x, const AttributionMap& map, int k = 5);

/// Control refinement on random windows of `window` timesteps that avoid the
/// critical segments; as many windows as there are critical segments.
/// Throws ExperimentError when no such window fits.
AttributionMap randomized_control(const AttributionMap& map, const SegmentAlignment& seg,
                                  const std::vector<std::size_t>& critical, const RefinementConfig& cfg,
                                  std::uint64_t seed, std::size_t window = 25,
                                  std::vector<std::size_t>* chosen_starts = nullptr);

/// Replacement value for occluded cells: per-axis mean of the anchor, or 0.
enum class OcclusionBaseline { AnchorMean, Zero };
std::string_view occlusion_baseline_name(OcclusionBaseline b);
OcclusionBaseline parse_occlusion_baseline(std::string_view name);

struct MetricSettings {
  int bins = 200;
  int k = 5;
  bool spearman_factor6 = true;
  std::size_t control_window = 25;
  OcclusionBaseline occlusion = OcclusionBaseline::AnchorMean;
};

struct EvaluationConfig {
  FilterConfig filter;
  bool preprocess = true;
  SegmentationConfig segmentation;
  RefinementConfig refinement;
  MetricSettings metrics;
  int ig_steps = 50;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
};

struct PairInput {
  MotionSeries signal;
  MotionSeries anchor;
  std::string id;
};

struct PairResult {
  std::size_t index = 0;
  std::string id;
  std::map<AttributionMethod, std::vector<std::size_t>> critical;
  /// methods x {Raw, Modified, Randomized}; Randomized is missing for a
  /// method whose control had no room outside the critical segments.
  std::vector<MetricReport> reports;
  std::map<AttributionMethod, std::string> control_skipped;
};

struct PairFailure {
  std::size_t index = 0;
  std::string id;
  std::string reason;
};

struct AggregateRow {
  AttributionMethod method;
  Variant variant;
  double monotonicity = 0.0;
  double fmi = 0.0;  // nats
  double continuity = 0.0;
  std::size_t pairs = 0;
};

struct CorpusEvaluation {
  std::vector<PairResult> pairs;
  std::vector<PairFailure> failures;
  std::vector<AggregateRow> table;
  std::size_t controls_skipped = 0;

  const AggregateRow& row(AttributionMethod m, Variant v) const;
  /// Fraction of pairs where Modified beats Raw (higher FMI / lower continuity).
  double fmi_win_rate(AttributionMethod m) const;
  double continuity_win_rate(AttributionMethod m) const;
  /// Over pairs that have both variants: fraction where Randomized FMI < Modified FMI.
  double control_fmi_loss_rate(AttributionMethod m) const;
};

/// Metrics for one pair under each method and all three variants.
PairResult evaluate_pair(const PairInput& pair, std::size_t index, const ComparativeScorer& scorer,
                         const std::vector<AttributionMethod>& methods, const EvaluationConfig& cfg);

/// Runs every pair on `cfg.jobs` workers; failed pairs are listed, not fatal.
/// Results are ordered by pair index regardless of scheduling.
CorpusEvaluation evaluate_corpus(const std::vector<PairInput>& pairs, const ComparativeScorer& scorer,
                                 const std::vector<AttributionMethod>& methods, const EvaluationConfig& cfg);

/// method,metric,raw,modified,randomized rows (FMI scaled by 1e4).
void write_table_csv(const CorpusEvaluation& eval, std::ostream& out);
void write_table_text(const CorpusEvaluation& eval, std::ostream& out);
/// One JSON object per pair and method.
void write_pairs_jsonl(const CorpusEvaluation& eval, std::ostream& out);

/// Stable per-task seed derived from a base seed and an index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t stream = 0);

}  // namespace repx
