#include "repx/pipeline.hpp"

#include "repx/error.hpp"
#include "repx/io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace repx {
namespace {

using nlohmann::json;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string_view nonlinearity_name(Nonlinearity n) { return n == Nonlinearity::Tanh ? "tanh" : "identity"; }

Nonlinearity parse_nonlinearity(std::string_view s) {
  if (s == "tanh") return Nonlinearity::Tanh;
  if (s == "identity") return Nonlinearity::Identity;
  throw ConfigError("unknown nonlinearity '" + std::string(s) + "' (expected tanh or identity)");
}

json to_doc(const PipelineConfig& c) {
  json j;
  j["filter"] = {{"cutoff_hz", c.filter.cutoff_hz},
                 {"order", c.filter.order},
                 {"ma_window", c.filter.ma_window},
                 {"zero_phase", c.filter.zero_phase}};
  j["preprocess"] = c.preprocess;
  j["segmentation"] = {{"n_seg", c.segmentation.n_seg}, {"smooth_window", c.segmentation.smooth_window}};
  j["attribution"] = {{"method", method_name(c.method)}, {"ig_steps", c.ig_steps}};
  j["refinement"] = {{"top_t", c.refinement.top_t},
                     {"amplify", c.refinement.amplify},
                     {"smooth_window", c.refinement.smooth_window},
                     {"attenuate", c.refinement.attenuate},
                     {"rom_prior", c.refinement.rom_prior}};
  j["scorer"] = {{"pool_bins", c.scorer.pool_bins},
                 {"hidden", c.scorer.hidden},
                 {"embed", c.scorer.embed},
                 {"nonlinearity", nonlinearity_name(c.scorer.nonlinearity)},
                 {"bias", c.scorer.bias},
                 {"seed", c.scorer.seed},
                 {"weights", c.scorer_weights}};
  j["metrics"] = {{"bins", c.metrics.bins},
                  {"k", c.metrics.k},
                  {"spearman_factor6", c.metrics.spearman_factor6},
                  {"control_window", c.metrics.control_window},
                  {"occlusion_baseline", occlusion_baseline_name(c.metrics.occlusion)}};
  j["profile"] = {{"exercise", exercise_name(c.profile.exercise)},
                  {"primary_axis", euler_axis_name(c.profile.primary_axis)},
                  {"high_similarity", c.profile.high_similarity},
                  {"medium_similarity", c.profile.medium_similarity},
                  {"mode", visual_mode_name(c.profile.mode)}};
  j["njs"] = {{"epsilon_floor", c.njs.epsilon_floor},
              {"per_axis", c.njs.per_axis},
              {"tau_exponent", c.njs.tau_exponent},
              {"derivative_order", c.njs.derivative_order}};
  j["arm"] = {{"upper_arm_len", c.arm.upper_arm_len},
              {"forearm_len", c.arm.forearm_len},
              {"hinge_enabled", c.arm.hinge_enabled},
              {"elbow_min_deg", c.arm.elbow_min * kRadToDeg},
              {"elbow_max_deg", c.arm.elbow_max * kRadToDeg}};
  j["ik"] = {{"tolerance", c.ik.tolerance},
             {"min_step", c.ik.min_step},
             {"max_iterations", c.ik.max_iterations},
             {"lambda_init", c.ik.lambda_init},
             {"lambda_down", c.ik.lambda_down},
             {"lambda_up", c.ik.lambda_up},
             {"fd_step", c.ik.fd_step}};
  j["templates"] = c.templates;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["max_pairs_per_subject"] = c.max_pairs_per_subject;
  j["fs_hz"] = c.fs_hz ? json(*c.fs_hz) : json(nullptr);
  j["svg"] = c.svg;
  return j;
}

// Overlays `in` on `base`, insisting every key already exists in `base`
// with a compatible type. A null default accepts a number.
void merge_strict(json& base, const json& in, const std::string& path, const std::string& source) {
  if (!in.is_object()) throw ConfigError(fmt::format("{}: '{}' must be an object", source, path));
  for (const auto& [key, value] : in.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", source, where));
    json& slot = base[key];
    bool ok = false;
    if (slot.is_object()) {
      merge_strict(slot, value, where, source);
      continue;
    }
    if (slot.is_null()) ok = value.is_null() || value.is_number();
    else if (slot.is_boolean()) ok = value.is_boolean();
    else if (slot.is_string()) ok = value.is_string();
    else if (slot.is_number_unsigned()) ok = value.is_number_unsigned();
    else if (slot.is_number_integer()) ok = value.is_number_integer();
    else if (slot.is_number()) ok = value.is_number();
    if (!ok) {
      throw ConfigError(fmt::format("{}: '{}' has type {}, expected {}", source, where, value.type_name(),
                                    slot.is_null() ? "number or null" : slot.type_name()));
    }
    slot = value;
  }
}

PipelineConfig from_doc(const json& j) {
  PipelineConfig c;
  const auto& f = j.at("filter");
  c.filter.cutoff_hz = f.at("cutoff_hz").get<double>();
  c.filter.order = f.at("order").get<int>();
  c.filter.ma_window = f.at("ma_window").get<int>();
  c.filter.zero_phase = f.at("zero_phase").get<bool>();
  c.preprocess = j.at("preprocess").get<bool>();
  c.segmentation.n_seg = j.at("segmentation").at("n_seg").get<std::size_t>();
  c.segmentation.smooth_window = j.at("segmentation").at("smooth_window").get<int>();
  c.method = parse_method(j.at("attribution").at("method").get<std::string>());
  c.ig_steps = j.at("attribution").at("ig_steps").get<int>();
  const auto& r = j.at("refinement");
  c.refinement.top_t = r.at("top_t").get<double>();
  c.refinement.amplify = r.at("amplify").get<double>();
  c.refinement.smooth_window = r.at("smooth_window").get<int>();
  c.refinement.attenuate = r.at("attenuate").get<double>();
  c.refinement.rom_prior = r.at("rom_prior").get<bool>();
  const auto& s = j.at("scorer");
  c.scorer.pool_bins = s.at("pool_bins").get<int>();
  c.scorer.hidden = s.at("hidden").get<int>();
  c.scorer.embed = s.at("embed").get<int>();
  c.scorer.nonlinearity = parse_nonlinearity(s.at("nonlinearity").get<std::string>());
  c.scorer.bias = s.at("bias").get<bool>();
  c.scorer.seed = s.at("seed").get<std::uint64_t>();
  c.scorer_weights = s.at("weights").get<std::string>();
  const auto& m = j.at("metrics");
  c.metrics.bins = m.at("bins").get<int>();
  c.metrics.k = m.at("k").get<int>();
  c.metrics.spearman_factor6 = m.at("spearman_factor6").get<bool>();
  c.metrics.control_window = m.at("control_window").get<std::size_t>();
  c.metrics.occlusion = parse_occlusion_baseline(m.at("occlusion_baseline").get<std::string>());
  const auto& p = j.at("profile");
  c.profile.exercise = parse_exercise(p.at("exercise").get<std::string>());
  c.profile.primary_axis = parse_euler_axis(p.at("primary_axis").get<std::string>());
  c.profile.high_similarity = p.at("high_similarity").get<double>();
  c.profile.medium_similarity = p.at("medium_similarity").get<double>();
  c.profile.mode = parse_visual_mode(p.at("mode").get<std::string>());
  const auto& n = j.at("njs");
  c.njs.epsilon_floor = n.at("epsilon_floor").get<double>();
  c.njs.per_axis = n.at("per_axis").get<bool>();
  c.njs.tau_exponent = n.at("tau_exponent").get<double>();
  c.njs.derivative_order = n.at("derivative_order").get<int>();
  const auto& a = j.at("arm");
  c.arm.upper_arm_len = a.at("upper_arm_len").get<double>();
  c.arm.forearm_len = a.at("forearm_len").get<double>();
  c.arm.hinge_enabled = a.at("hinge_enabled").get<bool>();
  c.arm.elbow_min = a.at("elbow_min_deg").get<double>() / kRadToDeg;
  c.arm.elbow_max = a.at("elbow_max_deg").get<double>() / kRadToDeg;
  const auto& k = j.at("ik");
  c.ik.tolerance = k.at("tolerance").get<double>();
  c.ik.min_step = k.at("min_step").get<double>();
  c.ik.max_iterations = k.at("max_iterations").get<int>();
  c.ik.lambda_init = k.at("lambda_init").get<double>();
  c.ik.lambda_down = k.at("lambda_down").get<double>();
  c.ik.lambda_up = k.at("lambda_up").get<double>();
  c.ik.fd_step = k.at("fd_step").get<double>();
  c.templates = j.at("templates").get<std::string>();
  c.output_dir = j.at("output_dir").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.jobs = j.at("jobs").get<std::size_t>();
  c.max_pairs_per_subject = j.at("max_pairs_per_subject").get<std::size_t>();
  if (!j.at("fs_hz").is_null()) c.fs_hz = j.at("fs_hz").get<double>();
  c.svg = j.at("svg").get<bool>();
  return c;
}

double mean_over(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += v[i];
  return sum / static_cast<double>(end - begin);
}

const std::vector<double>& angle_of(const EulerSeries& e, EulerAxis axis) {
  switch (axis) {
    case EulerAxis::Roll:
      return e.roll;
    case EulerAxis::Yaw:
      return e.yaw;
    case EulerAxis::Pitch:
      break;
  }
  return e.pitch;
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(filter.cutoff_hz > 0.0, "filter.cutoff_hz must be positive");
  require(filter.order >= 1 && filter.order <= 16, "filter.order must lie in [1, 16]");
  require(filter.ma_window >= 1 && filter.ma_window % 2 == 1, "filter.ma_window must be odd and >= 1");
  require(segmentation.n_seg >= 1, "segmentation.n_seg must be >= 1");
  require(segmentation.smooth_window >= 1 && segmentation.smooth_window % 2 == 1,
          "segmentation.smooth_window must be odd and >= 1");
  require(ig_steps >= 1, "attribution.ig_steps must be >= 1");
  refinement.validate();
  require(scorer.pool_bins >= 1 && scorer.hidden >= 1 && scorer.embed >= 1, "scorer sizes must be >= 1");
  require(metrics.bins >= 2, "metrics.bins must be >= 2");
  require(metrics.k >= 1, "metrics.k must be >= 1");
  require(metrics.control_window >= 1, "metrics.control_window must be >= 1");
  require(profile.medium_similarity <= profile.high_similarity, "profile.medium_similarity exceeds high_similarity");
  require(njs.epsilon_floor > 0.0, "njs.epsilon_floor must be positive");
  require(njs.derivative_order >= 1 && njs.derivative_order <= 2, "njs.derivative_order must be 1 or 2");
  arm.validate();
  require(ik.tolerance > 0.0 && ik.max_iterations >= 1 && ik.fd_step > 0.0, "ik settings must be positive");
  require(ik.lambda_init > 0.0 && ik.lambda_down > 0.0 && ik.lambda_down < 1.0 && ik.lambda_up > 1.0,
          "ik damping needs lambda_init > 0, 0 < lambda_down < 1 < lambda_up");
  require(!output_dir.empty(), "output_dir must not be empty");
  require(jobs >= 1, "jobs must be >= 1");
  require(max_pairs_per_subject >= 1, "max_pairs_per_subject must be >= 1");
  require(!fs_hz || *fs_hz > 0.0, "fs_hz must be positive");
}

std::string config_to_json(const PipelineConfig& cfg) { return to_doc(cfg).dump(2) + "\n"; }

PipelineConfig config_from_json(const std::string& text, const std::string& source) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", source, e.what()));
  }
  json doc = to_doc(PipelineConfig{});
  merge_strict(doc, in, "", source);
  PipelineConfig cfg;
  try {
    cfg = from_doc(doc);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str(), path.string());
}

std::unique_ptr<ComparativeScorer> make_scorer(const PipelineConfig& cfg) {
  if (!cfg.scorer_weights.empty()) return std::make_unique<SurrogateScorer>(SurrogateScorer::load(cfg.scorer_weights));
  return std::make_unique<SurrogateScorer>(cfg.scorer);
}

TemplateSet make_templates(const PipelineConfig& cfg) {
  if (!cfg.templates.empty()) return TemplateSet::load(cfg.templates);
  return TemplateSet::defaults(cfg.profile.high_similarity, cfg.profile.medium_similarity);
}

EvaluationConfig evaluation_config(const PipelineConfig& cfg) {
  EvaluationConfig e;
  e.filter = cfg.filter;
  e.preprocess = cfg.preprocess;
  e.segmentation = cfg.segmentation;
  e.refinement = cfg.refinement;
  e.metrics = cfg.metrics;
  e.ig_steps = cfg.ig_steps;
  e.seed = cfg.seed;
  e.jobs = cfg.jobs;
  return e;
}

EulerSeries arm_euler_from_sensor(const EulerSeries& sensor, Exercise exercise) {
  EulerSeries arm;
  arm.fs_hz = sensor.fs_hz;
  const std::size_t n = sensor.size();
  arm.roll.assign(n, 0.0);
  arm.pitch.assign(n, 0.0);
  arm.yaw.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double elevation = 90.0 - sensor.pitch[i];
    (exercise == Exercise::ShoulderAbduction ? arm.roll : arm.pitch)[i] = elevation;
  }
  return arm;
}

Analysis analyze_pair(const MotionSeries& signal_in, const MotionSeries& anchor_in, const ComparativeScorer& scorer,
                      const TemplateSet& templates, const PipelineConfig& cfg) {
  cfg.validate();
  MotionSeries signal = cfg.preprocess ? primitive_removal(signal_in, cfg.filter) : signal_in;
  MotionSeries anchor = cfg.preprocess ? primitive_removal(anchor_in, cfg.filter) : anchor_in;

  AnalysisReport report;
  report.method = cfg.method;
  report.primary_axis = cfg.profile.primary_axis;
  report.similarity = scorer.score(signal, anchor);
  report.segments = micro_segmentation(signal, anchor, cfg.segmentation);
  report.dtw_cost = dtw_dist_path_multi(signal, anchor).total_cost;
  const SegmentAlignment& seg = report.segments;

  std::optional<MotionSeries> signal_baseline, anchor_baseline;
  if (cfg.method == AttributionMethod::IntegratedGradients) {
    signal_baseline = sample_baseline(anchor, signal.length(), derive_seed(cfg.seed, 0, 1));
    anchor_baseline = sample_baseline(anchor, anchor.length(), derive_seed(cfg.seed, 0, 2));
  }
  auto [signal_raw, anchor_raw] =
      normalize_joint(attribute(cfg.method, scorer, signal, anchor, signal_baseline, cfg.ig_steps),
                      attribute(cfg.method, scorer, anchor, signal, anchor_baseline, cfg.ig_steps));
  report.critical_segments =
      extract_top_segments(signal_raw, seg, cfg.refinement.top_t, Side::Signal, cfg.refinement.rom_prior);
  AttributionMap signal_refined =
      refine_attribution(signal_raw, report.critical_segments, seg, cfg.refinement, Side::Signal);
  AttributionMap anchor_refined =
      refine_attribution(anchor_raw, report.critical_segments, seg, cfg.refinement, Side::Anchor);

  EulerSeries signal_euler = euler_from_imu(signal);
  EulerSeries anchor_euler = euler_from_imu(anchor);
  const EulerAxis axis = cfg.profile.primary_axis;
  report.rom_signal_deg = range_of_motion(signal_euler, axis);
  report.rom_anchor_deg = range_of_motion(anchor_euler, axis);
  report.rom_signed_deg = report.rom_signal_deg - report.rom_anchor_deg;
  report.rom_diff_deg = std::abs(report.rom_signed_deg);

  // Segment whose mean primary angle departs most from the anchor's.
  {
    const auto sb = seg.bounds(Side::Signal);
    const auto ab = seg.bounds(Side::Anchor);
    const auto& sa = angle_of(signal_euler, axis);
    const auto& aa = angle_of(anchor_euler, axis);
    double worst = -1.0;
    for (std::size_t k = 0; k < seg.count(); ++k) {
      if (sb[k].second <= sb[k].first || ab[k].second <= ab[k].first) continue;
      const double gap = std::abs(mean_over(sa, sb[k].first, sb[k].second) - mean_over(aa, ab[k].first, ab[k].second));
      if (gap > worst) {
        worst = gap;
        report.worst_segment = static_cast<int>(k) + 1;
      }
    }
  }

  report.njs_signal = stability_profile(signal, seg, Side::Signal, cfg.njs);
  report.njs_anchor = stability_profile(anchor, seg, Side::Anchor, cfg.njs);
  {
    bool any = false;
    for (std::size_t k = 0; k < seg.count(); ++k) {
      if (!report.njs_signal[k] || !report.njs_anchor[k]) continue;
      const double delta = *report.njs_signal[k] - *report.njs_anchor[k];
      if (!any || delta < report.njs_delta_min) {
        report.njs_delta_min = delta;
        report.stability_segment = static_cast<int>(k) + 1;
        any = true;
      }
    }
  }
  report.feedback = generate_text(report, templates);

  const auto pose = [&](const EulerSeries& e) {
    const auto targets = wrist_targets_from_euler(arm_euler_from_sensor(e, cfg.profile.exercise), cfg.arm);
    return trajectory_from_wrist(cfg.arm, targets, e.fs_hz, cfg.ik);
  };
  std::vector<AvatarFrame> signal_frames = pose(signal_euler);
  std::vector<AvatarFrame> anchor_frames = pose(anchor_euler);
  mark_frames(signal_frames, seg, report.critical_segments, cfg.profile.mode, Side::Signal);
  mark_frames(anchor_frames, seg, report.critical_segments, cfg.profile.mode, Side::Anchor);

  return Analysis{std::move(report),        std::move(signal),         std::move(anchor),
                  std::move(signal_raw),    std::move(anchor_raw),     std::move(signal_refined),
                  std::move(anchor_refined), std::move(signal_euler),  std::move(anchor_euler),
                  std::move(signal_frames), std::move(anchor_frames)};
}

std::string report_to_json(const AnalysisReport& r) {
  auto njs_list = [](const std::vector<std::optional<double>>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
    return out;
  };
  json segments = json::array();
  const auto sb = r.segments.bounds(Side::Signal);
  const auto ab = r.segments.bounds(Side::Anchor);
  for (std::size_t k = 0; k < r.segments.count(); ++k) {
    segments.push_back({{"id", k},
                        {"signal", {sb[k].first, sb[k].second}},
                        {"anchor", {ab[k].first, ab[k].second}},
                        {"njs_signal", r.njs_signal.size() > k && r.njs_signal[k] ? json(*r.njs_signal[k]) : json()},
                        {"njs_anchor", r.njs_anchor.size() > k && r.njs_anchor[k] ? json(*r.njs_anchor[k]) : json()}});
  }
  json j;
  j["similarity"] = r.similarity;
  j["method"] = method_name(r.method);
  j["primary_axis"] = euler_axis_name(r.primary_axis);
  j["rom_signal_deg"] = r.rom_signal_deg;
  j["rom_anchor_deg"] = r.rom_anchor_deg;
  j["rom_diff_deg"] = r.rom_diff_deg;
  j["rom_signed_deg"] = r.rom_signed_deg;
  j["worst_segment"] = r.worst_segment;
  j["njs_signal"] = njs_list(r.njs_signal);
  j["njs_anchor"] = njs_list(r.njs_anchor);
  j["njs_delta_min"] = r.njs_delta_min;
  j["stability_segment"] = r.stability_segment;
  j["dtw_cost"] = r.dtw_cost;
  j["segments"] = segments;
  j["critical_segments"] = r.critical_segments;
  j["feedback"] = r.feedback;
  return j.dump(2) + "\n";
}

void write_analysis(const Analysis& a, const PipelineConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  open_output(dir / "report.json") << report_to_json(a.report);
  write_attribution_csv(a.signal_raw, dir / "attribution_signal.csv");
  write_attribution_csv(a.anchor_raw, dir / "attribution_anchor.csv");
  write_attribution_csv(a.signal_refined, dir / "attribution_signal_refined.csv");
  write_attribution_csv(a.anchor_refined, dir / "attribution_anchor_refined.csv");
  write_euler_csv(a.signal_euler, dir / "euler_signal.csv");
  write_euler_csv(a.anchor_euler, dir / "euler_anchor.csv");
  export_frames(a.signal_frames, a.anchor_frames, a.report.segments, a.report.critical_segments, cfg.profile.mode,
                dir / "frames.jsonl");
  {
    auto out = open_output(dir / "feedback.txt");
    for (const auto& line : a.report.feedback) out << line << '\n';
  }
  if (cfg.svg && !a.signal_frames.empty()) {
    // Frame of peak elevation, i.e. the lowest sensor pitch.
    const auto& pitch = a.signal_euler.pitch;
    const auto peak = static_cast<std::size_t>(std::min_element(pitch.begin(), pitch.end()) - pitch.begin());
    write_frame_svg(a.signal_frames[std::min(peak, a.signal_frames.size() - 1)], cfg.arm, dir / "frame.svg");
  }
}

std::vector<PairInput> load_corpus_pairs(const std::filesystem::path& dir, std::size_t max_pairs_per_subject,
                                         std::uint64_t seed, std::optional<double> fs_hz) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("corpus directory '" + dir.string() + "' does not exist");

  auto csv_files = [](const fs::path& d) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(d)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  std::vector<fs::path> subjects;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subjects.push_back(entry.path());
  }
  std::sort(subjects.begin(), subjects.end());
  if (subjects.empty()) subjects.push_back(dir);

  std::vector<PairInput> pairs;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const auto files = csv_files(subjects[s]);
    if (files.size() < 2) continue;
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < files.size(); ++i)
      for (std::size_t j = i + 1; j < files.size(); ++j) candidates.emplace_back(i, j);
    if (candidates.size() > max_pairs_per_subject) {
      std::mt19937_64 rng(derive_seed(seed, s, 7));
      std::shuffle(candidates.begin(), candidates.end(), rng);
      candidates.resize(max_pairs_per_subject);
      std::sort(candidates.begin(), candidates.end());
    }
    std::map<std::size_t, MotionSeries> cache;
    auto series = [&](std::size_t i) -> const MotionSeries& {
      auto it = cache.find(i);
      if (it == cache.end()) it = cache.emplace(i, read_motion_csv(files[i], fs_hz)).first;
      return it->second;
    };
    const std::string subject = subjects[s] == dir ? std::string(".") : subjects[s].filename().string();
    for (const auto& [i, j] : candidates) {
      pairs.push_back(PairInput{series(j), series(i),
                                subject + "/" + files[i].stem().string() + "~" + files[j].stem().string()});
    }
  }
  if (pairs.empty()) throw DataError("corpus '" + dir.string() + "' has no subject with two or more repetitions");
  return pairs;
}

void CorpusSpec::validate() const {
  if (exercises.empty()) throw ConfigError("at least one exercise is required");
  if (rom_levels.empty()) throw ConfigError("at least one ROM level is required");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (subjects < 1) throw ConfigError("subjects must be >= 1");
  if (!(timing_spread >= 0.0 && timing_spread < 1.0)) throw ConfigError("timing_spread must lie in [0, 1)");
  ExerciseSpec probe;
  probe.duration_s = duration_s * (1.0 - timing_spread);
  probe.jitter_std = jitter_std;
  probe.fs_hz = fs_hz;
  for (double rom : rom_levels) {
    probe.rom_deg = rom;
    probe.validate();
  }
}

std::filesystem::path generate_corpus(const CorpusSpec& spec, const std::filesystem::path& dir) {
  spec.validate();
  json files = json::array();
  std::uint64_t index = 0;
  for (std::size_t s = 0; s < spec.subjects; ++s) {
    const std::string subject = fmt::format("subject{:02}", s + 1);
    for (Exercise ex : spec.exercises) {
      for (double rom : spec.rom_levels) {
        for (std::size_t rep = 0; rep < spec.repetitions; ++rep, ++index) {
          ExerciseSpec es;
          es.exercise = ex;
          es.rom_deg = rom;
          es.jitter_std = spec.jitter_std;
          es.fs_hz = spec.fs_hz;
          es.seed = derive_seed(spec.seed, index, 0);
          std::mt19937_64 rng(derive_seed(spec.seed, index, 1));
          const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
          es.duration_s = spec.duration_s * (1.0 + spec.timing_spread * u);
          MotionSeries series = generate(es);
          SeriesLabel label = series.label();
          label.subject = subject;
          label.repetition = static_cast<int>(rep + 1);
          series.set_label(label);

          const std::string name = fmt::format("{}_rom{:03}_rep{}.csv", exercise_name(ex),
                                               static_cast<long>(std::lround(rom)), rep + 1);
          const std::filesystem::path rel = std::filesystem::path(subject) / name;
          write_motion_csv(series, dir / rel);
          files.push_back({{"path", rel.generic_string()},
                           {"subject", subject},
                           {"exercise", exercise_name(ex)},
                           {"repetition", rep + 1},
                           {"rom_deg", rom},
                           {"jitter_std", spec.jitter_std},
                           {"duration_s", es.duration_s},
                           {"samples", series.length()},
                           {"fs_hz", spec.fs_hz},
                           {"seed", es.seed}});
        }
      }
    }
  }
  json manifest = {{"seed", spec.seed}, {"files", files}};
  const auto path = dir / "manifest.json";
  open_output(path) << manifest.dump(2) << '\n';
  return path;
}

}  // namespace repx
