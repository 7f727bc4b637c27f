#include "repx/xai_metrics.hpp"

#include "repx/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>

namespace repx {
namespace {

constexpr double kContinuityEps = 1e-9;
constexpr Variant kVariants[] = {Variant::Raw, Variant::Modified, Variant::Randomized};

std::span<const double> flat(const Samples& s) { return {s.data(), static_cast<std::size_t>(s.size())}; }

std::vector<int> bin_indices(std::span<const double> v, int bins) {
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  std::vector<int> idx(v.size(), 0);
  if (span <= 0.0) return idx;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int b = static_cast<int>(std::floor((v[i] - lo) / span * bins));
    idx[i] = std::clamp(b, 0, bins - 1);
  }
  return idx;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Raw:
      return "raw";
    case Variant::Modified:
      return "modified";
    case Variant::Randomized:
      return "randomized";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t stream) {
  // splitmix64 over a combined key
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1) + 0xD1B54A32D192ED03ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

OcclusionImportance occlusion_importance(const ComparativeScorer& scorer, const MotionSeries& signal,
                                         const MotionSeries& anchor, std::span<const double> baseline_per_axis) {
  if (baseline_per_axis.size() != signal.axes()) {
    throw DataError("occlusion baseline needs one value per axis");
  }
  const double reference = scorer.score(signal, anchor);
  Samples work = signal.samples();
  OcclusionImportance out;
  out.e.reserve(static_cast<std::size_t>(work.size()));
  for (Eigen::Index r = 0; r < work.rows(); ++r) {
    for (Eigen::Index c = 0; c < work.cols(); ++c) {
      const double saved = work(r, c);
      work(r, c) = baseline_per_axis[static_cast<std::size_t>(c)];
      out.e.push_back(std::abs(reference - scorer.score(signal.with_samples(work), anchor)));
      work(r, c) = saved;
    }
  }
  return out;
}

OcclusionImportance occlusion_importance(const ComparativeScorer& scorer, const MotionSeries& signal,
                                         const MotionSeries& anchor, double baseline_value) {
  const std::vector<double> per_axis(signal.axes(), baseline_value);
  return occlusion_importance(scorer, signal, anchor, per_axis);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = rank;
    i = j + 1;
  }
  return ranks;
}

double monotonicity(std::span<const double> attribution, std::span<const double> importance, bool factor6) {
  const std::size_t n = attribution.size();
  if (n != importance.size()) throw DataError("monotonicity: attribution and importance lengths differ");
  if (n < 2) throw DataError("monotonicity needs at least 2 features");

  std::vector<double> magnitude(n);
  std::transform(attribution.begin(), attribution.end(), magnitude.begin(), [](double v) { return std::abs(v); });
  const auto ra = average_ranks(magnitude);
  const auto re = average_ranks(importance);

  auto has_ties = [](std::vector<double> r) {
    std::sort(r.begin(), r.end());
    return std::adjacent_find(r.begin(), r.end()) != r.end();
  };

  if (!has_ties(ra) && !has_ties(re)) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (ra[i] - re[i]) * (ra[i] - re[i]);
    const double dn = static_cast<double>(n);
    const double rho = 1.0 - (factor6 ? 6.0 : 1.0) * d2 / (dn * (dn * dn - 1.0));
    return std::clamp(rho, -1.0, 1.0);
  }

  const double mean_rank = (static_cast<double>(n) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = ra[i] - mean_rank;
    const double dy = re[i] - mean_rank;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double monotonicity(const AttributionMap& map, const OcclusionImportance& e, bool factor6) {
  return monotonicity(flat(map.values), e.e, factor6);
}

double histogram_entropy(std::span<const double> values, int bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  if (values.empty()) return 0.0;
  const auto idx = bin_indices(values, bins);
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (int b : idx) ++counts[static_cast<std::size_t>(b)];
  const double n = static_cast<double>(values.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(std::span<const double> x, std::span<const double> y, int bins) {
  if (x.size() != y.size()) throw DataError("mutual information: sample counts differ");
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  if (x.empty()) return 0.0;
  const auto bx = bin_indices(x, bins);
  const auto by = bin_indices(y, bins);
  const auto nb = static_cast<std::size_t>(bins);
  std::vector<std::size_t> cx(nb, 0), cy(nb, 0);
  std::unordered_map<std::size_t, std::size_t> joint;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++cx[static_cast<std::size_t>(bx[i])];
    ++cy[static_cast<std::size_t>(by[i])];
    ++joint[static_cast<std::size_t>(bx[i]) * nb + static_cast<std::size_t>(by[i])];
  }
  // Sum in a fixed cell order so the result does not depend on hash layout.
  std::vector<std::pair<std::size_t, std::size_t>> cells(joint.begin(), joint.end());
  std::sort(cells.begin(), cells.end());
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [key, count] : cells) {
    const double c = static_cast<double>(count);
    mi += c / n * std::log(c * n / (static_cast<double>(cx[key / nb]) * static_cast<double>(cy[key % nb])));
  }
  return std::max(0.0, mi);
}

double fmi(const Samples& x, const AttributionMap& map, int bins) {
  if (x.rows() != map.values.rows() || x.cols() != map.values.cols()) {
    throw DataError("fmi: series and attribution shapes differ");
  }
  return mutual_information(flat(x), flat(map.values), bins);
}

double continuity(const Samples& x, const AttributionMap& map, int k) {
  if (x.rows() != map.values.rows() || x.cols() != map.values.cols()) {
    throw DataError("continuity: series and attribution shapes differ");
  }
  if (x.rows() <= 1) throw DataError("continuity needs more than one timestep");
  if (k < 1) throw ConfigError("continuity neighbourhood k must be >= 1");
  double worst = 0.0;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    for (Eigen::Index u = t + 1; u <= std::min<Eigen::Index>(x.rows() - 1, t + k); ++u) {
      const double num = (map.values.row(t) - map.values.row(u)).cwiseAbs().sum();
      const double den = std::max((x.row(t) - x.row(u)).norm(), kContinuityEps);
      worst = std::max(worst, num / den);
    }
  }
  return worst;
}

AttributionMap randomized_control(const AttributionMap& map, const SegmentAlignment& seg,
                                  const std::vector<std::size_t>& critical, const RefinementConfig& cfg,
                                  std::uint64_t seed, std::size_t window, std::vector<std::size_t>* chosen_starts) {
  const std::size_t n = static_cast<std::size_t>(map.values.rows());
  if (window < 1) throw ConfigError("control window must be >= 1");
  const std::vector<bool> blocked = segment_mask(seg, critical, Side::Signal);
  if (blocked.size() != n) throw DataError("randomized_control: map length does not match the alignment");

  auto free_starts = [&](const std::vector<bool>& taken) {
    std::vector<std::size_t> starts;
    if (window > n) return starts;
    // Sliding count of unavailable rows in [s, s + window).
    std::size_t busy = 0;
    for (std::size_t t = 0; t < window; ++t) busy += taken[t] ? 1 : 0;
    for (std::size_t s = 0;; ++s) {
      if (busy == 0) starts.push_back(s);
      if (s + window >= n) break;
      busy += taken[s + window] ? 1 : 0;
      busy -= taken[s] ? 1 : 0;
    }
    return starts;
  };

  std::mt19937_64 rng(seed);
  std::vector<bool> mask(n, false);
  std::vector<bool> taken = blocked;
  std::vector<std::size_t> picked;
  for (std::size_t w = 0; w < critical.size(); ++w) {
    auto starts = free_starts(taken);
    if (starts.empty()) starts = free_starts(blocked);  // allow overlap between control windows
    if (starts.empty()) {
      throw ExperimentError("no window of " + std::to_string(window) + " timesteps avoids the critical segments");
    }
    std::uniform_int_distribution<std::size_t> pick(0, starts.size() - 1);
    const std::size_t s = starts[pick(rng)];
    picked.push_back(s);
    for (std::size_t t = s; t < s + window; ++t) mask[t] = taken[t] = true;
  }
  if (chosen_starts) *chosen_starts = picked;
  return refine_with_mask(map, mask, cfg);
}

const AggregateRow& CorpusEvaluation::row(AttributionMethod m, Variant v) const {
  for (const auto& r : table)
    if (r.method == m && r.variant == v) return r;
  throw DataError("no aggregate row for " + std::string(method_name(m)) + "/" + std::string(variant_name(v)));
}

namespace {

std::optional<std::pair<MetricReport, MetricReport>> raw_and_modified(const PairResult& p, AttributionMethod m) {
  std::optional<MetricReport> raw, mod;
  for (const auto& r : p.reports) {
    if (r.method != m) continue;
    if (r.variant == Variant::Raw) raw = r;
    if (r.variant == Variant::Modified) mod = r;
  }
  if (!raw || !mod) return std::nullopt;
  return std::make_pair(*raw, *mod);
}

template <typename Pred>
double win_rate(const std::vector<PairResult>& pairs, AttributionMethod m, Pred pred) {
  std::size_t wins = 0, total = 0;
  for (const auto& p : pairs) {
    if (auto rm = raw_and_modified(p, m)) {
      ++total;
      if (pred(rm->first, rm->second)) ++wins;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(total);
}

}  // namespace

double CorpusEvaluation::fmi_win_rate(AttributionMethod m) const {
  return win_rate(pairs, m, [](const MetricReport& raw, const MetricReport& mod) { return mod.fmi > raw.fmi; });
}

double CorpusEvaluation::control_fmi_loss_rate(AttributionMethod m) const {
  std::size_t total = 0, wins = 0;
  for (const auto& p : pairs) {
    std::optional<double> mod, rnd;
    for (const auto& r : p.reports) {
      if (r.method != m) continue;
      if (r.variant == Variant::Modified) mod = r.fmi;
      if (r.variant == Variant::Randomized) rnd = r.fmi;
    }
    if (!mod || !rnd) continue;
    ++total;
    if (*rnd < *mod) ++wins;
  }
  return total == 0 ? 0.0 : static_cast<double>(wins) / static_cast<double>(total);
}

double CorpusEvaluation::continuity_win_rate(AttributionMethod m) const {
  return win_rate(pairs, m,
                  [](const MetricReport& raw, const MetricReport& mod) { return mod.continuity < raw.continuity; });
}

std::string_view occlusion_baseline_name(OcclusionBaseline b) {
  return b == OcclusionBaseline::AnchorMean ? "anchor_mean" : "zero";
}

OcclusionBaseline parse_occlusion_baseline(std::string_view name) {
  if (name == "anchor_mean") return OcclusionBaseline::AnchorMean;
  if (name == "zero") return OcclusionBaseline::Zero;
  throw ConfigError("unknown occlusion baseline '" + std::string(name) + "' (expected anchor_mean or zero)");
}

PairResult evaluate_pair(const PairInput& pair, std::size_t index, const ComparativeScorer& scorer,
                         const std::vector<AttributionMethod>& methods, const EvaluationConfig& cfg) {
  const MotionSeries signal = cfg.preprocess ? primitive_removal(pair.signal, cfg.filter) : pair.signal;
  const MotionSeries anchor = cfg.preprocess ? primitive_removal(pair.anchor, cfg.filter) : pair.anchor;
  const SegmentAlignment seg = micro_segmentation(signal, anchor, cfg.segmentation);

  std::vector<double> occlusion_value(signal.axes(), 0.0);
  if (cfg.metrics.occlusion == OcclusionBaseline::AnchorMean) {
    const Eigen::RowVectorXd anchor_mean = anchor.samples().colwise().mean();
    occlusion_value.assign(anchor_mean.data(), anchor_mean.data() + anchor_mean.size());
  }
  const OcclusionImportance e = occlusion_importance(scorer, signal, anchor, occlusion_value);

  PairResult result;
  result.index = index;
  result.id = pair.id;
  for (AttributionMethod method : methods) {
    std::optional<MotionSeries> signal_baseline, anchor_baseline;
    if (method == AttributionMethod::IntegratedGradients) {
      signal_baseline = sample_baseline(anchor, signal.length(), derive_seed(cfg.seed, index, 1));
      anchor_baseline = sample_baseline(anchor, anchor.length(), derive_seed(cfg.seed, index, 2));
    }
    const AttributionMap signal_map = attribute(method, scorer, signal, anchor, signal_baseline, cfg.ig_steps);
    const AttributionMap anchor_map = attribute(method, scorer, anchor, signal, anchor_baseline, cfg.ig_steps);
    const AttributionMap raw = normalize_joint(signal_map, anchor_map).first;

    const auto critical =
        extract_top_segments(raw, seg, cfg.refinement.top_t, Side::Signal, cfg.refinement.rom_prior);
    const AttributionMap modified = refine_attribution(raw, critical, seg, cfg.refinement);
    std::optional<AttributionMap> randomized;
    try {
      randomized = randomized_control(raw, seg, critical, cfg.refinement, derive_seed(cfg.seed, index, 3),
                                      cfg.metrics.control_window);
    } catch (const ExperimentError& ex) {
      result.control_skipped[method] = ex.what();
    }
    result.critical[method] = critical;

    const AttributionMap* maps[] = {&raw, &modified, randomized ? &*randomized : nullptr};
    for (std::size_t v = 0; v < 3; ++v) {
      if (maps[v] == nullptr) continue;
      MetricReport report;
      report.method = method;
      report.variant = kVariants[v];
      report.monotonicity = monotonicity(*maps[v], e, cfg.metrics.spearman_factor6);
      report.fmi = fmi(signal.samples(), *maps[v], cfg.metrics.bins);
      report.continuity = continuity(signal.samples(), *maps[v], cfg.metrics.k);
      result.reports.push_back(report);
    }
  }
  return result;
}

CorpusEvaluation evaluate_corpus(const std::vector<PairInput>& pairs, const ComparativeScorer& scorer,
                                 const std::vector<AttributionMethod>& methods, const EvaluationConfig& cfg) {
  if (pairs.empty()) throw DataError("evaluate_corpus: empty corpus");
  if (methods.empty()) throw ConfigError("evaluate_corpus: no attribution methods selected");

  std::vector<std::optional<PairResult>> slots(pairs.size());
  std::vector<std::string> errors(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        slots[i] = evaluate_pair(pairs[i], i, scorer, methods, cfg);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(cfg.jobs, 1, pairs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  CorpusEvaluation out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (slots[i]) {
      out.controls_skipped += slots[i]->control_skipped.size();
      out.pairs.push_back(std::move(*slots[i]));
    } else {
      out.failures.push_back({i, pairs[i].id, errors[i]});
    }
  }
  for (AttributionMethod m : methods) {
    for (Variant v : kVariants) {
      std::vector<double> mono, mi, cont;
      for (const auto& p : out.pairs) {
        for (const auto& r : p.reports) {
          if (r.method == m && r.variant == v) {
            mono.push_back(r.monotonicity);
            mi.push_back(r.fmi);
            cont.push_back(r.continuity);
          }
        }
      }
      out.table.push_back({m, v, mean_of(mono), mean_of(mi), mean_of(cont), mono.size()});
    }
  }
  return out;
}

void write_table_csv(const CorpusEvaluation& eval, std::ostream& out) {
  out << "method,metric,raw,modified,randomized,pairs,randomized_pairs\n";
  std::vector<AttributionMethod> methods;
  for (const auto& r : eval.table)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  for (AttributionMethod m : methods) {
    const auto& raw = eval.row(m, Variant::Raw);
    const auto& mod = eval.row(m, Variant::Modified);
    const auto& rnd = eval.row(m, Variant::Randomized);
    const auto name = method_name(m);
    out << fmt::format("{},monotonicity,{:.6f},{:.6f},{:.6f},{},{}\n", name, raw.monotonicity, mod.monotonicity,
                       rnd.monotonicity, raw.pairs, rnd.pairs);
    out << fmt::format("{},fmi,{:.6f},{:.6f},{:.6f},{},{}\n", name, raw.fmi * kFmiReportScale,
                       mod.fmi * kFmiReportScale, rnd.fmi * kFmiReportScale, raw.pairs, rnd.pairs);
    out << fmt::format("{},continuity,{:.6f},{:.6f},{:.6f},{},{}\n", name, raw.continuity, mod.continuity,
                       rnd.continuity, raw.pairs, rnd.pairs);
  }
}

void write_table_text(const CorpusEvaluation& eval, std::ostream& out) {
  out << fmt::format("{:<10} {:<14} {:>14} {:>14} {:>14}\n", "method", "metric", "raw", "modified", "randomized");
  out << std::string(70, '-') << '\n';
  std::vector<AttributionMethod> methods;
  for (const auto& r : eval.table)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  for (AttributionMethod m : methods) {
    const auto& raw = eval.row(m, Variant::Raw);
    const auto& mod = eval.row(m, Variant::Modified);
    const auto& rnd = eval.row(m, Variant::Randomized);
    const auto name = method_name(m);
    out << fmt::format("{:<10} {:<14} {:>14.3f} {:>14.3f} {:>14.3f}\n", name, "mono", raw.monotonicity,
                       mod.monotonicity, rnd.monotonicity);
    out << fmt::format("{:<10} {:<14} {:>14.3f} {:>14.3f} {:>14.3f}\n", "", "fmi (x1e4)", raw.fmi * kFmiReportScale,
                       mod.fmi * kFmiReportScale, rnd.fmi * kFmiReportScale);
    out << fmt::format("{:<10} {:<14} {:>14.3f} {:>14.3f} {:>14.3f}\n", "", "cont", raw.continuity,
                       mod.continuity, rnd.continuity);
  }
  out << fmt::format("pairs evaluated: {}, failed: {}, randomized controls skipped: {}\n", eval.pairs.size(),
                     eval.failures.size(), eval.controls_skipped);
  for (AttributionMethod m : methods) {
    out << fmt::format("{:<10} modified beats raw: fmi {:.0f}%, continuity {:.0f}% of pairs\n", method_name(m),
                       100.0 * eval.fmi_win_rate(m), 100.0 * eval.continuity_win_rate(m));
  }
}

void write_pairs_jsonl(const CorpusEvaluation& eval, std::ostream& out) {
  for (const auto& p : eval.pairs) {
    for (const auto& r : p.reports) {
      nlohmann::json j;
      j["pair"] = p.index;
      j["id"] = p.id;
      j["method"] = method_name(r.method);
      j["variant"] = variant_name(r.variant);
      j["monotonicity"] = r.monotonicity;
      j["fmi"] = r.fmi;
      j["continuity"] = r.continuity;
      j["critical"] = p.critical.at(r.method);
      out << j.dump() << '\n';
    }
    for (const auto& [m, reason] : p.control_skipped) {
      nlohmann::json j;
      j["pair"] = p.index;
      j["id"] = p.id;
      j["method"] = method_name(m);
      j["variant"] = variant_name(Variant::Randomized);
      j["skipped"] = reason;
      out << j.dump() << '\n';
    }
  }
}

}  // namespace repx
