// repx: compare exercise repetitions from 6-axis IMU recordings.
//
//   repx analyze SIGNAL.csv ANCHOR.csv [--config F] [--method ig] [--out DIR]
//   repx evaluate CORPUS_DIR [--config F] [--jobs N] [--out DIR]
//   repx generate [--rom 30,60,90,120,150] [--reps 3] [--out DIR]
//   repx print-config [--config F]
//
// Exit codes: 0 success, 1 internal error, 2 user or input error.

#include "repx/error.hpp"
#include "repx/io.hpp"
#include "repx/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  std::optional<double> fs;
};

repx::PipelineConfig resolve(const CommonOptions& o) {
  repx::PipelineConfig cfg = o.config.empty() ? repx::PipelineConfig{} : repx::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.method) cfg.method = repx::parse_method(*o.method);
  if (o.out) cfg.output_dir = *o.out;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.fs) cfg.fs_hz = *o.fs;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, CommonOptions& o, bool with_method, bool with_jobs) {
  app->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Seed for baselines, control windows and pair sampling");
  app->add_option("--out", o.out, "Output directory");
  if (with_method) {
    app->add_option("--method", o.method, "Attribution method")
        ->check(CLI::IsMember({"saliency", "ixg", "ig"}));
  }
  if (with_jobs) app->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

int run_analyze(const CommonOptions& o, const std::string& signal_path, const std::string& anchor_path, bool svg) {
  repx::PipelineConfig cfg = resolve(o);
  cfg.svg = cfg.svg || svg;
  const auto signal = repx::read_motion_csv(signal_path, cfg.fs_hz);
  const auto anchor = repx::read_motion_csv(anchor_path, cfg.fs_hz);
  const auto scorer = repx::make_scorer(cfg);
  const auto templates = repx::make_templates(cfg);
  const auto analysis = repx::analyze_pair(signal, anchor, *scorer, templates, cfg);
  repx::write_analysis(analysis, cfg, cfg.output_dir);

  const auto& r = analysis.report;
  fmt::print("similarity {:.4f}  rom signal {:.1f} deg, anchor {:.1f} deg, diff {:.1f} deg\n", r.similarity,
             r.rom_signal_deg, r.rom_anchor_deg, r.rom_diff_deg);
  for (const auto& line : r.feedback) fmt::print("{}\n", line);
  fmt::print("wrote {}\n", cfg.output_dir);
  return 0;
}

int run_evaluate(const CommonOptions& o, const std::string& corpus) {
  const repx::PipelineConfig cfg = resolve(o);
  const auto pairs = repx::load_corpus_pairs(corpus, cfg.max_pairs_per_subject, cfg.seed, cfg.fs_hz);
  const auto scorer = repx::make_scorer(cfg);
  std::vector<repx::AttributionMethod> methods = {repx::AttributionMethod::Saliency,
                                                  repx::AttributionMethod::InputXGradient,
                                                  repx::AttributionMethod::IntegratedGradients};
  if (o.method) methods = {cfg.method};
  const auto eval = repx::evaluate_corpus(pairs, *scorer, methods, repx::evaluation_config(cfg));

  const std::filesystem::path dir = cfg.output_dir;
  {
    auto out = repx::open_output(dir / "table.csv");
    repx::write_table_csv(eval, out);
  }
  {
    auto out = repx::open_output(dir / "table.txt");
    repx::write_table_text(eval, out);
  }
  {
    auto out = repx::open_output(dir / "pairs.jsonl");
    repx::write_pairs_jsonl(eval, out);
  }
  repx::write_table_text(eval, std::cout);
  for (const auto& f : eval.failures) fmt::print(stderr, "pair {} ({}) failed: {}\n", f.index, f.id, f.reason);
  if (eval.pairs.empty()) {
    fmt::print(stderr, "error: every pair failed\n");
    return kExitUser;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compare exercise repetitions from 6-axis IMU recordings"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-config", print_defaults, "Print the default configuration and exit");

  CommonOptions analyze_opts;
  std::string signal_path, anchor_path;
  bool svg = false;
  auto* analyze = app.add_subcommand("analyze", "Compare one signal repetition against an anchor");
  analyze->add_option("signal", signal_path, "Signal CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("anchor", anchor_path, "Anchor CSV")->required()->check(CLI::ExistingFile);
  add_common(analyze, analyze_opts, true, false);
  analyze->add_option("--fs", analyze_opts.fs, "Sampling rate override (Hz)")->check(CLI::PositiveNumber);
  analyze->add_flag("--svg", svg, "Also write a stick-figure SVG of the peak frame");

  CommonOptions evaluate_opts;
  std::string corpus;
  auto* evaluate = app.add_subcommand("evaluate", "Attribution quality over a corpus of repetitions");
  evaluate->add_option("corpus", corpus, "Corpus directory (one sub-directory per subject)")
      ->required()
      ->check(CLI::ExistingDirectory);
  add_common(evaluate, evaluate_opts, true, true);
  evaluate->add_option("--fs", evaluate_opts.fs, "Sampling rate override (Hz)")->check(CLI::PositiveNumber);

  repx::CorpusSpec spec;
  CommonOptions generate_opts;
  std::vector<std::string> exercises = {"shoulder_abduction"};
  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus with a ground-truth manifest");
  add_common(generate, generate_opts, false, false);
  generate->add_option("--exercise", exercises, "shoulder_abduction and/or forward_flexion")->delimiter(',');
  generate->add_option("--rom", spec.rom_levels, "Range-of-motion levels (deg)")->delimiter(',');
  generate->add_option("--reps", spec.repetitions, "Repetitions per level")->check(CLI::PositiveNumber);
  generate->add_option("--subjects", spec.subjects, "Number of subjects")->check(CLI::PositiveNumber);
  generate->add_option("--jitter", spec.jitter_std, "Gaussian noise std on every axis");
  generate->add_option("--duration", spec.duration_s, "Nominal repetition length (s)");
  generate->add_option("--timing-spread", spec.timing_spread, "Relative spread of repetition length");
  generate->add_option("--fs", spec.fs_hz, "Sampling rate (Hz)");

  CommonOptions print_opts;
  auto* print = app.add_subcommand("print-config", "Print the effective configuration as JSON");
  print->add_option("--config", print_opts.config, "JSON configuration file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUser;
  }

  try {
    if (print_defaults) {
      std::cout << repx::config_to_json(repx::PipelineConfig{});
      return 0;
    }
    if (*print) {
      std::cout << repx::config_to_json(resolve(print_opts));
      return 0;
    }
    if (*analyze) return run_analyze(analyze_opts, signal_path, anchor_path, svg);
    if (*evaluate) return run_evaluate(evaluate_opts, corpus);
    if (*generate) {
      const repx::PipelineConfig cfg = resolve(generate_opts);
      spec.exercises.clear();
      for (const auto& e : exercises) spec.exercises.push_back(repx::parse_exercise(e));
      spec.seed = cfg.seed;
      const auto manifest = repx::generate_corpus(spec, cfg.output_dir);
      fmt::print("wrote {}\n", manifest.string());
      return 0;
    }
    std::cout << app.help();
    return kExitUser;
  } catch (const repx::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitUser;
  } catch (const repx::DataError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitUser;
  } catch (const repx::IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kExitUser;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
}
