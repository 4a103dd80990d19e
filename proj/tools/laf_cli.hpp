#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "laf/laf.hpp"

#ifndef LAF_DEFAULT_DATA_DIR
#define LAF_DEFAULT_DATA_DIR "data"
#endif

namespace laf::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Input problem that maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::filesystem::path data_dir(const std::string& flag) {
  return flag.empty() ? std::filesystem::path(LAF_DEFAULT_DATA_DIR) : std::filesystem::path(flag);
}

inline std::filesystem::path corpus_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LAF_CORPUS_DIR"); env != nullptr && *env != '\0') return env;
  return std::filesystem::path(LAF_DEFAULT_DATA_DIR) / "proofs";
}

inline BinaryMask load_mask(const std::string& flag, const std::string& path, int threshold) {
  try {
    return read_mask_file(path, threshold);
  } catch (const std::exception& e) {
    throw InputError(fmt::format("{}: {}", flag, e.what()));
  }
}

inline std::string load_text(const std::string& flag, const std::string& path) {
  try {
    return read_text_file(path);
  } catch (const std::exception& e) {
    throw InputError(fmt::format("{}: {}", flag, e.what()));
  }
}

// Writes to `path`, or to `out` when no path was given.
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  try {
    write_text_file(path, text);
  } catch (const std::exception& e) {
    throw InputError(fmt::format("--out: {}", e.what()));
  }
}

inline std::string ranking_table(const std::vector<mpe::RankingRow>& rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.method.size());
  std::string out = fmt::format("{:<4} {:<{}} {:>8}  {}\n", "rank", "method", width, "value", "class");
  for (const auto& r : rows) {
    out += fmt::format("{:<4} {:<{}} {:>8.4f}  {}\n", r.rank, r.method, width, r.value,
                       mpe::to_string(r.confidence));
  }
  return out;
}

struct EvalArgs {
  std::string pred, target_hr, target_hp, format = "json", out;
  int threshold = kDefaultThreshold;
};

inline int run_eval(const EvalArgs& a, std::ostream& out) {
  if (a.threshold < 0 || a.threshold > 255) {
    throw InputError(fmt::format("--threshold: {} outside 0..255", a.threshold));
  }
  const auto pred = load_mask("--pred", a.pred, a.threshold);
  const auto hr = load_mask("--target-hr", a.target_hr, a.threshold);
  const auto hp = load_mask("--target-hp", a.target_hp, a.threshold);
  for (const auto& [flag, mask] : {std::pair{"--target-hr", &hr}, std::pair{"--target-hp", &hp}}) {
    if (mask->dimensions() != pred.dimensions()) {
      throw InputError(fmt::format("dimension mismatch: --pred is {} but {} is {}",
                                   to_string(pred.dimensions()), flag, to_string(mask->dimensions())));
    }
  }
  const InaccurateTargetSet targets{{hr, TargetRole::HighRecall}, {hp, TargetRole::HighPrecision}};
  const auto report = evaluate(pred, targets);
  emit(a.out, a.format == "tsv" ? to_tsv(report) : to_json(report) + "\n", out);
  return kOk;
}

struct RankArgs {
  std::string counts, metric, format = "tsv", out;
  double tau_small = mpe::kDefaultTauSmall;
  double tau_large = mpe::kDefaultTauLarge;
};

inline int run_rank(const RankArgs& a, std::ostream& out) {
  std::vector<MethodCounts> counts;
  try {
    counts = parse_counts_csv(load_text("--counts", a.counts));
  } catch (const CsvError& e) {
    throw InputError(fmt::format("--counts: {}", e.what()));
  }
  const auto rows = mpe::rank_with_confidence(to_records(counts), mpe::parse_metric(a.metric),
                                              a.tau_small, a.tau_large);
  std::string text;
  if (a.format == "json") {
    text = mpe::to_json(rows);
  } else if (a.format == "table") {
    text = ranking_table(rows);
  } else {
    text = mpe::to_tsv(rows);
  }
  emit(a.out, text, out);
  return kOk;
}

inline int run_verify(const std::string& corpus_flag, std::ostream& out) {
  const auto dir = corpus_dir(corpus_flag);
  proof::CorpusReport report;
  try {
    report = proof::verify_corpus(dir);
  } catch (const std::exception& e) {
    throw InputError(fmt::format("--corpus: {}", e.what()));
  }
  if (report.scripts.empty()) throw InputError(fmt::format("--corpus: no .proof files in {}", dir.string()));
  for (const auto& s : report.scripts) {
    out << fmt::format("{}\t{}\t{}\t{}\n", s.file, s.name, s.steps, s.verdict.describe());
  }
  out << fmt::format("{}/{} accepted\n", report.accepted(), report.scripts.size());
  return report.all_accepted() ? kOk : kCheckFailed;
}

struct SweepArgs {
  std::string config, out, metric;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> dilate_radius, erode_radius;
  unsigned threads = 1;
};

// Precedence: flags, then config file, then built-in defaults.
inline int run_sweep(const SweepArgs& a, std::ostream& out) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(load_text("--config", a.config));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("--config: {}", e.what()));
  }
  synth::SynthParams base;
  std::vector<synth::NoiseLevel> levels = synth::linear_noise_levels(21, 0.5);
  auto metric = mpe::LmpMetric::Lf1;
  try {
    base = synth::params_from_json(j, {"noise_levels", "metric"});
    if (j.contains("noise_levels")) {
      levels.clear();
      for (const auto& lv : j.at("noise_levels")) {
        if (!lv.is_array() || lv.size() != 2 || !lv[0].is_number() || !lv[1].is_number()) {
          throw std::invalid_argument("'noise_levels' entries must be [fp_rate, fn_rate] pairs");
        }
        levels.push_back({lv[0].get<double>(), lv[1].get<double>()});
      }
    }
    if (j.contains("metric")) {
      if (!j.at("metric").is_string()) throw std::invalid_argument("'metric' must be a string");
      metric = mpe::parse_metric(j.at("metric").get<std::string>());
    }
  } catch (const std::exception& e) {
    throw InputError(fmt::format("--config: {}", e.what()));
  }
  if (a.seed) base.seed = *a.seed;
  if (a.dilate_radius) base.dilate_radius = *a.dilate_radius;
  if (a.erode_radius) base.erode_radius = *a.erode_radius;
  if (!a.metric.empty()) metric = mpe::parse_metric(a.metric);

  const auto report = synth::run_band_sweep(base, levels, metric, std::max(1u, a.threads));
  emit(a.out, synth::to_json(report), out);
  const auto c = report.correlation();
  out << fmt::format("{} levels, band width {}, spearman {} = {}\n", report.points.size(),
                     base.dilate_radius + base.erode_radius, mpe::to_string(metric),
                     c ? fmt::format("{}", *c) : std::string("undefined"));
  return kOk;
}

struct ReproduceArgs {
  std::string table, counts, data_dir, out;
};

inline int run_reproduce(const ReproduceArgs& a, std::ostream& out, std::ostream& err) {
  const auto id = synth::parse_table_id(a.table);
  synth::BundledTable bundled;
  try {
    bundled = synth::load_bundled_table(data_dir(a.data_dir) / "tables", id);
  } catch (const std::exception& e) {
    throw InputError(fmt::format("--data-dir: {}", e.what()));
  }
  auto counts = bundled.counts;
  if (!a.counts.empty()) {
    try {
      counts = parse_counts_csv(load_text("--counts", a.counts));
    } catch (const CsvError& e) {
      throw InputError(fmt::format("--counts: {}", e.what()));
    }
  }
  const auto report = synth::reproduce_tables(counts, bundled);
  emit(a.out, synth::to_tsv(report), out);
  (a.out.empty() ? err : out) << fmt::format(
      "{}: {}/{} cells pass ({}/{} percentage cells)\n", synth::to_string(id),
      report.count(false, true), report.count(false, false), report.count(true, true),
      report.count(true, false));
  return report.all_pass() ? kOk : kCheckFailed;
}

}  // namespace detail

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluation with inaccurate targets: logical metrics, ranking, proofs, synthetic sweeps"};
  app.name("laf");
  app.require_subcommand(1);

  detail::EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Logical metrics of a prediction against HR/HP targets");
  eval->add_option("--pred", eval_args.pred, "Prediction mask (PNG or RLE)")->required();
  eval->add_option("--target-hr", eval_args.target_hr, "High-recall target mask")->required();
  eval->add_option("--target-hp", eval_args.target_hp, "High-precision target mask")->required();
  eval->add_option("--threshold", eval_args.threshold, "Gray level at or above which a pixel is positive");
  eval->add_option("--format", eval_args.format)->check(CLI::IsMember({"json", "tsv"}));
  eval->add_option("--out", eval_args.out, "Write the report here instead of stdout");

  detail::RankArgs rank_args;
  auto* rank = app.add_subcommand("rank", "Rank methods by Lf1 or LfIoU from a counts CSV");
  rank->add_option("--counts", rank_args.counts, "CSV with header method,ltp,lfp,lfn")->required();
  rank->add_option("--metric", rank_args.metric)->required()->check(CLI::IsMember({"lf1", "lfiou"}));
  rank->add_option("--tau-small", rank_args.tau_small);
  rank->add_option("--tau-large", rank_args.tau_large);
  rank->add_option("--format", rank_args.format)->check(CLI::IsMember({"tsv", "json", "table"}));
  rank->add_option("--out", rank_args.out);

  std::string corpus;
  auto* verify = app.add_subcommand("verify-proofs", "Check every .proof script of a corpus");
  verify->add_option("--corpus", corpus, "Corpus directory (default: LAF_CORPUS_DIR or bundled)");

  detail::SweepArgs sweep_args;
  auto* synth = app.add_subcommand("synth", "Synthetic experiments");
  synth->require_subcommand(1);
  auto* sweep = synth->add_subcommand("sweep", "Noise sweep comparing logical and true F1 rankings");
  sweep->add_option("--config", sweep_args.config, "Flat JSON object of synth parameters")->required();
  sweep->add_option("--out", sweep_args.out, "Sweep report (JSON)")->required();
  sweep->add_option("--seed", sweep_args.seed);
  sweep->add_option("--dilate-radius", sweep_args.dilate_radius);
  sweep->add_option("--erode-radius", sweep_args.erode_radius);
  sweep->add_option("--metric", sweep_args.metric)->check(CLI::IsMember({"lf1", "lfiou"}));
  sweep->add_option("--threads", sweep_args.threads)->check(CLI::Range(1u, 256u));

  detail::ReproduceArgs repro_args;
  auto* repro = app.add_subcommand("reproduce", "Recompute a published table from its counts and diff it");
  repro->add_option("--table", repro_args.table)
      ->required()
      ->check(CLI::IsMember({"pre_treatment", "post_treatment"}));
  repro->add_option("--counts", repro_args.counts, "Counts CSV (default: bundled)");
  repro->add_option("--data-dir", repro_args.data_dir, "Directory holding tables/");
  repro->add_option("--out", repro_args.out, "Write the TSV diff here instead of stdout");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*eval) return detail::run_eval(eval_args, out);
    if (*rank) return detail::run_rank(rank_args, out);
    if (*verify) return detail::run_verify(corpus, out);
    if (*sweep) return detail::run_sweep(sweep_args, out);
    if (*repro) return detail::run_reproduce(repro_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace laf::cli
