// Acceptance suite: one PASS/FAIL line per criterion. Artifacts are written
// under --out; --compare-with DIR additionally diffs them against an earlier
// run. Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "laf/laf.hpp"
#include "laf_cli.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = LAF_DEFAULT_DATA_DIR;
const fs::path kSweepConfig = kData / "sweeps" / "tradeoff.json";

// Frozen from tests/oracle/sweep_oracle.py --config data/sweeps/tradeoff.json
// (seed 7, 21 levels, r1 = r2 = 2).
constexpr double kFrozenBandCorrelation = 0.7805194805194805;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;  // 0 when no limit applies
  std::function<Outcome(const fs::path&)> run;
};

int cli(std::vector<std::string> args, std::string* captured = nullptr) {
  std::ostringstream out, err;
  const int code = laf::cli::run_cli(std::move(args), out, err);
  if (captured != nullptr) *captured = out.str();
  if (!err.str().empty() && code == laf::cli::kUsage) std::cerr << err.str();
  return code;
}

Outcome tables(const fs::path& dir) {
  std::size_t pct_pass = 0, pct_total = 0, rank_pass = 0, rank_total = 0, count_fail = 0;
  int cli_failures = 0;
  for (auto id : {laf::synth::TableId::PreTreatment, laf::synth::TableId::PostTreatment}) {
    const std::string name(laf::synth::to_string(id));
    const auto bundled = laf::synth::load_bundled_table(kData / "tables", id);
    const auto report = laf::synth::reproduce_tables(bundled.counts, bundled);
    for (const auto& c : report.cells) {
      if (c.percentage) {
        ++pct_total;
        pct_pass += c.pass ? 1 : 0;
      } else if (c.cell.find(".rank_") != std::string::npos) {
        ++rank_total;
        rank_pass += c.pass ? 1 : 0;
      } else if (!c.pass) {
        ++count_fail;
      }
    }
    std::string summary;
    cli_failures += cli({"reproduce", "--table", name, "--out", (dir / (name + ".tsv")).string()}, &summary) != 0;
  }
  const bool pass = pct_total == 88 && pct_pass == 88 && rank_total == 44 && rank_pass == 44 && count_fail == 0 &&
                    cli_failures == 0;
  return {pass, fmt::format("{}/{} percentage cells within 0.01, {}/{} rank cells exact (Lf1 and LfIoU)", pct_pass,
                            pct_total, rank_pass, rank_total)};
}

std::vector<laf::proof::ProofScript> load_corpus() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kData / "proofs")) {
    if (e.path().extension() == ".proof") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<laf::proof::ProofScript> out;
  for (const auto& f : files) out.push_back(laf::proof::parse_script(laf::read_text_file(f)));
  return out;
}

Outcome proofs(const fs::path& dir) {
  std::string verdicts;
  const int code = cli({"verify-proofs", "--corpus", (kData / "proofs").string()}, &verdicts);
  laf::write_text_file(dir / "proofs.tsv", verdicts);

  std::size_t accepted = 0, mutants = 0, rejected = 0;
  std::string log = "script\tdeleted_premise\tverdict\n";
  const auto corpus = load_corpus();
  for (const auto& s : corpus) {
    accepted += laf::proof::check_proof(s).accepted ? 1 : 0;
    for (std::size_t k = 0; k < s.premises.size(); ++k) {
      auto mutant = s;
      mutant.premises.erase(mutant.premises.begin() + static_cast<std::ptrdiff_t>(k));
      const auto v = laf::proof::check_proof(mutant);
      ++mutants;
      rejected += v.accepted ? 0 : 1;
      log += fmt::format("{}\t{}\t{}\n", s.name, s.premises[k].index, v.describe());
    }
  }
  laf::write_text_file(dir / "premise_mutants.tsv", log);
  const bool pass = code == 0 && corpus.size() == 9 && accepted == 9 && mutants > 0 && rejected == mutants;
  return {pass, fmt::format("{}/{} scripts accepted, {}/{} premise-deletion mutants rejected", accepted,
                            corpus.size(), rejected, mutants)};
}

Outcome soundness(const fs::path& dir) {
  std::size_t lines = 0, failures = 0, max_atoms = 0;
  bool all_accepted = true;
  std::string log = "script\tlines\tatoms\tunentailed\n";
  for (const auto& s : load_corpus()) {
    all_accepted = all_accepted && laf::proof::check_proof(s).accepted;
    const auto r = oracle::check_soundness(s);
    lines += r.lines_checked;
    failures += r.failures.size();
    max_atoms = std::max(max_atoms, r.max_atoms);
    log += fmt::format("{}\t{}\t{}\t{}\n", s.name, r.lines_checked, r.max_atoms, r.failures.size());
  }
  laf::write_text_file(dir / "soundness.tsv", log);
  return {all_accepted && failures == 0 && max_atoms <= 13 && lines > 0,
          fmt::format("{} lines entailed by premises and open hypotheses, {} failures, at most {} atoms", lines - failures,
                      failures, max_atoms)};
}

Outcome oracle_equivalence(const fs::path& dir) {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  std::size_t count_mismatch = 0, report_mismatch = 0;
  std::uint64_t checksum = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = oracle::random_mask(gen, 64, 64, density(gen));
    const auto b = oracle::random_mask(gen, 64, 64, density(gen));
    const auto c = oracle::random_mask(gen, 64, 64, density(gen));
    for (auto ra : {laf::Region::Positive, laf::Region::Negative}) {
      for (auto rb : {laf::Region::Positive, laf::Region::Negative}) {
        const auto got = laf::region_count(a, ra, b, rb).value;
        checksum = checksum * 31 + got;
        if (got != oracle::count_pixels(a, ra == laf::Region::Positive, b, rb == laf::Region::Positive)) {
          ++count_mismatch;
        }
      }
    }
    const laf::InaccurateTargetSet targets{{b, laf::TargetRole::HighRecall}, {c, laf::TargetRole::HighPrecision}};
    if (!(laf::evaluate(a, targets) == oracle::report_from_counts(oracle::logical_counts(a, b, c)))) {
      ++report_mismatch;
    }
  }
  laf::write_text_file(dir / "oracle_equivalence.tsv",
                       fmt::format("pairs\tcount_mismatches\treport_mismatches\tcount_checksum\n1000\t{}\t{}\t{}\n",
                                   count_mismatch, report_mismatch, checksum));
  return {count_mismatch == 0 && report_mismatch == 0,
          fmt::format("1000 pairs: {} intersection-count mismatches, {} LamReport mismatches", count_mismatch,
                      report_mismatch)};
}

Outcome bounding(const fs::path& dir) {
  std::mt19937_64 gen(4242);
  const std::uint32_t radii[] = {0, 1, 2, 4};
  std::size_t violations = 0, exact_cases = 0, exact_failures = 0;
  double worst_f1_gap = 0.0;
  std::string log = "instance\tr1\tr2\ttp\tfp\tfn\tltp\tlfp\tlfn\n";
  for (int i = 0; i < 1000; ++i) {
    laf::synth::SynthParams p;
    p.blob_count = 1 + static_cast<std::uint32_t>(gen() % 6);
    p.blob_radius = 2 + static_cast<std::uint32_t>(gen() % 10);
    p.seed = gen();
    p.dilate_radius = radii[i % 4];
    p.erode_radius = radii[(i / 4) % 4];
    const double fp = (gen() % 41) / 100.0, fn = (gen() % 41) / 100.0;
    const auto truth = laf::synth::gen_true_mask(p);
    const auto pred = laf::synth::gen_prediction(truth, fp, fn, gen());
    const auto t = laf::synth::true_confusion(pred, truth);
    const auto lam = laf::evaluate(pred, laf::synth::derive_targets(truth, p.dilate_radius, p.erode_radius));
    if (!(lam.ltp <= t.tp && lam.lfp <= t.fp && lam.lfn <= t.fn)) ++violations;
    if (p.dilate_radius == 0 && p.erode_radius == 0) {
      ++exact_cases;
      const double gap = std::abs(lam.lf1 - t.f1());
      worst_f1_gap = std::max(worst_f1_gap, gap);
      if (!(lam.ltp == t.tp && lam.lfp == t.fp && lam.lfn == t.fn) || gap > 1e-12) ++exact_failures;
    }
    log += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", i, p.dilate_radius, p.erode_radius, t.tp.value,
                       t.fp.value, t.fn.value, lam.ltp.value, lam.lfp.value, lam.lfn.value);
  }
  laf::write_text_file(dir / "bounding.tsv", log);
  return {violations == 0 && exact_cases > 0 && exact_failures == 0,
          fmt::format("1000 instances: {} bound violations; r1=r2=0: {}/{} exact, max |Lf1-F1| {:.1e}", violations,
                      exact_cases - exact_failures, exact_cases, worst_f1_gap)};
}

std::optional<double> sweep_correlation(const fs::path& out, std::uint32_t r) {
  const auto rs = std::to_string(r);
  if (cli({"synth", "sweep", "--config", kSweepConfig.string(), "--out", out.string(), "--dilate-radius", rs,
           "--erode-radius", rs}) != 0) {
    return std::nullopt;
  }
  const auto j = nlohmann::json::parse(laf::read_text_file(out));
  if (j["points"].size() != 21 || j["summary"]["correlation"].is_null()) return std::nullopt;
  return j["summary"]["correlation"].get<double>();
}

Outcome sweep(const fs::path& dir) {
  const auto exact = sweep_correlation(dir / "sweep_r0.json", 0);
  const auto band = sweep_correlation(dir / "sweep_r2.json", 2);
  const bool pass = exact && *exact == 1.0 && band && *band > 0.0 &&
                    std::abs(*band - kFrozenBandCorrelation) <= 1e-12;
  auto show = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("undefined"); };
  return {pass, fmt::format("seed 7, 21 levels: spearman r=0 {}, r=2 {} (frozen {})", show(exact), show(band),
                            kFrozenBandCorrelation)};
}

std::vector<Criterion> criteria() {
  return {{1, "table reproduction", 1.0, tables},
          {2, "proof corpus", 1.0, proofs},
          {3, "soundness spot-check", 5.0, soundness},
          {4, "oracle equivalence", 0.0, oracle_equivalence},
          {5, "bounding property", 0.0, bounding},
          {6, "sweep direction", 30.0, sweep}};
}

// Relative path -> contents for every file below `dir`.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = laf::read_text_file(e.path());
  }
  return files;
}

std::vector<std::string> differences(const std::map<std::string, std::string>& a,
                                     const std::map<std::string, std::string>& b) {
  std::vector<std::string> diff;
  for (const auto& [name, body] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != body) diff.push_back(name);
  }
  for (const auto& [name, body] : b) {
    if (!a.contains(name)) diff.push_back(name);
  }
  return diff;
}

void run_all(const fs::path& dir, std::vector<std::pair<const Criterion*, Outcome>>* results,
             std::vector<double>* seconds, const std::vector<Criterion>& list) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string summary = "criterion\tpass\tdetail\n";
  for (const auto& c : list) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(dir);
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary += fmt::format("{}\t{}\t{}\n", c.id, o.pass, o.detail);
    if (results != nullptr) results->push_back({&c, o});
    if (seconds != nullptr) seconds->push_back(s);
  }
  laf::write_text_file(dir / "summary.tsv", summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string out_dir = (fs::temp_directory_path() / "laf_acceptance").string();
  std::string compare_with;
  app.add_option("--out", out_dir, "Artifact directory (recreated)");
  app.add_option("--compare-with", compare_with, "Artifact directory of an earlier run to diff against");
  CLI11_PARSE(app, argc, argv);

  const auto list = criteria();
  const fs::path out = out_dir;
  const fs::path first = out / "run";
  std::vector<std::pair<const Criterion*, Outcome>> results;
  std::vector<double> seconds;
  run_all(first, &results, &seconds, list);

  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [c, o] = results[i];
    const bool in_time = c->limit_seconds == 0.0 || seconds[i] < c->limit_seconds;
    const bool pass = o.pass && in_time;
    all = all && pass;
    const auto limit = c->limit_seconds == 0.0 ? std::string("no limit")
                                               : fmt::format("limit {:g} s", c->limit_seconds);
    std::cout << fmt::format("[{}] {}. {}: {} ({:.3f} s, {})\n", pass ? "PASS" : "FAIL", c->id, c->name, o.detail,
                             seconds[i], limit);
  }

  // Determinism: rerun the whole suite into a second directory and compare.
  const fs::path second = out / "rerun";
  run_all(second, nullptr, nullptr, list);
  const auto snap = snapshot(first);
  auto diff = differences(snap, snapshot(second));
  std::string detail = fmt::format("{} artifacts byte-identical across two consecutive runs", snap.size());
  if (!compare_with.empty()) {
    const fs::path earlier = fs::path(compare_with) / "run";
    if (!fs::is_directory(earlier)) {
      diff.push_back(earlier.string() + " (missing)");
    } else {
      for (auto& d : differences(snap, snapshot(earlier))) diff.push_back("vs earlier run: " + d);
      detail += ", and with the earlier run";
    }
  }
  const bool deterministic = diff.empty() && !snap.empty();
  if (!deterministic) detail = fmt::format("differing artifacts: {}", fmt::join(diff, ", "));
  all = all && deterministic;
  std::cout << fmt::format("[{}] 7. determinism: {}\n", deterministic ? "PASS" : "FAIL", detail);
  std::cout << (all ? "all criteria pass\n" : "some criteria FAIL\n");
  return all ? 0 : 1;
}
