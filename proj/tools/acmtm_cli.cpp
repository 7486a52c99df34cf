// Command-line front end: run, replicates, alpha-sweep, compare, validate.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "acmtm/errors.hpp"
#include "acmtm/report.hpp"
#include "acmtm/runner.hpp"
#include "acmtm/spec.hpp"

namespace fs = std::filesystem;
using namespace acmtm;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<int> thin;
  bool full_trace = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed (overrides the spec)");
  cmd->add_option("--out-dir", o.out_dir, "Output directory (overrides the spec)");
  cmd->add_option("--threads", o.threads, "Worker threads for replicates");
  cmd->add_option("--thin", o.thin, "Keep every n-th sweep in trace.csv");
  cmd->add_flag("--full-trace", o.full_trace, "Write the thinned chain trace");
}

ExperimentSpec load(const std::string& path, const Overrides& o) {
  ExperimentSpec spec = parse_spec(path);
  if (o.seed) spec.base_seed = *o.seed;
  if (o.out_dir) spec.outputs = *o.out_dir;
  if (o.threads) spec.threads = *o.threads;
  if (o.thin) spec.thin = *o.thin;
  if (o.full_trace) spec.full_trace = true;
  spec.validate();
  return spec;
}

fs::path replicate_dir(const ExperimentSpec& spec, Index id) {
  return fs::path(spec.outputs) / fmt::format("replicate_{:03}", id);
}

int cmd_run(const ExperimentSpec& spec, Index replicate) {
  ReplicateResult r = run_experiment(spec, replicate);
  write_replicate_files(replicate_dir(spec, replicate), spec, r);
  std::cout << fmt::format("{}: replicate {} asj={} wall_time={:.3f}s\n", spec.name, replicate,
                           format_number(r.report.asj), r.wall_time);
  write_summary(spec.outputs, aggregate({std::move(r)}));
  return 0;
}

int cmd_replicates(const ExperimentSpec& spec) {
  try {
    ReplicateReport rep = run_replicates(spec);
    for (const auto& r : rep.replicates) write_replicate_files(replicate_dir(spec, r.replicate), spec, r);
    write_summary(spec.outputs, rep);
    std::cout << fmt::format("{}: {} replicates, mean asj={}\n", spec.name, rep.replicates.size(),
                             format_number(rep.asj.mean));
    return 0;
  } catch (const ReplicateFailure& f) {
    for (const auto& r : f.completed) write_replicate_files(replicate_dir(spec, r.replicate), spec, r);
    write_manifest(spec.outputs, f, spec.replicates);
    throw;
  }
}

int cmd_alpha_sweep(ExperimentSpec spec, std::vector<double> alphas) {
  if (alphas.empty()) alphas = spec.alpha_sweep;
  if (alphas.empty()) alphas = {spec.sampler.alpha};
  const auto rows = alpha_sweep(spec, alphas);
  write_alpha_sweep(fs::path(spec.outputs) / "alpha_sweep.csv", rows);
  for (const auto& r : rows) std::cout << fmt::format("alpha={} asj={}\n", format_number(r.alpha), format_number(r.asj));
  return 0;
}

int cmd_compare(const std::vector<std::string>& reports, std::vector<std::string> labels,
                const std::string& out) {
  if (labels.empty())
    for (const auto& r : reports) labels.push_back(fs::path(r).filename().string());
  std::vector<SummaryTable> tables;
  for (const auto& r : reports) {
    fs::path p(r);
    tables.push_back(read_summary(fs::is_directory(p) ? p / "summary.csv" : p));
  }
  write_comparison(out, compare_reports(tables, labels));
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive component-wise multiple-try Metropolis experiments"};
  app.require_subcommand(1);

  std::string spec_path;
  Overrides ov;
  Index replicate = 0;
  std::vector<double> alphas;
  std::vector<std::string> reports, labels;
  std::string compare_out = "comparison.csv";

  auto* run = app.add_subcommand("run", "Run a single replicate");
  run->add_option("spec", spec_path, "Experiment file")->required();
  run->add_option("--replicate", replicate, "Replicate id (stream id)");
  add_overrides(run, ov);

  auto* reps = app.add_subcommand("replicates", "Run all replicates and aggregate");
  reps->add_option("spec", spec_path, "Experiment file")->required();
  add_overrides(reps, ov);

  auto* sweep = app.add_subcommand("alpha-sweep", "One CMTM run per alpha");
  sweep->add_option("spec", spec_path, "Experiment file")->required();
  sweep->add_option("--alphas", alphas, "Alpha values (default: the spec's alpha_sweep)");
  add_overrides(sweep, ov);

  auto* cmp = app.add_subcommand("compare", "Side-by-side ESS from summary.csv files or output dirs");
  cmp->add_option("reports", reports, "summary.csv files or output directories")->required();
  cmp->add_option("--labels", labels, "One label per report");
  cmp->add_option("-o,--output", compare_out, "Comparison CSV path");

  auto* val = app.add_subcommand("validate", "Parse and validate an experiment file");
  val->add_option("spec", spec_path, "Experiment file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*val) {
      const ExperimentSpec spec = parse_spec(spec_path);
      std::cout << fmt::format("{}: ok ({} / {}, {} iterations)\n", spec.name, to_string(spec.target.family),
                               to_string(spec.sampler.kind), spec.iterations);
      return 0;
    }
    if (*cmp) return cmd_compare(reports, labels, compare_out);
    const ExperimentSpec spec = load(spec_path, ov);
    if (*run) return cmd_run(spec, replicate);
    if (*reps) return cmd_replicates(spec);
    if (*sweep) return cmd_alpha_sweep(spec, alphas);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
