#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acmtm/adaptation.hpp"
#include "acmtm/diagnostics.hpp"
#include "acmtm/spec.hpp"

namespace acmtm {

/// Stream-id bit reserved for the adaptation coin, so the coin never shares a
/// stream with any replicate's kernel draws.
inline constexpr std::uint64_t kAdaptationStreamBit = std::uint64_t{1} << 63;

struct ChainRun {
  ChainTrace trace;
  ScaleGrid final_grid;
  std::vector<AdaptationEvent> events;
};

/// Runs `iterations` sweeps of the configured sampler from x0 using
/// RngStream(seed, stream_id) for the kernel (and the flagged stream id for
/// the adaptation coin).
ChainRun run_chain(const TargetModel& target, const SamplerSpec& sampler, const StateVector& x0,
                   std::int64_t iterations, std::int64_t burn_in, std::uint64_t seed,
                   std::uint64_t stream_id);

struct ReplicateResult {
  Index replicate = 0;
  DiagnosticsReport report;
  ScaleGrid final_grid;
  std::vector<AdaptationEvent> events;
  double wall_time = 0.0;
  Eigen::MatrixXd thinned_trace;  // rows: iteration, x_1..x_d; empty unless full_trace
};

/// One replicate of an experiment, seeded by (base_seed, replicate_id).
ReplicateResult run_experiment(const ExperimentSpec& spec, Index replicate_id);

struct MetricSummary {
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// NaN entries are ignored; all-NaN input gives NaN everywhere.
MetricSummary summarize(const std::vector<double>& values);

struct ReplicateReport {
  std::vector<ReplicateResult> replicates;
  MetricSummary asj;
  MetricSummary wall_time;
  std::vector<MetricSummary> act;  // per coordinate
  std::vector<MetricSummary> ess;

  Index dim() const { return static_cast<Index>(act.size()); }
  Eigen::VectorXd mean_act() const;
  Eigen::VectorXd mean_ess() const;
};

ReplicateReport aggregate(std::vector<ReplicateResult> results);

/// Thrown by run_replicates when any replicate fails; the rest still finish
/// and are carried along so a partial-results manifest can be written.
struct ReplicateFailure : std::runtime_error {
  ReplicateFailure(std::vector<ReplicateResult> completed,
                   std::vector<std::pair<Index, std::string>> failures);

  std::vector<ReplicateResult> completed;
  std::vector<std::pair<Index, std::string>> failures;
};

/// Runs all replicates on `spec.threads` workers. Each worker owns its chain,
/// streams and controller; only the spec and target are shared.
ReplicateReport run_replicates(const ExperimentSpec& spec);

struct AlphaSweepRow {
  double alpha = 0.0;
  double asj = 0.0;
  Eigen::VectorXd act;
};

/// One CMTM run per alpha with everything else from `spec`.
std::vector<AlphaSweepRow> alpha_sweep(const ExperimentSpec& spec, const std::vector<double>& alphas,
                                       Index replicate_id = 0);

}  // namespace acmtm
