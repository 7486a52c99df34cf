#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "acmtm/runner.hpp"

namespace acmtm {

/// Shortest round-trip decimal form; "nan" for NaN. Deterministic across runs.
std::string format_number(double v);

/// Per-replicate artifacts: selection.csv, acceptance.csv, final_grid.csv,
/// adaptation_log.csv, plus region tables and trace.csv when configured.
void write_replicate_files(const std::filesystem::path& dir, const ExperimentSpec& spec,
                           const ReplicateResult& result);

/// summary.csv (one row per replicate) and aggregate.csv (min/median/mean/max).
void write_summary(const std::filesystem::path& dir, const ReplicateReport& report);

/// manifest.csv listing each replicate as ok or failed.
void write_manifest(const std::filesystem::path& dir, const ReplicateFailure& failure, int replicates);

void write_alpha_sweep(const std::filesystem::path& path, const std::vector<AlphaSweepRow>& rows);

/// Per-replicate ESS and wall time read back from a summary.csv.
struct SummaryTable {
  std::vector<double> wall_time;
  std::vector<Eigen::VectorXd> ess;  // one vector per replicate

  Index dim() const { return ess.empty() ? 0 : ess.front().size(); }
};

SummaryTable read_summary(const std::filesystem::path& summary_csv);

struct ComparisonRow {
  Index coordinate = 0;  // 1-based
  std::string label;
  double ess = 0.0;
  double ess_per_second = 0.0;
  double ess_ratio = 1.0;             // relative to the first report
  double ess_per_second_ratio = 1.0;
};

/// Mean ESS and mean ESS/wall-time per coordinate, side by side per label.
/// Throws InvalidParameter when the reports disagree in dimension.
std::vector<ComparisonRow> compare_reports(const std::vector<SummaryTable>& reports,
                                           const std::vector<std::string>& labels);

void write_comparison(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows);

}  // namespace acmtm
