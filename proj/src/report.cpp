#include "acmtm/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace acmtm {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

namespace {

std::ofstream open_csv(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_table(const fs::path& path, const Eigen::MatrixXd& values, const ScaleGrid& grid) {
  auto out = open_csv(path);
  out << "coordinate,proposal,sigma,frequency\n";
  for (Index k = 0; k < values.rows(); ++k)
    for (Index j = 0; j < values.cols(); ++j)
      out << k + 1 << ',' << j + 1 << ',' << format_number(grid(k, j)) << ','
          << format_number(values(k, j)) << '\n';
}

}  // namespace

void write_replicate_files(const fs::path& dir, const ExperimentSpec& spec,
                           const ReplicateResult& result) {
  fs::create_directories(dir);
  const auto& tables = result.report.tables;
  const ScaleGrid& grid = result.final_grid;
  write_table(dir / "selection.csv", tables.selection, grid);
  write_table(dir / "acceptance.csv", tables.acceptance, grid);
  if (result.report.region_tables) {
    const auto& [below, above] = *result.report.region_tables;
    write_table(dir / "selection_region_below.csv", below.selection, grid);
    write_table(dir / "selection_region_above.csv", above.selection, grid);
    write_table(dir / "acceptance_region_below.csv", below.acceptance, grid);
    write_table(dir / "acceptance_region_above.csv", above.acceptance, grid);
  }

  {
    auto out = open_csv(dir / "final_grid.csv");
    out << "coordinate,proposal,sigma\n";
    for (Index k = 0; k < grid.dim(); ++k)
      for (Index j = 0; j < grid.proposals(); ++j)
        out << k + 1 << ',' << j + 1 << ',' << format_number(grid(k, j)) << '\n';
  }
  {
    auto out = open_csv(dir / "adaptation_log.csv");
    out << "iteration,coordinate,branch,sigma_min_old,sigma_min_new,sigma_max_old,sigma_max_new\n";
    for (const auto& e : result.events)
      out << e.iteration << ',' << e.coordinate + 1 << ',' << to_string(e.branch) << ','
          << format_number(e.sigma_min_old) << ',' << format_number(e.sigma_min_new) << ','
          << format_number(e.sigma_max_old) << ',' << format_number(e.sigma_max_new) << '\n';
  }
  if (spec.full_trace && result.thinned_trace.size() > 0) {
    auto out = open_csv(dir / "trace.csv");
    out << "iteration";
    for (Index k = 1; k < result.thinned_trace.cols(); ++k) out << ",x_" << k;
    out << '\n';
    for (Index r = 0; r < result.thinned_trace.rows(); ++r) {
      out << static_cast<long long>(result.thinned_trace(r, 0));
      for (Index k = 1; k < result.thinned_trace.cols(); ++k)
        out << ',' << format_number(result.thinned_trace(r, k));
      out << '\n';
    }
  }
}

void write_summary(const fs::path& dir, const ReplicateReport& report) {
  const Index d = report.dim();
  {
    auto out = open_csv(dir / "summary.csv");
    out << "replicate,asj,wall_time";
    for (Index k = 1; k <= d; ++k) out << ",act_" << k;
    for (Index k = 1; k <= d; ++k) out << ",ess_" << k;
    out << '\n';
    for (const auto& r : report.replicates) {
      out << r.replicate << ',' << format_number(r.report.asj) << ',' << format_number(r.wall_time);
      for (Index k = 0; k < d; ++k) out << ',' << format_number(r.report.act[k]);
      for (Index k = 0; k < d; ++k) out << ',' << format_number(r.report.ess[k]);
      out << '\n';
    }
  }
  auto out = open_csv(dir / "aggregate.csv");
  out << "metric,min,median,mean,max\n";
  auto row = [&](const std::string& name, const MetricSummary& s) {
    out << name << ',' << format_number(s.min) << ',' << format_number(s.median) << ','
        << format_number(s.mean) << ',' << format_number(s.max) << '\n';
  };
  row("asj", report.asj);
  row("wall_time", report.wall_time);
  for (Index k = 0; k < d; ++k) row("act_" + std::to_string(k + 1), report.act[static_cast<std::size_t>(k)]);
  for (Index k = 0; k < d; ++k) row("ess_" + std::to_string(k + 1), report.ess[static_cast<std::size_t>(k)]);
}

void write_manifest(const fs::path& dir, const ReplicateFailure& failure, int replicates) {
  auto out = open_csv(dir / "manifest.csv");
  out << "replicate,status,message\n";
  for (int i = 0; i < replicates; ++i) {
    std::string status = "not_run";
    std::string message;
    for (const auto& r : failure.completed)
      if (r.replicate == i) status = "ok";
    for (const auto& [id, msg] : failure.failures)
      if (id == i) {
        status = "failed";
        message = msg;
      }
    for (auto& c : message)
      if (c == ',' || c == '\n') c = ';';
    out << i << ',' << status << ',' << message << '\n';
  }
}

void write_alpha_sweep(const fs::path& path, const std::vector<AlphaSweepRow>& rows) {
  auto out = open_csv(path);
  const Index d = rows.empty() ? 0 : rows.front().act.size();
  out << "alpha,asj";
  for (Index k = 1; k <= d; ++k) out << ",act_" << k;
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.alpha) << ',' << format_number(r.asj);
    for (Index k = 0; k < d; ++k) out << ',' << format_number(r.act[k]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

SummaryTable read_summary(const fs::path& summary_csv) {
  std::ifstream in(summary_csv);
  if (!in) throw InvalidParameter("cannot open " + summary_csv.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("empty summary file: " + summary_csv.string());

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  const auto header = split(line);
  if (header.size() < 3 || header[0] != "replicate" || header[1] != "asj" || header[2] != "wall_time" ||
      (header.size() - 3) % 2 != 0)
    throw InvalidParameter("not a summary.csv header: " + summary_csv.string());
  const Index d = static_cast<Index>((header.size() - 3) / 2);

  SummaryTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw InvalidParameter("ragged row in " + summary_csv.string());
    auto num = [&](const std::string& c) { return c == "nan" ? std::nan("") : std::stod(c); };
    table.wall_time.push_back(num(cells[2]));
    Eigen::VectorXd ess(d);
    for (Index k = 0; k < d; ++k) ess[k] = num(cells[static_cast<std::size_t>(3 + d + k)]);
    table.ess.push_back(ess);
  }
  if (table.ess.empty()) throw InvalidParameter("summary has no replicate rows: " + summary_csv.string());
  return table;
}

std::vector<ComparisonRow> compare_reports(const std::vector<SummaryTable>& reports,
                                           const std::vector<std::string>& labels) {
  if (reports.empty()) throw InvalidParameter("compare: no reports");
  if (labels.size() != reports.size()) throw InvalidParameter("compare: one label per report");
  const Index d = reports.front().dim();
  for (const auto& r : reports)
    if (r.dim() != d) throw InvalidParameter("compare: reports differ in target dimension");

  auto means = [&](const SummaryTable& t) {
    std::pair<Eigen::VectorXd, Eigen::VectorXd> m{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
    for (std::size_t i = 0; i < t.ess.size(); ++i) {
      m.first += t.ess[i];
      m.second += t.ess[i] / t.wall_time[i];
    }
    m.first /= static_cast<double>(t.ess.size());
    m.second /= static_cast<double>(t.ess.size());
    return m;
  };

  const auto base = means(reports.front());
  std::vector<ComparisonRow> rows;
  for (Index k = 0; k < d; ++k) {
    for (std::size_t r = 0; r < reports.size(); ++r) {
      const auto m = means(reports[r]);
      rows.push_back({k + 1, labels[r], m.first[k], m.second[k], m.first[k] / base.first[k],
                      m.second[k] / base.second[k]});
    }
  }
  return rows;
}

void write_comparison(const fs::path& path, const std::vector<ComparisonRow>& rows) {
  auto out = open_csv(path);
  out << "coordinate,label,ess,ess_per_second,ess_ratio,ess_per_second_ratio\n";
  for (const auto& r : rows)
    out << r.coordinate << ',' << r.label << ',' << format_number(r.ess) << ','
        << format_number(r.ess_per_second) << ',' << format_number(r.ess_ratio) << ','
        << format_number(r.ess_per_second_ratio) << '\n';
}

}  // namespace acmtm
