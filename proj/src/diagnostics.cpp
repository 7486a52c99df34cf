#include "acmtm/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace acmtm {

void ChainTrace::validate() const {
  if (static_cast<Index>(records.size()) != states.rows())
    throw InvalidParameter("trace: states and records differ in length");
  if (initial_state.size() != states.cols())
    throw InvalidParameter("trace: initial state has wrong dimension");
  if (burn_in < 0 || (states.rows() > 0 && burn_in >= states.rows()))
    throw InvalidParameter("trace: burn-in must be in [0, iterations)");
}

namespace {

Eigen::MatrixXd post_burn_in(const ChainTrace& trace) {
  trace.validate();
  const Index n = trace.iterations() - trace.burn_in;
  if (n < 2) throw InsufficientData("need at least two post-burn-in states");
  return trace.states.bottomRows(n);
}

}  // namespace

Eigen::VectorXd squared_jump_by_coordinate(const ChainTrace& trace) {
  const Eigen::MatrixXd kept = post_burn_in(trace);
  const Index n = kept.rows();
  const Eigen::MatrixXd diff = kept.bottomRows(n - 1) - kept.topRows(n - 1);
  return diff.array().square().colwise().sum().transpose() / static_cast<double>(n - 1);
}

double sweep_squared_jump(const ChainTrace& trace) {
  const Eigen::MatrixXd kept = post_burn_in(trace);
  const Index n = kept.rows();
  return (kept.bottomRows(n - 1) - kept.topRows(n - 1)).squaredNorm() / static_cast<double>(n - 1);
}

double average_squared_jump(const ChainTrace& trace) {
  return sweep_squared_jump(trace) / static_cast<double>(trace.dim());
}

double autocorrelation_time(std::span<const double> series) {
  const auto n = static_cast<Index>(series.size());
  if (n < 10) throw InsufficientData("autocorrelation time needs at least 10 values");
  const Eigen::Map<const Eigen::VectorXd> raw(series.data(), n);
  const Eigen::VectorXd x = raw.array() - raw.mean();
  const double c0 = x.squaredNorm() / static_cast<double>(n);
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw UndefinedAct("autocorrelation time of a constant series");

  auto rho = [&](Index lag) {
    return x.head(n - lag).dot(x.tail(n - lag)) / static_cast<double>(n) / c0;
  };

  double pair_sum = 0.0;
  for (Index t = 0; 2 * t + 1 < n; ++t) {
    const double gamma = rho(2 * t) + rho(2 * t + 1);
    if (gamma <= 0.0) break;
    pair_sum += gamma;
  }
  return std::max(1.0, 2.0 * pair_sum - 1.0);
}

double effective_sample_size(std::span<const double> series) {
  return static_cast<double>(series.size()) / autocorrelation_time(series);
}

FrequencyTables frequency_tables(const ChainTrace& trace, Index proposals,
                                 const StatePredicate& region) {
  trace.validate();
  if (proposals < 1) throw InvalidParameter("frequency tables need m >= 1");
  const Index d = trace.dim();
  FrequencyTables out;
  out.selected = Eigen::MatrixXi::Zero(d, proposals);
  out.accepted = Eigen::MatrixXi::Zero(d, proposals);

  for (Index i = trace.burn_in; i < trace.iterations(); ++i) {
    // Coordinates before k already hold their post-update values when k moves.
    StateVector current = trace.state_before(i);
    for (const auto& u : trace.records[static_cast<std::size_t>(i)].updates) {
      const bool counted = !region || region(current);
      current[u.coordinate] = trace.states(i, u.coordinate);
      if (!counted || u.selected_proposal == kNoSelection) continue;
      if (u.selected_proposal >= proposals)
        throw InvalidParameter("frequency tables: proposal index exceeds m");
      ++out.selected(u.coordinate, u.selected_proposal);
      if (u.accepted) ++out.accepted(u.coordinate, u.selected_proposal);
    }
  }

  out.selection = Eigen::MatrixXd::Zero(d, proposals);
  out.acceptance = Eigen::MatrixXd::Constant(d, proposals, std::numeric_limits<double>::quiet_NaN());
  for (Index k = 0; k < d; ++k) {
    const int total = out.selected.row(k).sum();
    for (Index j = 0; j < proposals; ++j) {
      const int sel = out.selected(k, j);
      if (total > 0) out.selection(k, j) = static_cast<double>(sel) / total;
      if (sel > 0) out.acceptance(k, j) = static_cast<double>(out.accepted(k, j)) / sel;
    }
  }
  return out;
}

std::pair<FrequencyTables, FrequencyTables> region_frequency_tables(const ChainTrace& trace,
                                                                    Index proposals,
                                                                    Index coordinate,
                                                                    double threshold) {
  if (coordinate < 0 || coordinate >= trace.dim())
    throw InvalidParameter("region coordinate out of range");
  auto below = [=](const StateVector& x) { return x[coordinate] < threshold; };
  auto above = [=](const StateVector& x) { return x[coordinate] >= threshold; };
  return {frequency_tables(trace, proposals, below), frequency_tables(trace, proposals, above)};
}

DiagnosticsReport diagnose(const ChainTrace& trace, Index proposals) {
  DiagnosticsReport r;
  r.asj = average_squared_jump(trace);
  const Index d = trace.dim();
  const Index n = trace.iterations() - trace.burn_in;
  r.act.resize(d);
  r.ess.resize(d);
  for (Index k = 0; k < d; ++k) {
    const Eigen::VectorXd series = trace.states.col(k).tail(n);
    try {
      r.act[k] = autocorrelation_time(series);
      r.ess[k] = static_cast<double>(n) / r.act[k];
    } catch (const UndefinedAct&) {
      r.act[k] = std::numeric_limits<double>::quiet_NaN();
      r.ess[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  r.tables = frequency_tables(trace, proposals);
  return r;
}

}  // namespace acmtm
