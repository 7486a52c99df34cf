#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "acmtm/kernels.hpp"

namespace acmtm {

/// A recorded chain: row i of `states` is the state after sweep i.
struct ChainTrace {
  StateVector initial_state;
  Eigen::MatrixXd states;            // iterations x d
  std::vector<SweepRecord> records;  // one per sweep; state_after may be left empty
  Index burn_in = 0;
  double wall_time = 0.0;            // seconds spent in the sweep loop

  Index iterations() const { return states.rows(); }
  Index dim() const { return states.cols(); }

  /// State before sweep i.
  StateVector state_before(Index i) const {
    return i == 0 ? initial_state : StateVector(states.row(i - 1).transpose());
  }

  void validate() const;
};

/// Mean of ||X_{n+1} - X_n||^2 over consecutive post-burn-in sweeps.
/// Throws InsufficientData with fewer than two post-burn-in states.
double sweep_squared_jump(const ChainTrace& trace);

/// Average squared jump per coordinate update: every single-coordinate move
/// counts as one iteration, rejections as zero. Equals sweep_squared_jump / d.
double average_squared_jump(const ChainTrace& trace);

/// Per-coordinate mean squared jump; sums to sweep_squared_jump.
Eigen::VectorXd squared_jump_by_coordinate(const ChainTrace& trace);

/// tau = 1 + 2 sum_k rho_k, truncated by the initial positive sequence rule
/// (pairs rho_{2t} + rho_{2t+1} are summed until one is non-positive) and
/// floored at 1. Needs at least 10 values; a constant series throws UndefinedAct.
double autocorrelation_time(std::span<const double> series);

template <typename Derived>
double autocorrelation_time(const Eigen::DenseBase<Derived>& series) {
  const Eigen::VectorXd v = series;
  return autocorrelation_time(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

/// w / tau with w the series length.
double effective_sample_size(std::span<const double> series);

template <typename Derived>
double effective_sample_size(const Eigen::DenseBase<Derived>& series) {
  const Eigen::VectorXd v = series;
  return effective_sample_size(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

struct FrequencyTables {
  Eigen::MatrixXd selection;   // d x m; rows sum to 1 where any selection happened
  Eigen::MatrixXd acceptance;  // d x m; NaN where a proposal was never selected
  Eigen::MatrixXi selected;    // raw selection counts
  Eigen::MatrixXi accepted;    // raw acceptance counts
};

using StatePredicate = std::function<bool(const StateVector&)>;

/// Selection and post-selection acceptance frequencies over post-burn-in sweeps.
/// With a predicate, a coordinate update is counted only when the state it
/// started from (earlier coordinates of the same sweep already moved) satisfies it.
FrequencyTables frequency_tables(const ChainTrace& trace, Index proposals,
                                 const StatePredicate& region = {});

/// {X_coordinate < threshold} and {X_coordinate >= threshold}, in that order.
std::pair<FrequencyTables, FrequencyTables> region_frequency_tables(const ChainTrace& trace,
                                                                    Index proposals,
                                                                    Index coordinate,
                                                                    double threshold);

struct DiagnosticsReport {
  double asj = 0.0;
  Eigen::VectorXd act;  // NaN for coordinates whose post-burn-in series is constant
  Eigen::VectorXd ess;
  FrequencyTables tables;
  std::optional<std::pair<FrequencyTables, FrequencyTables>> region_tables;
};

DiagnosticsReport diagnose(const ChainTrace& trace, Index proposals);

}  // namespace acmtm
