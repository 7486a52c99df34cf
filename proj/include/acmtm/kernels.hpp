#pragma once

#include <vector>

#include <Eigen/Core>

#include "acmtm/rng.hpp"
#include "acmtm/targets.hpp"

namespace acmtm {

/// d x m matrix of proposal standard deviations, one row per coordinate.
///
/// Rows are kept strictly ascending: construction sorts each row and nudges
/// repeated values upward by a factor (1 + 1e-9) so column 0 is always the
/// smallest scale and column m-1 the largest.
class ScaleGrid {
public:
  explicit ScaleGrid(Eigen::MatrixXd sigma);

  /// Every coordinate gets the same row of scales.
  static ScaleGrid uniform_rows(Index dim, const Eigen::VectorXd& scales);

  /// sigma_{k,j} = 2^(j - 1 - floor(m/2)) for j = 1..m on every coordinate.
  static ScaleGrid generic(Index dim, Index m);

  Index dim() const { return sigma_.rows(); }
  Index proposals() const { return sigma_.cols(); }
  double operator()(Index k, Index j) const { return sigma_(k, j); }
  auto row(Index k) const { return sigma_.row(k); }
  const Eigen::MatrixXd& matrix() const { return sigma_; }

  /// Replaces row k. The new row must already be ascending and positive.
  void set_row(Index k, const Eigen::Ref<const Eigen::RowVectorXd>& row);

  bool operator==(const ScaleGrid& other) const { return sigma_ == other.sigma_; }

private:
  Eigen::MatrixXd sigma_;
};

struct KernelConfig {
  double alpha = 2.9;  // exponent on the jump distance in the selection weights
  bool keep_weights = false;

  void validate() const;
};

inline constexpr int kNoSelection = -1;

struct CoordinateUpdateRecord {
  Index coordinate = 0;
  int selected_proposal = kNoSelection;
  bool accepted = false;
  double jump = 0.0;                 // |x'_k - x_k|
  double from = 0.0;                 // x_k before the update
  double proposal = 0.0;             // candidate put to the accept/reject step
  double acceptance_probability = 0.0;
  Eigen::VectorXd forward_logweights;  // filled only with KernelConfig::keep_weights
  Eigen::VectorXd reverse_logweights;
};

struct SweepRecord {
  std::vector<CoordinateUpdateRecord> updates;
  StateVector state_after;
};

/// log w = log pi(x with x_k := y) + alpha log|y - x_k|; -inf for zero density or y == x_k.
double cmtm_log_weight(const TargetModel& target, const StateVector& x, Index k, double y,
                       double alpha);

/// One multiple-try update of coordinate k with one Gaussian proposal per scale.
///
/// Draws m candidates around x_k, selects one with probability proportional to
/// its weight, draws m - 1 reverse points around the selected candidate (the
/// current value fills the selected slot) and accepts with probability
/// min(1, sum forward weights / sum reverse weights), all in log space.
/// When every forward weight is zero the move is rejected with no selection.
/// `x` is updated in place.
CoordinateUpdateRecord cmtm_coordinate_update(const TargetModel& target, StateVector& x, Index k,
                                              const Eigen::Ref<const Eigen::RowVectorXd>& scales,
                                              const KernelConfig& cfg, RngStream& rng);

/// Coordinate updates k = 0..d-1 in order.
SweepRecord cmtm_sweep(const TargetModel& target, const StateVector& x, const ScaleGrid& grid,
                       const KernelConfig& cfg, RngStream& rng);

/// Component-wise random-walk Metropolis, one proposal per coordinate.
SweepRecord cmh_sweep(const TargetModel& target, const StateVector& x,
                      const Eigen::VectorXd& scales, RngStream& rng);

/// Picks one scale per coordinate uniformly at random, then a CMH step with it.
SweepRecord mixture_cmh_sweep(const TargetModel& target, const StateVector& x,
                              const ScaleGrid& grid, RngStream& rng);

}  // namespace acmtm
