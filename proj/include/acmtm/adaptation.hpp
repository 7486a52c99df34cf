#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "acmtm/kernels.hpp"
#include "acmtm/rng.hpp"

namespace acmtm {

/// Bounds [epsilon, L] every proposal scale is clamped into.
struct ScaleBounds {
  double epsilon = 0x1.0p-20;
  double upper = 0x1.0p+20;

  void validate() const;
  double clamp(double s) const { return s < epsilon ? epsilon : (s > upper ? upper : s); }
};

/// P_a = max(0.99^(a-1), a^(-1/2)). Throws InvalidParameter for a < 1.
double adaptation_probability(std::int64_t a);

/// m values log-equidistant from sigma_min to sigma_max (both included).
Eigen::RowVectorXd respace_log2(double sigma_min, double sigma_max, Index m);

enum class AdaptBranch { DoubleLargest, HalveLargest, HalveSmallest, DoubleSmallest };

std::string_view to_string(AdaptBranch b);

/// One fired branch of the selection-rate controller.
struct AdaptationEvent {
  std::int64_t iteration = 0;
  Index coordinate = 0;
  AdaptBranch branch = AdaptBranch::DoubleLargest;
  double sigma_min_old = 0.0;
  double sigma_min_new = 0.0;
  double sigma_max_old = 0.0;
  double sigma_max_new = 0.0;
};

struct AdaptOutcome {
  bool attempted = false;  // iteration was an attempt point
  bool adapted = false;    // coin allowed adaptation
  std::vector<AdaptationEvent> events;
};

class AdaptationState;

/// Call once after each sweep with its 1-based iteration number; acts only when
/// iteration is a multiple of beta. Mutates `grid` in place.
AdaptOutcome maybe_adapt(AdaptationState& state, ScaleGrid& grid, std::int64_t iteration);

/// Selection-rate controller for adaptive CMTM.
///
/// Counts which proposal each coordinate selected since the last attempt. Every
/// `beta` sweeps a coin with success probability P_a decides whether to act;
/// when it does, each coordinate's largest and smallest scale are doubled or
/// halved if their selection rate is above 2/m or below 1/(2m), the row is
/// respaced log-equidistantly, and all entries are clamped into the bounds.
/// Counters reset and a advances at every attempt, whatever the coin says.
///
/// The coin has its own stream so kernel draws are identical with or without
/// adaptation.
class AdaptationState {
public:
  AdaptationState(Index dim, Index proposals, RngStream coin, std::int64_t beta = 100,
                  ScaleBounds bounds = {});

  /// Adds the selections of one sweep to the window counters.
  void record_sweep(const SweepRecord& record);

  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& selection_counts() const {
    return counts_;
  }
  std::int64_t updates_per_coordinate() const { return updates_; }
  std::int64_t attempt_index() const { return attempt_; }
  double probability() const { return probability_; }
  std::int64_t beta() const { return beta_; }
  const ScaleBounds& bounds() const { return bounds_; }

  /// Test hook: overwrite the current window's counters.
  void set_window(const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts,
                  std::int64_t updates);

private:
  friend AdaptOutcome maybe_adapt(AdaptationState&, ScaleGrid&, std::int64_t);

  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
  std::int64_t updates_ = 0;
  std::int64_t attempt_ = 1;
  double probability_ = 1.0;
  std::int64_t beta_;
  ScaleBounds bounds_;
  RngStream coin_;
};

/// Applies the four threshold branches to one row given its window counts.
/// Returns the fired branches (iteration field left 0).
std::vector<AdaptationEvent> adapt_row(ScaleGrid& grid, Index k,
                                       const Eigen::Matrix<std::int64_t, 1, Eigen::Dynamic>& counts,
                                       const ScaleBounds& bounds);

// ---------------------------------------------------------------------------

/// Acceptance-rate targeting for component-wise Metropolis.
///
/// After every batch, log sigma_k moves up by delta_a when the batch acceptance
/// rate exceeds the target and down otherwise (a tie moves down), with
/// delta_a = min(0.05, a^(-1/2)) for batch number a.
struct AcmhState {
  Eigen::VectorXi acceptance_counts;
  std::int64_t batch_size = 100;
  std::int64_t batch_index = 1;
  std::int64_t sweeps_in_batch = 0;
  double target_rate = 0.44;
  ScaleBounds bounds;

  explicit AcmhState(Index dim) : acceptance_counts(Eigen::VectorXi::Zero(dim)) {}

  /// Records one CMH sweep; when a batch completes, adapts `scales` and returns true.
  bool record_sweep(const SweepRecord& record, Eigen::VectorXd& scales);
};

double acmh_step_size(std::int64_t a);

Eigen::VectorXd acmh_update(const AcmhState& state, const Eigen::VectorXd& scales,
                            const Eigen::VectorXd& batch_rates);

}  // namespace acmtm
