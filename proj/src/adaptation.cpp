#include "acmtm/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acmtm {

void ScaleBounds::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(upper) || !(epsilon < upper))
    throw InvalidParameter("scale bounds must satisfy 0 < epsilon < L < inf");
}

double adaptation_probability(std::int64_t a) {
  if (a < 1) throw InvalidParameter("adaptation attempt index must be >= 1");
  const double ad = static_cast<double>(a);
  return std::max(std::pow(0.99, ad - 1.0), 1.0 / std::sqrt(ad));
}

Eigen::RowVectorXd respace_log2(double sigma_min, double sigma_max, Index m) {
  if (!(sigma_min > 0.0) || !(sigma_max > 0.0) || !std::isfinite(sigma_max))
    throw InvalidParameter("respace_log2: scales must be finite and positive");
  if (sigma_min > sigma_max) throw InvalidParameter("respace_log2: sigma_min exceeds sigma_max");
  if (m < 1) throw InvalidParameter("respace_log2: m must be positive");
  Eigen::RowVectorXd out(m);
  out[0] = sigma_min;
  if (m == 1) return out;
  const double lo = std::log2(sigma_min);
  const double span = std::log2(sigma_max) - lo;
  for (Index j = 1; j < m - 1; ++j)
    out[j] = std::exp2(lo + span * static_cast<double>(j) / static_cast<double>(m - 1));
  out[m - 1] = sigma_max;
  return out;
}

std::string_view to_string(AdaptBranch b) {
  switch (b) {
    case AdaptBranch::DoubleLargest: return "double_max";
    case AdaptBranch::HalveLargest: return "halve_max";
    case AdaptBranch::HalveSmallest: return "halve_min";
    case AdaptBranch::DoubleSmallest: return "double_min";
  }
  return "unknown";
}

namespace {

// Respaces between the (clamped) endpoints and keeps the row strictly ascending.
void rebuild_row(ScaleGrid& grid, Index k, double lo, double hi, const ScaleBounds& bounds) {
  lo = bounds.clamp(lo);
  hi = bounds.clamp(hi);
  Eigen::RowVectorXd row = respace_log2(lo, hi, grid.proposals());
  for (Index j = 0; j < row.size(); ++j) {
    row[j] = bounds.clamp(row[j]);
    if (j > 0 && row[j] <= row[j - 1])
      row[j] = std::nextafter(row[j - 1], std::numeric_limits<double>::infinity());
  }
  grid.set_row(k, row);
}

}  // namespace

std::vector<AdaptationEvent> adapt_row(ScaleGrid& grid, Index k,
                                       const Eigen::Matrix<std::int64_t, 1, Eigen::Dynamic>& counts,
                                       const ScaleBounds& bounds) {
  const Index m = grid.proposals();
  if (counts.size() != m) throw InvalidParameter("adapt_row: counts length differs from m");
  std::vector<AdaptationEvent> events;
  const std::int64_t total = counts.sum();
  if (total == 0 || m < 2) return events;

  // rate > 2/m  <=>  m * count > 2 * total;  rate < 1/(2m)  <=>  2m * count < total.
  auto over = [&](Index j) { return m * counts[j] > 2 * total; };
  auto under = [&](Index j) { return 2 * m * counts[j] < total; };

  auto fire = [&](AdaptBranch branch, double new_lo, double new_hi) {
    AdaptationEvent ev;
    ev.coordinate = k;
    ev.branch = branch;
    ev.sigma_min_old = grid(k, 0);
    ev.sigma_max_old = grid(k, m - 1);
    rebuild_row(grid, k, new_lo, new_hi, bounds);
    ev.sigma_min_new = grid(k, 0);
    ev.sigma_max_new = grid(k, m - 1);
    events.push_back(ev);
  };

  const Index last = m - 1;
  if (over(last)) {
    fire(AdaptBranch::DoubleLargest, grid(k, 0), 2.0 * grid(k, last));
  } else if (under(last) && grid(k, 0) < grid(k, last) / 2.0) {
    fire(AdaptBranch::HalveLargest, grid(k, 0), grid(k, last) / 2.0);
  }

  if (over(0)) {
    fire(AdaptBranch::HalveSmallest, grid(k, 0) / 2.0, grid(k, last));
  } else if (under(0) && 2.0 * grid(k, 0) < grid(k, last)) {
    fire(AdaptBranch::DoubleSmallest, 2.0 * grid(k, 0), grid(k, last));
  }
  return events;
}

// ---------------------------------------------------------------------------

AdaptationState::AdaptationState(Index dim, Index proposals, RngStream coin, std::int64_t beta,
                                 ScaleBounds bounds)
    : counts_(decltype(counts_)::Zero(dim, proposals)),
      beta_(beta),
      bounds_(bounds),
      coin_(std::move(coin)) {
  if (dim < 1 || proposals < 1) throw InvalidParameter("adaptation: dimension and m must be positive");
  if (beta < 1) throw InvalidParameter("adaptation: beta must be positive");
  bounds_.validate();
}

void AdaptationState::record_sweep(const SweepRecord& record) {
  if (static_cast<Index>(record.updates.size()) != counts_.rows())
    throw InvalidParameter("adaptation: sweep record dimension mismatch");
  for (const auto& u : record.updates) {
    if (u.selected_proposal == kNoSelection) continue;
    if (u.selected_proposal < 0 || u.selected_proposal >= counts_.cols())
      throw InvalidParameter("adaptation: selected proposal index out of range");
    ++counts_(u.coordinate, u.selected_proposal);
  }
  ++updates_;
}

void AdaptationState::set_window(
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts,
    std::int64_t updates) {
  if (counts.rows() != counts_.rows() || counts.cols() != counts_.cols())
    throw InvalidParameter("adaptation: window counts shape mismatch");
  counts_ = counts;
  updates_ = updates;
}

AdaptOutcome maybe_adapt(AdaptationState& state, ScaleGrid& grid, std::int64_t iteration) {
  AdaptOutcome out;
  if (iteration <= 0 || iteration % state.beta_ != 0) return out;
  if (grid.dim() != state.counts_.rows() || grid.proposals() != state.counts_.cols())
    throw InvalidParameter("adaptation: grid shape does not match controller");

  out.attempted = true;
  out.adapted = state.coin_.uniform() <= state.probability_;
  if (out.adapted) {
    for (Index k = 0; k < grid.dim(); ++k) {
      for (auto ev : adapt_row(grid, k, state.counts_.row(k), state.bounds_)) {
        ev.iteration = iteration;
        out.events.push_back(ev);
      }
    }
  }
  state.counts_.setZero();
  state.updates_ = 0;
  ++state.attempt_;
  state.probability_ = adaptation_probability(state.attempt_);
  return out;
}

// ---------------------------------------------------------------------------

double acmh_step_size(std::int64_t a) {
  if (a < 1) throw InvalidParameter("acmh: batch index must be >= 1");
  return std::min(0.05, 1.0 / std::sqrt(static_cast<double>(a)));
}

Eigen::VectorXd acmh_update(const AcmhState& state, const Eigen::VectorXd& scales,
                            const Eigen::VectorXd& batch_rates) {
  if (scales.size() != batch_rates.size()) throw InvalidParameter("acmh: rates/scales size mismatch");
  const double delta = acmh_step_size(state.batch_index);
  Eigen::VectorXd out(scales.size());
  for (Index k = 0; k < scales.size(); ++k) {
    const double r = batch_rates[k];
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidParameter("acmh: acceptance rate outside [0, 1]");
    const double step = r > state.target_rate ? delta : -delta;
    out[k] = state.bounds.clamp(scales[k] * std::exp(step));
  }
  return out;
}

bool AcmhState::record_sweep(const SweepRecord& record, Eigen::VectorXd& scales) {
  if (static_cast<Index>(record.updates.size()) != acceptance_counts.size())
    throw InvalidParameter("acmh: sweep record dimension mismatch");
  for (const auto& u : record.updates)
    if (u.accepted) ++acceptance_counts[u.coordinate];
  if (++sweeps_in_batch < batch_size) return false;
  const Eigen::VectorXd rates =
      acceptance_counts.cast<double>() / static_cast<double>(batch_size);
  scales = acmh_update(*this, scales, rates);
  acceptance_counts.setZero();
  sweeps_in_batch = 0;
  ++batch_index;
  return true;
}

}  // namespace acmtm
