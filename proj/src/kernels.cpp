#include "acmtm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "acmtm/math.hpp"

namespace acmtm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTieNudge = 1.0 + 1e-9;

void check_scales(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  if (row.size() < 1) throw InvalidParameter("scale row must not be empty");
  if (!row.allFinite() || (row.array() <= 0.0).any())
    throw InvalidParameter("proposal scales must be finite and positive");
}

double weight_at(double log_density_at_y, double y, double xk, double alpha) {
  if (log_density_at_y == kNegInf || y == xk) return kNegInf;
  return log_density_at_y + alpha * std::log(std::abs(y - xk));
}

// Random-walk Metropolis on coordinate k; `lp` carries log pi(x) across calls.
CoordinateUpdateRecord metropolis_coordinate(const TargetModel& target, StateVector& x,
                                             double& lp, Index k, double sigma, int label,
                                             RngStream& rng) {
  CoordinateUpdateRecord rec;
  rec.coordinate = k;
  rec.selected_proposal = label;
  rec.from = x[k];
  const double y = draw_normal(rng, x[k], sigma);
  rec.proposal = y;

  const double xk = x[k];
  x[k] = y;
  const double lp_y = target.log_density(x);
  const double log_rho = lp_y == kNegInf ? kNegInf : std::min(0.0, lp_y - lp);
  rec.acceptance_probability = std::exp(log_rho);
  if (std::log(rng.uniform()) < log_rho) {
    rec.accepted = true;
    rec.jump = std::abs(y - xk);
    lp = lp_y;
  } else {
    x[k] = xk;
  }
  return rec;
}

CoordinateUpdateRecord cmtm_update_impl(const TargetModel& target, StateVector& x, double& lp,
                                        Index k,
                                        const Eigen::Ref<const Eigen::RowVectorXd>& scales,
                                        const KernelConfig& cfg, RngStream& rng) {
  const Index m = scales.size();
  const double xk = x[k];
  CoordinateUpdateRecord rec;
  rec.coordinate = k;
  rec.from = xk;

  Eigen::VectorXd candidates(m);
  Eigen::VectorXd fwd(m);
  Eigen::VectorXd fwd_lp(m);
  for (Index j = 0; j < m; ++j) {
    candidates[j] = draw_normal(rng, xk, scales[j]);
    x[k] = candidates[j];
    fwd_lp[j] = target.log_density(x);
    fwd[j] = weight_at(fwd_lp[j], candidates[j], xk, cfg.alpha);
  }
  x[k] = xk;
  if (cfg.keep_weights) rec.forward_logweights = fwd;

  if (fwd.maxCoeff() == kNegInf) return rec;  // nothing selectable, reject

  // A single candidate is selected without consuming a draw, so m = 1 walks
  // the same random stream as plain Metropolis.
  const Index s = m == 1 ? 0 : static_cast<Index>(draw_categorical_logweights(rng, fwd));
  const double y = candidates[s];
  rec.selected_proposal = static_cast<int>(s);
  rec.proposal = y;

  Eigen::VectorXd rev(m);
  for (Index j = 0; j < m; ++j) {
    if (j == s) {
      rev[j] = weight_at(lp, xk, y, cfg.alpha);
      continue;
    }
    const double reverse_point = draw_normal(rng, y, scales[j]);
    x[k] = reverse_point;
    rev[j] = weight_at(target.log_density(x), reverse_point, y, cfg.alpha);
  }
  x[k] = xk;
  if (cfg.keep_weights) rec.reverse_logweights = rev;

  const double log_den = log_sum_exp(rev);
  if (log_den == kNegInf)
    throw std::logic_error("cmtm: reverse weights vanished; chain is at a zero-density point");
  const double log_rho = std::min(0.0, log_sum_exp(fwd) - log_den);
  rec.acceptance_probability = std::exp(log_rho);

  if (std::log(rng.uniform()) < log_rho) {
    rec.accepted = true;
    rec.jump = std::abs(y - xk);
    x[k] = y;
    lp = fwd_lp[s];
  }
  return rec;
}

double start_density(const TargetModel& target, const StateVector& x) {
  if (x.size() != target.dim()) throw InvalidParameter("state dimension does not match target");
  const double lp = target.log_density(x);
  if (lp == kNegInf) throw InvalidParameter("chain state has zero target density");
  return lp;
}

}  // namespace

// ---------------------------------------------------------------------------

ScaleGrid::ScaleGrid(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() < 1 || sigma_.cols() < 1) throw InvalidParameter("scale grid must be non-empty");
  for (Index k = 0; k < sigma_.rows(); ++k) {
    check_scales(sigma_.row(k));
    Eigen::RowVectorXd row = sigma_.row(k);
    std::sort(row.data(), row.data() + row.size());
    for (Index j = 1; j < row.size(); ++j)
      if (row[j] <= row[j - 1]) row[j] = row[j - 1] * kTieNudge;
    sigma_.row(k) = row;
  }
}

ScaleGrid ScaleGrid::uniform_rows(Index dim, const Eigen::VectorXd& scales) {
  if (dim < 1) throw InvalidParameter("scale grid dimension must be positive");
  return ScaleGrid(scales.transpose().replicate(dim, 1));
}

ScaleGrid ScaleGrid::generic(Index dim, Index m) {
  if (m < 1) throw InvalidParameter("number of proposals must be positive");
  Eigen::VectorXd scales(m);
  for (Index j = 0; j < m; ++j) scales[j] = std::ldexp(1.0, static_cast<int>(j - m / 2));
  return uniform_rows(dim, scales);
}

void ScaleGrid::set_row(Index k, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  if (k < 0 || k >= dim()) throw InvalidParameter("scale grid row out of range");
  if (row.size() != proposals()) throw InvalidParameter("scale row has wrong length");
  check_scales(row);
  for (Index j = 1; j < row.size(); ++j)
    if (!(row[j] > row[j - 1])) throw InvalidParameter("scale row must be strictly ascending");
  sigma_.row(k) = row;
}

void KernelConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParameter("alpha must be finite and positive");
}

// ---------------------------------------------------------------------------

double cmtm_log_weight(const TargetModel& target, const StateVector& x, Index k, double y,
                       double alpha) {
  return weight_at(log_density_with_coordinate(target, x, k, y), y, x[k], alpha);
}

CoordinateUpdateRecord cmtm_coordinate_update(const TargetModel& target, StateVector& x, Index k,
                                              const Eigen::Ref<const Eigen::RowVectorXd>& scales,
                                              const KernelConfig& cfg, RngStream& rng) {
  if (k < 0 || k >= target.dim()) throw InvalidParameter("coordinate index out of range");
  check_scales(scales);
  double lp = start_density(target, x);
  return cmtm_update_impl(target, x, lp, k, scales, cfg, rng);
}

SweepRecord cmtm_sweep(const TargetModel& target, const StateVector& x, const ScaleGrid& grid,
                       const KernelConfig& cfg, RngStream& rng) {
  if (grid.dim() != target.dim()) throw InvalidParameter("scale grid dimension does not match target");
  SweepRecord out;
  out.state_after = x;
  double lp = start_density(target, out.state_after);
  out.updates.reserve(static_cast<std::size_t>(target.dim()));
  for (Index k = 0; k < target.dim(); ++k)
    out.updates.push_back(cmtm_update_impl(target, out.state_after, lp, k, grid.row(k), cfg, rng));
  return out;
}

SweepRecord cmh_sweep(const TargetModel& target, const StateVector& x,
                      const Eigen::VectorXd& scales, RngStream& rng) {
  if (scales.size() != target.dim()) throw InvalidParameter("one CMH scale per coordinate required");
  check_scales(scales.transpose());
  SweepRecord out;
  out.state_after = x;
  double lp = start_density(target, out.state_after);
  out.updates.reserve(static_cast<std::size_t>(target.dim()));
  for (Index k = 0; k < target.dim(); ++k)
    out.updates.push_back(metropolis_coordinate(target, out.state_after, lp, k, scales[k], 0, rng));
  return out;
}

SweepRecord mixture_cmh_sweep(const TargetModel& target, const StateVector& x,
                              const ScaleGrid& grid, RngStream& rng) {
  if (grid.dim() != target.dim()) throw InvalidParameter("scale grid dimension does not match target");
  const Index m = grid.proposals();
  SweepRecord out;
  out.state_after = x;
  double lp = start_density(target, out.state_after);
  out.updates.reserve(static_cast<std::size_t>(target.dim()));
  for (Index k = 0; k < target.dim(); ++k) {
    const Index j = m == 1 ? 0 : static_cast<Index>(rng.uniform_index(static_cast<std::size_t>(m)));
    out.updates.push_back(metropolis_coordinate(target, out.state_after, lp, k, grid(k, j),
                                                static_cast<int>(j), rng));
  }
  return out;
}

}  // namespace acmtm
