#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "acmtm/errors.hpp"

namespace acmtm {

using StateVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Half-width of the default compact support box on every coordinate.
inline constexpr double kDefaultSupportHalfWidth = 1e6;

/// Axis-aligned compact set K. Points outside it have zero target density.
struct SupportBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static SupportBox symmetric(Index dim, double half_width = kDefaultSupportHalfWidth);

  Index dim() const { return lower.size(); }
  bool contains(Index k, double value) const { return value >= lower[k] && value <= upper[k]; }
  bool contains(const StateVector& x) const;
};

/// A target distribution as an unnormalized log-density over R^d restricted to
/// a support box. Immutable once built; evaluation is pure and thread-safe.
///
/// Any callable can back a model, which is the extension hook for targets
/// beyond the built-in families.
class TargetModel {
public:
  using LogDensityFn = std::function<double(const StateVector&)>;

  TargetModel(std::string label, SupportBox support, LogDensityFn log_density,
              StateVector initial_state);

  Index dim() const { return support_.dim(); }
  const std::string& label() const { return label_; }
  const SupportBox& support() const { return support_; }

  /// In-support starting point used when a run does not override it.
  const StateVector& initial_state() const { return initial_state_; }

  /// -inf outside the support box or the model's natural support.
  double log_density(const StateVector& x) const;

private:
  std::string label_;
  SupportBox support_;
  LogDensityFn log_density_;
  StateVector initial_state_;
};

/// log pi(x) with coordinate k replaced by `value`; x is left untouched.
double log_density_with_coordinate(const TargetModel& target, const StateVector& x, Index k,
                                   double value);

// ---------------------------------------------------------------------------
// Gaussian mixtures with diagonal covariances

struct GaussianMixtureSpec {
  Eigen::VectorXd weights;    // one per component, sums to 1
  Eigen::MatrixXd means;      // components x d
  Eigen::MatrixXd variances;  // components x d, strictly positive

  Index components() const { return weights.size(); }
  Index dim() const { return means.cols(); }

  /// Throws InvalidParameter describing the first violated invariant.
  void validate() const;
};

/// 0.5 N((5,0), diag(6.25,6.25)) + 0.5 N((15,0), diag(6.25,0.25)).
GaussianMixtureSpec mixture_2d_spec();
/// 0.5 N((5,5,0,0), diag(6.25,6.25,6.25,0.01)) + 0.5 N((15,15,0,0), diag(6.25,6.25,0.25,0.01)).
GaussianMixtureSpec mixture_4d_spec();
/// The 20-dimensional two-component mixture used for the multimodal benchmark.
GaussianMixtureSpec mixture_20d_spec();

TargetModel make_gaussian_mixture(const GaussianMixtureSpec& spec, SupportBox support);
inline TargetModel make_gaussian_mixture(const GaussianMixtureSpec& spec) {
  return make_gaussian_mixture(spec, SupportBox::symmetric(spec.dim()));
}

// ---------------------------------------------------------------------------
// Banana-shaped density

struct BananaSpec {
  double B = 0.01;
  Index dim = 10;
};

/// log f_B(x) = -x1^2/200 - (x2 + B x1^2 - 100 B)^2 / 2 - sum_{k>=3} x_k^2 / 2, constant dropped.
TargetModel make_banana(const BananaSpec& spec, SupportBox support);
inline TargetModel make_banana(const BananaSpec& spec) {
  return make_banana(spec, SupportBox::symmetric(spec.dim));
}

// ---------------------------------------------------------------------------
// Variance components model

struct VcmSpec {
  Eigen::MatrixXd data;  // batches x samples-per-batch
  double a1 = 300.0;
  double b1 = 1000.0;
  double a2 = 300.0;
  double b2 = 1000.0;
  double mu0 = 0.0;
  double sigma0_sq = 1e10;

  Index batches() const { return data.rows(); }
  Index dim() const { return 3 + data.rows(); }
  void validate() const;
};

/// Dyestuff batch yields in grams, 6 batches x 5 samples.
Eigen::MatrixXd dyestuff_data();

/// Reads a whitespace-separated numeric matrix (one row per line).
Eigen::MatrixXd load_matrix_text(const std::string& path);

/// VcmSpec over the dyestuff data with the concentrated inverse-gamma priors.
VcmSpec dyestuff_vcm_spec();

/// Posterior over (sigma_theta^2, sigma_e^2, mu, theta_1..theta_K).
/// Starts at the prior modes of the variances, the grand mean, and the batch means.
TargetModel make_vcm(const VcmSpec& spec, SupportBox support);
inline TargetModel make_vcm(const VcmSpec& spec) {
  return make_vcm(spec, SupportBox::symmetric(spec.dim()));
}

}  // namespace acmtm
