#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>

namespace acmtm {

/// log(sum(exp(v))) with max-shift. Returns -inf for an all -inf (or empty) input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  if (v.size() == 0) return neg_inf;
  const Scalar m = v.maxCoeff();
  if (m == neg_inf) return neg_inf;
  return m + std::log((v.derived().array() - m).exp().sum());
}

/// Log-density of N(mean, variance) at x.
template <typename Scalar>
Scalar normal_log_pdf(Scalar x, Scalar mean, Scalar variance) {
  const Scalar z = x - mean;
  return Scalar(-0.5) * (std::log(Scalar(2) * std::numbers::pi_v<Scalar> * variance) + z * z / variance);
}

}  // namespace acmtm
