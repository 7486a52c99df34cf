#include "acmtm/targets.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace acmtm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

SupportBox SupportBox::symmetric(Index dim, double half_width) {
  if (dim < 1) throw InvalidParameter("support box dimension must be positive");
  if (!(half_width > 0.0)) throw InvalidParameter("support box half-width must be positive");
  return {Eigen::VectorXd::Constant(dim, -half_width), Eigen::VectorXd::Constant(dim, half_width)};
}

bool SupportBox::contains(const StateVector& x) const {
  return x.size() == dim() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

TargetModel::TargetModel(std::string label, SupportBox support, LogDensityFn log_density,
                         StateVector initial_state)
    : label_(std::move(label)),
      support_(std::move(support)),
      log_density_(std::move(log_density)),
      initial_state_(std::move(initial_state)) {
  if (support_.dim() < 1 || support_.upper.size() != support_.dim())
    throw InvalidParameter("target: malformed support box");
  if ((support_.lower.array() >= support_.upper.array()).any())
    throw InvalidParameter("target: support box must have lower < upper on every coordinate");
  if (!log_density_) throw InvalidParameter("target: empty log-density");
  if (initial_state_.size() != support_.dim())
    throw InvalidParameter("target: initial state has wrong dimension");
}

double TargetModel::log_density(const StateVector& x) const {
  if (x.size() != dim()) throw InvalidParameter("log_density: state has wrong dimension");
  if (!x.allFinite() || !support_.contains(x)) return kNegInf;
  const double value = log_density_(x);
  return std::isnan(value) ? kNegInf : value;
}

double log_density_with_coordinate(const TargetModel& target, const StateVector& x, Index k,
                                   double value) {
  if (k < 0 || k >= target.dim()) throw InvalidParameter("coordinate index out of range");
  StateVector y = x;
  y[k] = value;
  return target.log_density(y);
}

// ---------------------------------------------------------------------------

void GaussianMixtureSpec::validate() const {
  if (components() < 1) throw InvalidParameter("mixture: at least one component required");
  if (dim() < 1) throw InvalidParameter("mixture: dimension must be positive");
  if (means.rows() != components() || variances.rows() != components() ||
      variances.cols() != dim())
    throw InvalidParameter("mixture: weights, means and variances disagree in shape");
  if ((weights.array() <= 0.0).any()) throw InvalidParameter("mixture: weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12)
    throw InvalidParameter("mixture: weights must sum to 1");
  if (!means.allFinite()) throw InvalidParameter("mixture: means must be finite");
  if (!variances.allFinite() || (variances.array() <= 0.0).any())
    throw InvalidParameter("mixture: variances must be finite and strictly positive");
}

GaussianMixtureSpec mixture_2d_spec() {
  GaussianMixtureSpec s;
  s.weights = Eigen::Vector2d(0.5, 0.5);
  s.means.resize(2, 2);
  s.means << 5, 0,
             15, 0;
  s.variances.resize(2, 2);
  s.variances << 6.25, 6.25,
                 6.25, 0.25;
  return s;
}

GaussianMixtureSpec mixture_4d_spec() {
  GaussianMixtureSpec s;
  s.weights = Eigen::Vector2d(0.5, 0.5);
  s.means.resize(2, 4);
  s.means << 5, 5, 0, 0,
             15, 15, 0, 0;
  s.variances.resize(2, 4);
  s.variances << 6.25, 6.25, 6.25, 0.01,
                 6.25, 6.25, 0.25, 0.01;
  return s;
}

GaussianMixtureSpec mixture_20d_spec() {
  GaussianMixtureSpec s;
  s.weights = Eigen::Vector2d(0.5, 0.5);
  s.means.resize(2, 20);
  s.means << 5, 5, 0, 0, 0, 0, 10, 15, 0, 0, 5, 5, 0, 0, 0, 0, 10, 15, 0, 0,
             10, 10, 0, 0, 0, 0, 7, 20, 0, 0, 10, 10, 0, 0, 0, 0, 7, 20, 0, 0;
  s.variances.resize(2, 20);
  s.variances << 16, 16, 0.25, 4, 1, 0.01, 9, 16, 9, 0.01,
                 16, 16, 0.25, 4, 1, 0.01, 9, 16, 9, 0.01,
                 16, 16, 6.25, 4, 1, 4.41, 9, 16, 0.25, 0.01,
                 16, 16, 6.25, 4, 1, 4.41, 9, 16, 0.25, 0.01;
  return s;
}

TargetModel make_gaussian_mixture(const GaussianMixtureSpec& spec, SupportBox support) {
  spec.validate();
  if (support.dim() != spec.dim()) throw InvalidParameter("mixture: support box dimension mismatch");

  // Per-component constant: log w_c - 1/2 sum_k log(2 pi v_ck).
  const Eigen::ArrayXXd inv_var = spec.variances.array().inverse();
  Eigen::VectorXd offset(spec.components());
  for (Index c = 0; c < spec.components(); ++c)
    offset[c] = std::log(spec.weights[c]) -
                0.5 * (2.0 * std::numbers::pi * spec.variances.row(c).array()).log().sum();

  auto fn = [means = spec.means, inv_var, offset](const StateVector& x) {
    // Streaming log-sum-exp over components; avoids a temporary per call.
    double max_term = kNegInf;
    double scaled_sum = 0.0;
    for (Index c = 0; c < means.rows(); ++c) {
      const auto z = x.transpose().array() - means.row(c).array();
      const double term = offset[c] - 0.5 * (z.square() * inv_var.row(c)).sum();
      if (term > max_term) {
        scaled_sum = scaled_sum * std::exp(max_term - term) + 1.0;
        max_term = term;
      } else {
        scaled_sum += std::exp(term - max_term);
      }
    }
    return max_term + std::log(scaled_sum);
  };
  const std::string label = "gaussian_mixture_" + std::to_string(spec.dim()) + "d";
  return TargetModel(label, std::move(support), fn, spec.means.row(0).transpose());
}

// ---------------------------------------------------------------------------

TargetModel make_banana(const BananaSpec& spec, SupportBox support) {
  if (spec.dim < 2) throw InvalidParameter("banana: dimension must be at least 2");
  if (!(spec.B >= 0.0) || !std::isfinite(spec.B))
    throw InvalidParameter("banana: nonlinearity B must be finite and non-negative");
  if (support.dim() != spec.dim) throw InvalidParameter("banana: support box dimension mismatch");

  const double B = spec.B;
  auto fn = [B](const StateVector& x) {
    const double x1 = x[0];
    const double bent = x[1] + B * x1 * x1 - 100.0 * B;
    return -x1 * x1 / 200.0 - 0.5 * bent * bent - 0.5 * x.tail(x.size() - 2).squaredNorm();
  };
  return TargetModel("banana", std::move(support), fn, StateVector::Zero(spec.dim));
}

// ---------------------------------------------------------------------------

void VcmSpec::validate() const {
  if (data.rows() < 1 || data.cols() < 1) throw InvalidParameter("vcm: empty data matrix");
  if (!data.allFinite()) throw InvalidParameter("vcm: data must be finite");
  for (double h : {a1, b1, a2, b2, sigma0_sq})
    if (!(h > 0.0) || !std::isfinite(h))
      throw InvalidParameter("vcm: a1, b1, a2, b2 and sigma0_sq must be positive");
  if (!std::isfinite(mu0)) throw InvalidParameter("vcm: mu0 must be finite");
}

Eigen::MatrixXd dyestuff_data() {
  Eigen::MatrixXd y(6, 5);
  y << 1545, 1440, 1440, 1520, 1580,
       1540, 1555, 1490, 1560, 1495,
       1595, 1550, 1605, 1510, 1560,
       1445, 1440, 1595, 1465, 1545,
       1595, 1630, 1515, 1635, 1625,
       1520, 1455, 1450, 1480, 1445;
  return y;
}

Eigen::MatrixXd load_matrix_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open data file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string token;
    while (ls >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size())
        throw InvalidParameter(path + ":" + std::to_string(line_no) + ": not a number: " + token);
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidParameter(path + ":" + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidParameter("data file has no rows: " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

VcmSpec dyestuff_vcm_spec() {
  VcmSpec s;
  s.data = dyestuff_data();
  return s;
}

TargetModel make_vcm(const VcmSpec& spec, SupportBox support) {
  spec.validate();
  if (support.dim() != spec.dim()) throw InvalidParameter("vcm: support box dimension mismatch");

  auto fn = [spec](const StateVector& x) {
    const double var_theta = x[0];
    const double var_e = x[1];
    if (var_theta <= 0.0 || var_e <= 0.0) return kNegInf;
    const double mu = x[2];
    const Index K = spec.data.rows();
    const Index J = spec.data.cols();
    const auto theta = x.segment(3, K);
    const double log_vt = std::log(var_theta);
    const double log_ve = std::log(var_e);

    double lp = -(spec.a1 + 1.0) * log_vt - spec.b1 / var_theta;
    lp += -(spec.a2 + 1.0) * log_ve - spec.b2 / var_e;
    lp += -(mu - spec.mu0) * (mu - spec.mu0) / (2.0 * spec.sigma0_sq);
    lp += -(theta.array() - mu).square().sum() / (2.0 * var_theta) - 0.5 * K * log_vt;
    double sse = 0.0;
    for (Index j = 0; j < J; ++j) sse += (spec.data.col(j) - theta).squaredNorm();
    lp += -sse / (2.0 * var_e) - 0.5 * K * J * log_ve;
    return lp;
  };

  StateVector init(spec.dim());
  init[0] = spec.b1 / (spec.a1 + 1.0);
  init[1] = spec.b2 / (spec.a2 + 1.0);
  init[2] = spec.data.mean();
  init.tail(spec.batches()) = spec.data.rowwise().mean();
  return TargetModel("vcm", std::move(support), fn, init);
}

}  // namespace acmtm
