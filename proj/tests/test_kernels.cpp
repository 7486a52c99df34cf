#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "acmtm/diagnostics.hpp"
#include "acmtm/kernels.hpp"

using namespace acmtm;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

TargetModel standard_normal(double half_width = kDefaultSupportHalfWidth) {
  GaussianMixtureSpec s;
  s.weights = Eigen::VectorXd::Ones(1);
  s.means = Eigen::MatrixXd::Zero(1, 1);
  s.variances = Eigen::MatrixXd::Ones(1, 1);
  return make_gaussian_mixture(s, SupportBox::symmetric(1, half_width));
}

// Selection counts over a CMTM run, all sweeps.
Eigen::MatrixXd selection_frequencies(const TargetModel& t, const ScaleGrid& grid, double alpha,
                                      int sweeps, std::uint64_t seed) {
  KernelConfig cfg;
  cfg.alpha = alpha;
  auto rng = make_stream(seed, 0);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(t.dim(), grid.proposals());
  StateVector x = t.initial_state();
  for (int i = 0; i < sweeps; ++i) {
    auto rec = cmtm_sweep(t, x, grid, cfg, rng);
    for (const auto& u : rec.updates)
      if (u.selected_proposal != kNoSelection) counts(u.coordinate, u.selected_proposal) += 1;
    x = rec.state_after;
  }
  return counts / static_cast<double>(sweeps);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scale grid construction") {
  const auto g = ScaleGrid::generic(3, 20);
  CHECK(g.dim() == 3);
  CHECK(g.proposals() == 20);
  CHECK(g(0, 0) == std::ldexp(1.0, -10));
  CHECK(g(2, 19) == std::ldexp(1.0, 9));
  CHECK(ScaleGrid::generic(1, 5).row(0) == Eigen::RowVectorXd::LinSpaced(5, -2, 2).unaryExpr([](double e) { return std::exp2(e); }));

  Eigen::MatrixXd raw(1, 4);
  raw << 2.0, 1.0, 2.0, 2.0;
  const ScaleGrid tied(raw);
  CHECK(tied(0, 0) == 1.0);
  CHECK(tied(0, 1) == 2.0);
  CHECK(tied(0, 2) > tied(0, 1));
  CHECK(tied(0, 3) > tied(0, 2));
  CHECK(tied(0, 3) == doctest::Approx(2.0 * (1 + 1e-9) * (1 + 1e-9)).epsilon(1e-15));

  raw << 1.0, -1.0, 2.0, 3.0;
  CHECK_THROWS_AS(ScaleGrid{raw}, InvalidParameter);
  ScaleGrid g2 = ScaleGrid::generic(2, 3);
  CHECK_THROWS_AS(g2.set_row(0, Eigen::RowVector3d(1.0, 1.0, 2.0)), InvalidParameter);
  g2.set_row(1, Eigen::RowVector3d(1.0, 3.0, 9.0));
  CHECK(g2(1, 2) == 9.0);
}

TEST_CASE("log weight") {
  const auto t = standard_normal();
  const StateVector x = StateVector::Zero(1);
  CHECK(cmtm_log_weight(t, x, 0, 0.0, 2.9) == kNegInf);
  CHECK(cmtm_log_weight(t, x, 0, 1.0, 2.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi) - 0.5).epsilon(1e-15));
  CHECK(cmtm_log_weight(t, x, 0, 3.0, 2.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi) - 4.5 + 2.0 * std::log(3.0)).epsilon(1e-15));
  CHECK(cmtm_log_weight(t, x, 0, 2e6, 2.9) == kNegInf);
}

TEST_CASE("m = 1 reduces to random-walk Metropolis") {
  const auto t = standard_normal();
  KernelConfig cfg;
  const Eigen::RowVectorXd scale = Eigen::RowVectorXd::Constant(1, 1.7);

  for (double alpha : {0.5, 2.9, 7.0}) {
    cfg.alpha = alpha;
    auto rng = make_stream(101, 0);
    auto oracle_rng = make_stream(101, 0);
    StateVector x = StateVector::Zero(1);
    double oracle_x = 0.0;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto rec = cmtm_coordinate_update(t, x, 0, scale, cfg, rng);
      // Independent Metropolis on the same stream.
      const double y = oracle_x + 1.7 * oracle_rng.standard_normal();
      const double ratio = std::min(1.0, std::exp(-0.5 * y * y + 0.5 * oracle_x * oracle_x));
      const bool accept = std::log(oracle_rng.uniform()) < std::log(ratio);
      REQUIRE(rec.proposal == y);
      worst = std::max(worst, std::abs(rec.acceptance_probability - ratio));
      REQUIRE(rec.accepted == accept);
      if (accept) oracle_x = y;
      REQUIRE(x[0] == oracle_x);
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("all candidates outside the support are rejected without selection") {
  const auto t = standard_normal(1e-3);
  StateVector x = StateVector::Zero(1);
  auto rng = make_stream(5, 0);
  KernelConfig cfg;
  const Eigen::RowVectorXd scales = Eigen::RowVector3d(1e6, 2e6, 4e6);
  for (int i = 0; i < 100; ++i) {
    const auto rec = cmtm_coordinate_update(t, x, 0, scales, cfg, rng);
    REQUIRE_FALSE(rec.accepted);
    REQUIRE(rec.selected_proposal == kNoSelection);
    REQUIRE(x[0] == 0.0);
  }
}

TEST_CASE("reverse set contains the current point") {
  const auto t = make_gaussian_mixture(mixture_4d_spec());
  KernelConfig cfg;
  cfg.keep_weights = true;
  auto rng = make_stream(8, 0);
  StateVector x = t.initial_state();
  const auto grid = ScaleGrid::generic(4, 5);
  for (int i = 0; i < 200; ++i) {
    const StateVector before = x;
    const auto rec = cmtm_coordinate_update(t, x, i % 4, grid.row(i % 4), cfg, rng);
    REQUIRE(rec.selected_proposal != kNoSelection);
    const double expected =
        cmtm_log_weight(t, [&] { StateVector z = before; z[i % 4] = rec.proposal; return z; }(), i % 4,
                        before[i % 4], cfg.alpha);
    REQUIRE(rec.reverse_logweights[rec.selected_proposal] == doctest::Approx(expected).epsilon(1e-12));
    REQUIRE(rec.acceptance_probability >= 0.0);
    REQUIRE(rec.acceptance_probability <= 1.0);
  }
}

TEST_CASE("sweep records and replay") {
  const auto t = make_gaussian_mixture(mixture_4d_spec());
  const auto grid = ScaleGrid::generic(4, 20);
  KernelConfig cfg;
  auto r1 = make_stream(77, 2);
  auto r2 = make_stream(77, 2);
  StateVector x1 = t.initial_state(), x2 = x1;
  for (int i = 0; i < 200; ++i) {
    const auto a = cmtm_sweep(t, x1, grid, cfg, r1);
    const auto b = cmtm_sweep(t, x2, grid, cfg, r2);
    REQUIRE(a.updates.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      REQUIRE(a.updates[k].coordinate == static_cast<Index>(k));
      REQUIRE(a.updates[k].selected_proposal == b.updates[k].selected_proposal);
      REQUIRE(a.updates[k].accepted == b.updates[k].accepted);
      REQUIRE(a.updates[k].jump == b.updates[k].jump);
    }
    REQUIRE(a.state_after == b.state_after);
    x1 = a.state_after;
    x2 = b.state_after;
  }
}

TEST_CASE("d = 1 sweep equals one coordinate update") {
  const auto t = standard_normal();
  const auto grid = ScaleGrid::generic(1, 4);
  KernelConfig cfg;
  auto r1 = make_stream(3, 0), r2 = make_stream(3, 0);
  StateVector x = StateVector::Constant(1, 0.3);
  const auto sweep = cmtm_sweep(t, x, grid, cfg, r1);
  const auto single = cmtm_coordinate_update(t, x, 0, grid.row(0), cfg, r2);
  CHECK(sweep.state_after == x);
  CHECK(sweep.updates[0].selected_proposal == single.selected_proposal);
}

TEST_CASE("zero-density start is refused") {
  const auto t = standard_normal(1.0);
  auto rng = make_stream(1, 0);
  KernelConfig cfg;
  CHECK_THROWS_AS(cmtm_sweep(t, StateVector::Constant(1, 5.0), ScaleGrid::generic(1, 2), cfg, rng),
                  InvalidParameter);
}

TEST_CASE("cmh acceptance rate matches a brute-force oracle") {
  const auto t = standard_normal();
  auto rng = make_stream(21, 0);
  StateVector x = StateVector::Zero(1);
  const Eigen::VectorXd scales = Eigen::VectorXd::Ones(1);
  int accepted = 0;
  const int n = 100000;
  for (int i = 0; i < 1000; ++i) x = cmh_sweep(t, x, scales, rng).state_after;
  for (int i = 0; i < n; ++i) {
    auto rec = cmh_sweep(t, x, scales, rng);
    accepted += rec.updates[0].accepted;
    x = rec.state_after;
  }
  // E[min(1, pi(y)/pi(x))] with x ~ N(0,1), y = x + Z, estimated by plain Monte Carlo.
  auto o = make_stream(22, 0);
  double oracle = 0.0;
  for (int i = 0; i < 400000; ++i) {
    const double a = o.standard_normal();
    const double b = a + o.standard_normal();
    oracle += std::min(1.0, std::exp(0.5 * (a * a - b * b)));
  }
  oracle /= 400000;
  CHECK(std::abs(oracle - 2.0 / std::numbers::pi * std::atan(2.0)) < 0.005);
  CHECK(std::abs(accepted / double(n) - oracle) < 0.01);
}

TEST_CASE("cmh always accepts uphill and rejects zero density") {
  const auto t = standard_normal(2.0);
  auto rng = make_stream(2, 0);
  for (int i = 0; i < 2000; ++i) {
    const StateVector x = StateVector::Constant(1, 1.9);
    const auto rec = cmh_sweep(t, x, Eigen::VectorXd::Constant(1, 3.0), rng).updates[0];
    if (std::abs(rec.proposal) < 1.9) REQUIRE(rec.accepted);
    if (std::abs(rec.proposal) > 2.0) REQUIRE_FALSE(rec.accepted);
  }
}

TEST_CASE("mixture cmh") {
  const auto t = make_gaussian_mixture(mixture_4d_spec());

  SUBCASE("one scale equals cmh") {
    Eigen::MatrixXd one(4, 1);
    one << 0.5, 1.0, 2.0, 0.1;
    auto r1 = make_stream(4, 0), r2 = make_stream(4, 0);
    StateVector x1 = t.initial_state(), x2 = x1;
    for (int i = 0; i < 500; ++i) {
      x1 = mixture_cmh_sweep(t, x1, ScaleGrid(one), r1).state_after;
      x2 = cmh_sweep(t, x2, one.col(0), r2).state_after;
      REQUIRE(x1 == x2);
    }
  }

  SUBCASE("uniform index choice and per-scale acceptance") {
    const auto grid = ScaleGrid::generic(4, 20);
    auto rng = make_stream(12, 0);
    StateVector x = t.initial_state();
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(4, 20), acc = sel;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      auto rec = mixture_cmh_sweep(t, x, grid, rng);
      for (const auto& u : rec.updates) {
        sel(u.coordinate, u.selected_proposal) += 1;
        acc(u.coordinate, u.selected_proposal) += u.accepted;
      }
      x = rec.state_after;
    }
    // multinomial sd ~ 0.0007 per cell
    CHECK(((sel / n).array() - 0.05).abs().maxCoeff() < 0.004);
    CHECK(acc(0, 0) / sel(0, 0) == doctest::Approx(1.00).epsilon(0.05));
    CHECK(std::abs(acc(0, 19) / sel(0, 19) - 0.01) < 0.05);
  }
}

TEST_CASE("coordinate 1 favours sigma = 4") {
  const auto t = make_gaussian_mixture(mixture_4d_spec());
  const auto freq = selection_frequencies(t, ScaleGrid::generic(4, 20), 2.9, 10000, 31);
  CHECK(std::abs(freq(0, 12) - 0.26) < 0.05);
  for (Index k = 0; k < 4; ++k) CHECK(freq.row(k).sum() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("larger alpha favours the largest scale") {
  const auto t = make_gaussian_mixture(mixture_2d_spec());
  const auto grid = ScaleGrid::uniform_rows(2, Eigen::Vector<double, 5>(1, 2, 4, 8, 16));
  const auto low = selection_frequencies(t, grid, 0.1, 100000, 41);
  const auto high = selection_frequencies(t, grid, 15.0, 100000, 41);
  for (Index k = 0; k < 2; ++k) CHECK(high(k, 4) > low(k, 4) + 0.05);
}

}
