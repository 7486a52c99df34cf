#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "acmtm/rng.hpp"

using namespace acmtm;

TEST_SUITE("rng") {

TEST_CASE("philox known answers") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same seed and stream replay") {
  auto a = make_stream(42, 0);
  auto b = make_stream(42, 0);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());
  for (int i = 0; i < 100; ++i) REQUIRE(a.standard_normal() == b.standard_normal());
}

TEST_CASE("different seeds differ, pinned first draws") {
  auto a = make_stream(42, 0);
  auto b = make_stream(43, 0);
  const std::uint64_t ua = a.next_u64();
  const std::uint64_t ub = b.next_u64();
  CHECK(ua != ub);
  CHECK(ua == 0x77f5493b9ceaf053ULL);
  CHECK(ub == 0x48ef83771f7baeecULL);
}

TEST_CASE("distinct streams are uncorrelated") {
  auto a = make_stream(42, 0);
  auto b = make_stream(42, 1);
  const int n = 10000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sa += x; sb += y; sab += x * y; saa += x * x; sbb += y * y;
  }
  const double cov = sab / n - sa / n * sb / n;
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("uniform stays in the open unit interval") {
  auto r = make_stream(7, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("uniform_index covers its range evenly") {
  auto r = make_stream(5, 0);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c / double(n) - 1.0 / 7.0) < 0.01);
}

TEST_CASE("draw_normal moments") {
  auto r = make_stream(11, 0);
  CHECK(draw_normal(r, 5.0, 0.0) == 5.0);

  auto moments = [&](double sigma) {
    const int n = 100000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
      const double z = draw_normal(r, 0.0, sigma);
      s += z;
      ss += z * z;
    }
    const double mean = s / n;
    return std::pair{mean, ss / n - mean * mean};
  };
  const auto [m1, v1] = moments(1.0);
  CHECK(std::abs(m1) < 0.02);
  CHECK(std::abs(v1 - 1.0) < 0.03);
  const auto [m2, v2] = moments(2.0);
  CHECK(std::abs(m2) < 0.04);
  CHECK(std::abs(v2 - 4.0) < 0.12);

  CHECK_THROWS_AS(draw_normal(r, 0.0, -1.0), InvalidParameter);
  CHECK_THROWS_AS(draw_normal(r, 0.0, std::numeric_limits<double>::infinity()), InvalidParameter);
  CHECK_THROWS_AS(draw_normal(r, 0.0, std::nan("")), InvalidParameter);
}

TEST_CASE("categorical draws") {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  auto r = make_stream(3, 0);

  SUBCASE("single finite weight") {
    const std::vector<double> w{ninf, 0.0, ninf};
    for (int i = 0; i < 1000; ++i) REQUIRE(draw_categorical_logweights(r, w) == 1);
  }
  SUBCASE("equal weights") {
    const std::vector<double> w{0, 0, 0, 0};
    std::vector<int> c(4, 0);
    for (int i = 0; i < 100000; ++i) ++c[draw_categorical_logweights(r, w)];
    for (int x : c) CHECK(std::abs(x / 1e5 - 0.25) < 0.01);
  }
  SUBCASE("one to three") {
    const std::vector<double> w{std::log(1.0), std::log(3.0)};
    int ones = 0;
    for (int i = 0; i < 100000; ++i) ones += draw_categorical_logweights(r, w) == 1;
    CHECK(std::abs(ones / 1e5 - 0.75) < 0.01);
  }
  SUBCASE("shift invariance at extreme magnitudes") {
    const std::vector<double> base{0.0, std::log(2.0), ninf, std::log(5.0)};
    for (double shift : {-1e5, -800.0, 0.0, 750.0, 1e5}) {
      std::vector<double> w = base;
      for (auto& x : w) x += shift;
      std::vector<int> c(4, 0);
      auto rr = make_stream(9, 0);
      for (int i = 0; i < 40000; ++i) ++c[draw_categorical_logweights(rr, w)];
      CHECK(c[2] == 0);
      CHECK(std::abs(c[0] / 4e4 - 0.125) < 0.01);
      CHECK(std::abs(c[1] / 4e4 - 0.25) < 0.01);
      CHECK(std::abs(c[3] / 4e4 - 0.625) < 0.01);
    }
  }
  SUBCASE("errors") {
    const std::vector<double> none{ninf, ninf};
    CHECK_THROWS_AS(draw_categorical_logweights(r, none), NoSelectableCandidate);
    const std::vector<double> bad{0.0, std::nan("")};
    CHECK_THROWS_AS(draw_categorical_logweights(r, bad), InvalidParameter);
  }
}

}
