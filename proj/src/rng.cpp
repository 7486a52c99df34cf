#include "acmtm/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace acmtm {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {}

void RngStream::refill() {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32_10(ctr, key);
  buffered_ = 4;
  ++block_;
}

std::uint64_t RngStream::next_u64() {
  if (buffered_ < 2) refill();
  const std::uint64_t lo = buffer_[4 - buffered_];
  const std::uint64_t hi = buffer_[5 - buffered_];
  buffered_ -= 2;
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  // 53 random bits, offset by half an ulp so 0 is never returned.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw InvalidParameter("uniform_index: n must be positive");
  const auto j = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return j < n ? j : n - 1;
}

double RngStream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double draw_normal(RngStream& rng, double mean, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw InvalidParameter("draw_normal: sigma must be finite and non-negative");
  if (sigma == 0.0) return mean;
  return mean + sigma * rng.standard_normal();
}

std::size_t draw_categorical_logweights(RngStream& rng, std::span<const double> logw) {
  if (logw.empty()) throw InvalidParameter("draw_categorical_logweights: empty weight vector");
  double max_w = -std::numeric_limits<double>::infinity();
  for (double w : logw) {
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
      throw InvalidParameter("draw_categorical_logweights: NaN or +inf log-weight");
    if (w > max_w) max_w = w;
  }
  if (max_w == -std::numeric_limits<double>::infinity()) throw NoSelectableCandidate();

  double total = 0.0;
  for (double w : logw) total += std::exp(w - max_w);

  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < logw.size(); ++j) {
    const double p = std::exp(logw[j] - max_w);
    if (p <= 0.0) continue;
    cumulative += p;
    last_positive = j;
    if (u < cumulative) return j;
  }
  // Rounding can leave u marginally above the accumulated total.
  return last_positive;
}

}  // namespace acmtm
