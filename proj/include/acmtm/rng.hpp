#pragma once

#include <array>
#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "acmtm/errors.hpp"

namespace acmtm {

/// Seedable counter-based random stream (Philox4x32-10).
///
/// The key is the 64-bit seed and the upper half of the 128-bit counter is the
/// stream id, so every (seed, stream_id) pair addresses its own sequence and no
/// two streams ever share a block. The generator state is just the block index
/// plus a small output buffer, which keeps a stream cheap to copy and move
/// between workers.
///
/// Normal variates use the Box-Muller transform on two 53-bit uniforms; the
/// second variate of each pair is cached. Every normal therefore costs exactly
/// one uniform pair per two draws, with no rejection loop.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Raw 64-bit output.
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n);

  double standard_normal();

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Philox4x32 with ten rounds; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

inline RngStream make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream(seed, stream_id);
}

/// mean + sigma * Z. Throws InvalidParameter when sigma is negative or not finite.
double draw_normal(RngStream& rng, double mean, double sigma);

/// Draws index j with probability exp(logw_j - logsumexp(logw)).
///
/// Entries may be -inf. The weights are shifted by their maximum before
/// exponentiation, so finite log-weights of any magnitude are safe.
/// Throws NoSelectableCandidate when every entry is -inf and InvalidParameter
/// on NaN or +inf.
std::size_t draw_categorical_logweights(RngStream& rng, std::span<const double> logw);

inline std::size_t draw_categorical_logweights(RngStream& rng, const Eigen::VectorXd& logw) {
  return draw_categorical_logweights(rng, std::span<const double>(logw.data(), logw.size()));
}

}  // namespace acmtm
