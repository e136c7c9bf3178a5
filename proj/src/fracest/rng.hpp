#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fracest {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key and
/// the 64-bit stream id occupies the upper counter words, so every
/// (seed, stream) pair is an independent sequence with no shared state.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block block(Block ctr, Key key);

  Philox(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  std::uint32_t next_u32();
  result_type operator()();

  /// Uniform on the open interval (0, 1): (k + 1/2) / 2^53.
  double uniform();
  /// Standard normal by inversion.
  double normal();

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int used_ = 4;
};

/// Seed for retry `attempt` of a replication; attempt 0 returns `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t attempt);

}  // namespace fracest
