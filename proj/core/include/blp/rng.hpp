#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace blp {

/// SplitMix64 finalizer. Used to derive well-separated seeds from a master
/// seed and a replica index.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th substream of `master`. Distinct indices give
/// statistically independent streams; the mapping is stable across runs.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Deterministic random stream. All sampling in the library goes through this
/// type so that a (seed, index) pair fully determines a replica.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream substream(std::uint64_t master, std::uint64_t index) {
    return RandomStream(substream_seed(master, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Exponential with the given rate; rate 0 yields +infinity.
  double exponential(double rate);

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Draws an index from non-decreasing cumulative weights; index i has
  /// probability (c[i] - c[i-1]) / c.back().
  std::size_t discrete(std::span<const double> cumulative_weights);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace blp
