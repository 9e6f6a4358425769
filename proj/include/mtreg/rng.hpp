#pragma once

#include <array>
#include <cstdint>

namespace mtreg {

/// Philox4x32-10 counter-based block function (Salmon et al., Random123).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Sequential view over a Philox stream.
///
/// The key is the 64-bit seed; the counter holds a 64-bit block index in its
/// low words and a 64-bit stream id in its high words. Distinct stream ids
/// are statistically independent, and any position is reachable in O(1) via
/// seek(), so parallel replicates can draw from disjoint streams without
/// coordination.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Marsaglia polar method (needs only log and sqrt).
  double normal();
  /// Gamma(shape, rate) via Marsaglia-Tsang; mean shape / rate.
  double gamma(double shape, double rate);

  /// Position at the start of 128-bit block `block`, dropping any cached values.
  void seek(std::uint64_t block);
  std::uint64_t block() const { return block_; }

private:
  void refill();

  PhiloxKey key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Derive an independent child seed (SplitMix64 finalizer over seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mtreg
