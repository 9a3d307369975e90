#pragma once

#include <array>
#include <cstdint>

namespace comonotone {

using Philox4x64Block = std::array<std::uint64_t, 4>;

/// One Philox4x64-10 block.
Philox4x64Block philox4x64_10(Philox4x64Block counter, std::array<std::uint64_t, 2> key);

/// SplitMix64 finalizer, used to derive independent seeds for sub-experiments.
std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based random stream keyed by (master seed, stream id).
///
/// The i-th output of a stream depends only on (seed, stream_id, i), so path
/// k of an experiment is reproduced bit-for-bit whichever worker draws it and
/// in whatever order. Distinct stream ids give independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Box-Muller; the second variate of each pair is cached).
  double normal();
  /// Exponential with the given rate.
  double exponential(double rate);

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Philox4x64Block buffer_{};
  int buffer_pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace comonotone
