#pragma once

#include <cstdint>
#include <limits>

namespace mam {

// SplitMix64: counter-based 64-bit generator. Substreams are derived by
// hashing (seed, stream index), so parallel Monte-Carlo reps are reproducible
// independent of scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mixer(seed ^ (stream * 0x9e3779b97f4a7c15ULL));
    return SplitMix64(mixer() ^ mixer());
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; platform-independent given the stream.
  double normal();

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace mam
