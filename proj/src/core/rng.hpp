#pragma once

#include <cstdint>
#include <string_view>

namespace mcr {

// splitmix64 avalanche finalizer.
uint64_t mix64(uint64_t x);
// Derivation key for child streams: a function of (seed, a, b) only.
uint64_t mix64(uint64_t seed, uint64_t a, uint64_t b);

// Seedable xoshiro256** stream. All distribution transforms live here rather
// than in <random> so a given seed yields the same sequence on every platform
// and standard library.
class RandomStream {
public:
  static constexpr std::string_view algorithm_name = "xoshiro256**";

  explicit RandomStream(uint64_t seed);

  uint64_t root_seed() const { return seed_; }

  // Stream fully determined by (root seed, a, b); independent of how much
  // this stream has already been consumed.
  RandomStream child(uint64_t a, uint64_t b) const;

  uint64_t next_u64();
  // Uniform on [0, bound), bound >= 1, rejection-sampled (no modulo bias).
  uint64_t next_below(uint64_t bound);

  double uniform01();  // [0, 1), 53-bit resolution
  double uniform(double lo, double hi);
  double normal();  // standard normal, Marsaglia polar
  double normal(double mu, double sigma);
  double truncated_normal(double mu, double sigma, double lo, double hi);
  double log_uniform(double lo, double hi);  // requires 0 < lo < hi

private:
  uint64_t seed_;
  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcr
