#include "core/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcr {

namespace {

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

uint64_t mix64(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (a + 0xBF58476D1CE4E5B9ULL));
  h = mix64(h ^ (b + 0x94D049BB133111EBULL));
  return h;
}

RandomStream::RandomStream(uint64_t seed) : seed_(seed) {
  uint64_t x = seed;
  for (auto& w : s_) w = splitmix64_next(x);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is invalid
}

RandomStream RandomStream::child(uint64_t a, uint64_t b) const {
  return RandomStream(mix64(seed_, a, b));
}

uint64_t RandomStream::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

uint64_t RandomStream::next_below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
  const uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform: requires lo < hi");
  return lo + (hi - lo) * uniform01();
}

double RandomStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

double RandomStream::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("normal: requires sigma > 0");
  return mu + sigma * normal();
}

double RandomStream::truncated_normal(double mu, double sigma, double lo, double hi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("truncated_normal: requires sigma > 0");
  if (!(lo < hi)) throw std::invalid_argument("truncated_normal: requires lo < hi");
  // Plain rejection; fine for windows covering a non-negligible probability mass.
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double x = mu + sigma * normal();
    if (x >= lo && x <= hi) return x;
  }
  throw std::runtime_error("truncated_normal: acceptance window [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "] too far in the tail");
}

double RandomStream::log_uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(lo < hi))
    throw std::invalid_argument("log_uniform: requires 0 < lo < hi");
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

}  // namespace mcr
