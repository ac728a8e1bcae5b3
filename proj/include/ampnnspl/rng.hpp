#ifndef AMPNNSPL_RNG_HPP
#define AMPNNSPL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ampnnspl {

// splitmix64 step (Steele, Lea, Flood 2014). Used to mix seeds and derive
// independent sub-streams; one step per index keeps distinct (seed, index)
// tuples from colliding the way a plain XOR of small integers would.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream: mt19937_64 under an explicit 64-bit seed.
/// Gaussian draws use Box-Muller on top of the raw 53-bit uniforms, so the
/// byte-for-byte output sequence depends only on the seed, not on the
/// standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair and
  /// caches the second value.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n); unbiased via rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Sub-stream seed for a task addressed by up to three indices (e.g. ratio,
/// trial, algorithm). Same inputs always give the same stream.
inline std::uint64_t derive_stream(std::uint64_t base_seed, std::uint64_t a,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = base_seed;
  std::uint64_t h = splitmix64(s) ^ a;
  h = splitmix64(h) ^ b;
  h = splitmix64(h) ^ c;
  return splitmix64(h);
}

}  // namespace ampnnspl

#endif  // AMPNNSPL_RNG_HPP
