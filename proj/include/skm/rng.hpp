#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace skm {

/// SplitMix64 finalizer (Steele, Lea, Vigna). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// Seed for replication/stream `index` of a master seed. This is the
/// SplitMix64 output sequence started at `master`, jumped to `index`,
/// so distinct indices give decorrelated streams.
constexpr std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * kGolden);
}

/// Deterministic generator: mt19937_64 (engine output is specified by the
/// standard, so streams are identical across platforms) with hand-rolled
/// distribution transforms. Standard-library distributions are
/// implementation-defined and are deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed ^ kGolden)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on (0, 1]. 53-bit resolution; never returns 0 so logs are safe.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the spare value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(6.283185307179586476925286766559 * u2);
    double s = std::sin(6.283185307179586476925286766559 * u2);
    spare_ = r * s;
    has_spare_ = true;
    return r * c;
  }

  /// +1 or -1 with equal probability.
  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Uniform on [-1, 1].
  double uniform_sym() { return 2.0 * uniform01() - 1.0; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Counter-based stream: the draw for (step, i, u) is a pure function of
/// (seed, step, i, u), so two iterations sharing a seed consume identical
/// samples regardless of evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Uniform on (0, 1] for the given coordinates.
  double unit(std::uint64_t step, std::uint64_t i, std::uint64_t u) const {
    std::uint64_t h = mix64(seed_ + kGolden * step);
    h = mix64(h + kGolden * i);
    h = mix64(h + kGolden * u);
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace skm
