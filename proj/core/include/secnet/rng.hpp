#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace secnet {

/// SplitMix64 finalizer. Used to seed generators and to derive stream ids.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive an independent stream seed from a master seed and a path of ids,
/// e.g. derive_seed(master, {replicate}) or derive_seed(master, {cell, rep}).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// xoshiro256++ generator. Satisfies UniformRandomBitGenerator.
///
/// The sampling helpers below work directly on the raw 64-bit output so that
/// results are identical across standard library implementations (the
/// <random> distributions are implementation-defined).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  /// Generator for stream `path` under `master`.
  static Rng stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    return Rng(derive_seed(master, path));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// True with probability p (p <= 0 never, p >= 1 always).
  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Uniform integer in [0, bound). Lemire's nearly-divisionless method. bound > 0.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace secnet
