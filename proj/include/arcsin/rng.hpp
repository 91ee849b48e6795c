#ifndef ARCSIN_RNG_HPP
#define ARCSIN_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace arcsin {

/// Portable seeded generator.
///
/// Algorithm: xoshiro256** (Blackman & Vigna) whose 256-bit state is filled by
/// four successive splitmix64 outputs of the seed. Uniform doubles take the top
/// 53 bits of a 64-bit draw. Standard normals use the Box–Muller transform
/// with both outputs consumed (the cosine branch first, the sine branch cached
/// for the next call). Streams are bit-reproducible given the seed.
///
/// Child generators for parallel work are seeded with `derive_seed()`, i.e.
/// child_seed = next 64-bit output of the parent stream.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed = 0) noexcept : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // [lo, hi]; returns lo when the interval is degenerate.
  double uniform(double lo, double hi) noexcept {
    if (!(hi > lo)) return lo;
    return lo + (hi - lo) * uniform();
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t derive_seed() noexcept { return next_u64(); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  static constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace arcsin

#endif  // ARCSIN_RNG_HPP
