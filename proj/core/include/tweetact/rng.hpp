#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace tweetact {

// One step of SplitMix64 (Steele, Lea, Flood 2014). Used for seeding and
// for deriving per-item seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent seed for sub-stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// xoshiro256** 1.0 (Blackman & Vigna) seeded by four SplitMix64 draws.
// Every randomized operation in the library goes through this generator so
// that results are reproducible across platforms and standard libraries;
// std:: distributions are never used because their output is
// implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // Uniform integer in [0, bound), bound > 0. Rejection sampling: draws r
  // until r >= (2^64 - bound) % bound, then returns r % bound.
  std::uint64_t uniform(std::uint64_t bound);

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform01();

  // In-place Fisher-Yates: for i = n-1 down to 1, swap(i, uniform(i+1)).
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next(); }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace tweetact
