#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>

namespace dca {

/// xoshiro256** seeded through splitmix64. Every stochastic routine in the
/// library takes an explicit 64-bit seed and derives independent streams with
/// `derive_seed`, so results do not depend on thread scheduling or on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal deviate (Marsaglia polar method).
  double normal();

  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream identified by `ids` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

/// Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto k = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[k]);
  }
}

}  // namespace dca
