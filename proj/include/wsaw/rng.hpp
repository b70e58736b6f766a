#pragma once

#include <cstdint>
#include <random>

namespace wsaw {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Stream seed for (seed, index): tours/chains get independent generators
/// from their index alone, so parallel scheduling cannot change the draws.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
  std::uint64_t b = splitmix64(x);
  return a ^ (b + 0x632be59bd9b4e019ull);
}

/// mt19937_64 with portable uniform helpers (the standard distributions are
/// not bit-reproducible across library implementations; these are).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by multiply-shift.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  bool coin() { return (eng_() >> 63) != 0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace wsaw
