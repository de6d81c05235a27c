// Self-contained PRNG (splitmix64 seeding + xoshiro256**) with hand-rolled
// distributions. std::* distributions are unspecified across libstdc++
// versions, which would break bitwise reproducibility of pipeline outputs.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace poincavec {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stage seeds come from one root seed plus a stage label, so independent
// pipeline stages never share a stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // uniform in [0, 1)
  double next_double();
  double uniform(double lo, double hi);
  // uniform in {0, ..., n-1}; n > 0 (rejection sampling, no modulo bias)
  std::uint64_t next_below(std::uint64_t n);
  // standard normal via Box-Muller; caches the spare draw
  double normal();
  double normal(double mean, double stddev);
  double lognormal(double log_mean, double log_sigma);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace poincavec
