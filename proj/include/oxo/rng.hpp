#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oxo {

// One step of the splitmix64 generator; also used to mix stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic random source. All draws go through hand-written
// transformations of mt19937_64 output so that identical seeds yield
// identical streams on every platform (std distributions are not portable).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (pairs cached).
  double normal();

  // Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Independent substream of a master seed, keyed by a purpose label and index.
RandomSource derive_stream(std::uint64_t master, std::string_view purpose,
                           std::uint64_t index = 0);

}  // namespace oxo
