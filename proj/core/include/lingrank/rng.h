#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace lingrank {

// Seeded random source shared by sampling, synthetic data and the eigensolver
// start vectors.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Everything built on top of it is spelled out here rather than
// delegated to <random> distributions, whose algorithms are
// implementation-defined:
//   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
//   below(b)   = rejection sampling on next() % b (unbiased)
//   normal()   = Box-Muller on (1 - uniform(), uniform()); both deviates of
//                a pair are used, cosine branch first.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace lingrank
