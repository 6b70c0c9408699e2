#pragma once

#include <cstdint>
#include <random>

namespace netenergy {

// Seeded random source. Distribution transforms are implemented here rather
// than through <random> distributions so that streams are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent child stream keyed by `stream`. Deterministic in (seed, stream).
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform on (0, 1]; safe as a log argument.
  double uniform_positive();
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  double exponential(double rate);
  // Pareto(scale x_m, shape a): x_m * U^{-1/a}.
  double pareto(double scale, double shape);
  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace netenergy
