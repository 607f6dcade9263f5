#pragma once

#include <cstdint>
#include <limits>

namespace coalab {

/// Counter-based deterministic generator. Output i is a bijective mix of
/// (key, i), so a stream is fully described by (seed, stream id, counter)
/// and results are identical on every platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); unbiased. n must be nonzero.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential variate with the given mean.
  double exponential(double mean);

  /// Number of failures before the first success of a Bernoulli(p) sequence.
  std::uint64_t geometric(double p);

  /// Independent generator for a named sub-stream of the same seed.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer; exposed for deriving stream keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace coalab
