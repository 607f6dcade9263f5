#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "coalab/types.hpp"

namespace coalab {

class Rng;

enum class CombKind { Concat, Majority, IteratedMajority };

const char* to_string(CombKind k);
CombKind comb_kind_from_string(const std::string& s);

/// Maps ell = kappa*w input bits to a kappa-bit seed, one output bit per
/// consecutive group of w inputs.
struct CombSpec {
  CombKind kind = CombKind::Concat;
  unsigned kappa = 1;
  unsigned w = 1;

  unsigned ell() const { return kappa * w; }
  /// Throws std::invalid_argument on width/parity violations.
  void validate() const;
};

/// Bits are 0/1 bytes.
Seed comb_apply(const CombSpec& spec, std::span<const std::uint8_t> bits);

/// Majority of one group under the comb's rule.
bool comb_group_bit(CombKind kind, std::span<const std::uint8_t> group);

struct KzWidth {
  double formula = 0;  // 3*(c/eps)^(log2 3) before rounding
  unsigned width = 0;  // next power of 3
};
KzWidth kz_width(double c, double eps);

struct CoalitionBounds {
  double achievable = 0;
  double upper = 0;
};
CoalitionBounds coalition_bounds(unsigned ell, unsigned kappa, double eps);

/// Probability that the first w-1 bits of a majority group tie, making the
/// last player pivotal: C(w-1,(w-1)/2)/2^(w-1).
double majority_tie_probability(unsigned w);
/// Same quantity by enumerating all 2^(w-1) prefixes; returns tie count.
std::uint64_t majority_tie_count(unsigned w);
/// sqrt(2/(pi*w)).
double majority_tie_asymptotic(unsigned w);
/// Probability the final input of an iterated-majority group is pivotal.
double iterated_majority_pivot_probability(unsigned w);

struct McEstimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t trials = 0;
};

/// Estimate of the chance the last player is selected again when choosing
/// their bit after seeing all others. Each candidate seed selects them
/// independently with probability p (hash as random oracle).
McEstimate last_player_advantage(const CombSpec& spec, double p, std::uint64_t trials,
                                 std::uint64_t rng_seed);

/// Closed forms for the same quantity: pivot*(2p-p^2) + (1-pivot)*p.
double mu_concat(double p);
double mu_with_pivot(double p, double pivot);

/// Coalition behaviour: given input bits with honest positions filled,
/// set the coalition positions.
using CoalitionStrategy =
    std::function<void(std::vector<std::uint8_t>& bits, std::span<const std::size_t> coalition)>;

/// Adversary that tries to land the seed in `target`. Searches all 2^c
/// responses for c <= 12, otherwise improves bit by bit.
CoalitionStrategy target_strategy(const CombSpec& spec, std::function<bool(const Seed&)> target);

/// Half-L1 distance of the empirical seed histogram from uniform. Needs
/// kappa <= 16.
double coalition_bias(const CombSpec& spec, std::span<const std::size_t> coalition,
                      const CoalitionStrategy& strategy, std::uint64_t trials,
                      std::uint64_t rng_seed);

}  // namespace coalab
