#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coalab::issuance {

/// Total market value D(t); the per-coin value is D(t) / supply, which is
/// decreasing in supply for every kind.
struct Demand {
  enum class Kind { Constant, Linear, Shock };
  Kind kind = Kind::Constant;
  double base = 1e6;
  double slope = 0;          // Linear: added per step
  std::uint64_t shock_step = 0;
  double shock_factor = 1;   // Shock: multiplier from shock_step on

  double total(std::uint64_t step) const;
  double value_per_coin(double supply, std::uint64_t step) const;
};

Demand::Kind demand_kind_from_string(const std::string& s);

enum class Difficulty {
  Fixed,
  /// Bitcoin-style control that holds the block rate at one per 600 s.
  Retarget,
};

struct Params {
  double production_cost_per_coin = 1.0;
  Demand demand;
  /// Per miner-step probability of solving a block at the fixed difficulty.
  double fixed_difficulty = 1e-3;
  /// Floor on the average block interval; 0 disables it.
  double min_gap_seconds = 60;
  std::uint64_t maturity_n = 120;
  double step_seconds = 60;
  double reward = 50;
  double initial_supply = 1e4;
  double initial_miners = 100;
  /// Fraction of the gap to the target population closed per step.
  double adjustment = 0.05;
  /// Target population per unit of relative margin (value / cost - 1).
  double miner_elasticity = 1e4;
  /// Height of the last PoW block; nullopt mines forever.
  std::optional<std::uint64_t> last_pow_block;
  Difficulty difficulty = Difficulty::Fixed;

  void validate() const;
};

/// Tip - coinbase >= n.
bool maturity_spendable(std::uint64_t coinbase_height, std::uint64_t tip_height, std::uint64_t n);

/// Whether a coinbase at `height` is still accepted.
bool accepts_coinbase(std::uint64_t height, const std::optional<std::uint64_t>& last_pow_block);

/// Per-miner solve probability once the min-gap floor (or the retarget)
/// has raised the difficulty for `miners` participants.
double effective_difficulty(const Params& p, double miners);

/// Expected blocks per second for a fixed miner population.
double expected_block_rate(const Params& p, double miners);

struct Sample {
  std::uint64_t step = 0;
  double miners = 0;
  std::uint64_t blocks = 0;
  std::uint64_t height = 0;
  double supply = 0;
  double value = 0;
};

struct Summary {
  std::vector<Sample> series;
  double mean_value = 0;     // after burn-in
  double value_cv = 0;       // after burn-in
  double relative_gap = 0;   // |mean value - cost| / cost after burn-in
  double block_rate = 0;     // blocks per second after burn-in
  std::uint64_t coinbases = 0;
  std::uint64_t rejected_coinbases = 0;
};

/// Miners enter when value exceeds cost and leave when it falls short:
/// m <- m + adjustment * (elasticity * max(0, value / cost - 1) - m).
Summary simulate_issuance(const Params& p, std::uint64_t steps, std::uint64_t burn_in, std::uint64_t seed);

/// CSV header for `Sample` rows.
std::string csv_header();
std::string csv_row(const Sample& s);

}  // namespace coalab::issuance
