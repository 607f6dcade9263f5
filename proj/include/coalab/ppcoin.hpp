#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coalab/hash.hpp"
#include "coalab/types.hpp"

namespace coalab::ppcoin {

enum class Version { V02, V03 };

const char* to_string(Version v);

inline constexpr std::int64_t kSecondsPerDay = 86'400;
inline constexpr std::int64_t kModifierPeriod = 6 * 60 * 60;
inline constexpr double kTargetInterval = 600.0;

/// Timeweight grows linearly with output age; v0.3 stops growing at the cap.
/// Both knobs are configurable because the two cap figures quoted for v0.3
/// ("90 days" and "60*60*60") disagree dimensionally.
struct TimeweightConfig {
  double growth_per_second = 1.0 / kSecondsPerDay;
  std::int64_t cap_seconds = 90 * kSecondsPerDay;
};

double timeweight(std::int64_t age_seconds, Version version, const TimeweightConfig& cfg = {});

struct KernelOutput {
  UtxoId id = 0;
  double coins = 0;
  std::int64_t created_at = 0;
};

struct StakeKernelState {
  double d0 = 1e-9;
  std::uint64_t stake_modifier = 0;
  std::int64_t last_recompute = 0;
  std::int64_t clock = 0;
  Version version = Version::V03;
  TimeweightConfig tw;
};

/// hash(modifier, second, output) as a fraction in [0, 1).
double kernel_hash(std::uint64_t stake_modifier, std::int64_t second, UtxoId output);

/// Condition (*): kernel hash <= d0 * coins * timeweight. Eligibility
/// depends on the integer second only, giving one attempt per second.
bool kernel_eligibility(const StakeKernelState& state, std::int64_t second, const KernelOutput& out);

/// Per-second success probability of `out` under the state's d0.
double kernel_probability(const StakeKernelState& state, std::int64_t second, const KernelOutput& out);

/// Re-derives the modifier when the clock crosses a 6-hour boundary, mixing
/// in the digests of the blocks seen in the elapsed window. Returns whether
/// a recompute happened.
bool advance_clock(StakeKernelState& state, std::int64_t now, std::span<const Digest> window_blocks);

/// Seconds until the next modifier recompute: the attacker's foresight window.
std::int64_t predictability_horizon(const StakeKernelState& state);

/// Seconds in [from, until) at which `out` is eligible, clipped to the
/// current modifier epoch because later kernels are not yet computable.
std::vector<std::int64_t> foreseeable_wins(const StakeKernelState& state, const KernelOutput& out,
                                           std::int64_t from, std::int64_t until);

/// Multiplicative step toward the 600 s target, clamped to [1/4, 4].
double retarget_d0(double d0, std::span<const double> recent_intervals);

/// Closed-loop run: fixed total weight, retarget every `window` blocks.
/// Returns the mean interval over the second half of the run.
double simulate_retarget(double initial_d0, double total_weight, std::uint64_t blocks,
                         unsigned window, std::uint64_t seed);

/// M^k.
double expected_reorg_interval(double m, unsigned k);

struct StreakStats {
  std::uint64_t blocks = 0;
  std::uint64_t streaks = 0;
  double mean_gap = 0;
};

/// Block sequence where the attacker (share 1/M, spread over many outputs
/// so timeweight has no effect) wins each block independently. Counts
/// positions that complete a run of k attacker blocks.
StreakStats simulate_streaks(double m, unsigned k, std::uint64_t blocks, std::uint64_t seed);

struct ForkRateStats {
  std::uint64_t seconds = 0;
  std::uint64_t solved_seconds = 0;
  std::uint64_t multi_solve_seconds = 0;
  std::uint64_t contested_blocks = 0;
  /// Seconds per block that has a same-second competitor.
  double pairwise_interval = 0;
  /// Seconds per second with two or more solutions.
  double poisson_interval = 0;
};

/// `outputs` equal outputs, each with one Bernoulli trial per second,
/// calibrated so that Pr[some block in a second] = 1/600.
ForkRateStats simulate_fork_rate(unsigned outputs, std::uint64_t seconds, std::uint64_t seed);

/// Analytic counterparts of the two counting conventions.
double pairwise_interval_analytic(double p_any = 1.0 / kTargetInterval);
double poisson_interval_analytic(double p_any = 1.0 / kTargetInterval);

struct TimeweightAttack {
  Version version = Version::V02;
  double attacker_stake = 0.1;
  double wait_multiplier = 5.0;
  /// Fraction of the non-attacker coins that take part in staking.
  double honest_participation = 1.0;
  /// Mean age of honest outputs; the attacker's outputs are this times the
  /// wait multiplier.
  std::int64_t honest_age = 10 * kSecondsPerDay;
  unsigned attacker_outputs = 10;
  unsigned honest_outputs = 90;
  TimeweightConfig tw;
};

struct TimeweightResult {
  double win_probability = 0;
  double std_error = 0;
  /// attacker weight / total weight, the race's closed form.
  double analytic = 0;
  std::uint64_t trials = 0;
};

/// Races every output's first eligible second; the earliest wins the next
/// block (same-second ties split at random).
TimeweightResult simulate_timeweight_attack(const TimeweightAttack& cfg, std::uint64_t trials,
                                            std::uint64_t seed);

}  // namespace coalab::ppcoin
