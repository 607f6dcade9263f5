#include "coalab/ppcoin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coalab/rng.hpp"

namespace coalab::ppcoin {

const char* to_string(Version v) { return v == Version::V02 ? "v0.2" : "v0.3"; }

double timeweight(std::int64_t age_seconds, Version version, const TimeweightConfig& cfg) {
  if (age_seconds < 0) throw std::invalid_argument("output age must be non-negative");
  const std::int64_t effective =
      version == Version::V03 ? std::min(age_seconds, cfg.cap_seconds) : age_seconds;
  return cfg.growth_per_second * static_cast<double>(effective);
}

double kernel_hash(std::uint64_t stake_modifier, std::int64_t second, UtxoId output) {
  ByteWriter w;
  w.u64(stake_modifier).i64(second).u64(output);
  return digest_fraction(w.hash());
}

double kernel_probability(const StakeKernelState& state, std::int64_t second, const KernelOutput& out) {
  const std::int64_t age = std::max<std::int64_t>(0, second - out.created_at);
  return std::min(1.0, state.d0 * out.coins * timeweight(age, state.version, state.tw));
}

bool kernel_eligibility(const StakeKernelState& state, std::int64_t second, const KernelOutput& out) {
  return kernel_hash(state.stake_modifier, second, out.id) < kernel_probability(state, second, out);
}

bool advance_clock(StakeKernelState& state, std::int64_t now, std::span<const Digest> window_blocks) {
  if (now < state.clock) throw std::invalid_argument("clock cannot move backwards");
  state.clock = now;
  const std::int64_t epoch = now / kModifierPeriod;
  if (epoch <= state.last_recompute / kModifierPeriod) return false;
  ByteWriter w;
  w.tag("ppc-modifier").u64(state.stake_modifier).i64(epoch);
  for (const auto& d : window_blocks) w.digest(d);
  state.stake_modifier = leading_u64(w.hash());
  state.last_recompute = epoch * kModifierPeriod;
  return true;
}

std::int64_t predictability_horizon(const StakeKernelState& state) {
  return std::max<std::int64_t>(0, state.last_recompute + kModifierPeriod - state.clock);
}

std::vector<std::int64_t> foreseeable_wins(const StakeKernelState& state, const KernelOutput& out,
                                           std::int64_t from, std::int64_t until) {
  const std::int64_t end = std::min(until, state.last_recompute + kModifierPeriod);
  std::vector<std::int64_t> wins;
  for (std::int64_t s = std::max(from, state.clock); s < end; ++s) {
    if (kernel_eligibility(state, s, out)) wins.push_back(s);
  }
  return wins;
}

double retarget_d0(double d0, std::span<const double> recent_intervals) {
  if (recent_intervals.empty()) throw std::invalid_argument("need at least one observed interval");
  if (!(d0 > 0)) throw std::invalid_argument("d0 must be positive");
  const double mean = std::accumulate(recent_intervals.begin(), recent_intervals.end(), 0.0) /
                      static_cast<double>(recent_intervals.size());
  return d0 * std::clamp(mean / kTargetInterval, 0.25, 4.0);
}

double simulate_retarget(double initial_d0, double total_weight, std::uint64_t blocks,
                         unsigned window, std::uint64_t seed) {
  if (window == 0 || blocks < 2) throw std::invalid_argument("need a window and at least two blocks");
  Rng rng(seed, 0x7e7a);
  double d0 = initial_d0;
  std::vector<double> recent;
  double tail_sum = 0;
  std::uint64_t tail_n = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const double p = std::min(1.0, d0 * total_weight);
    const double interval = static_cast<double>(rng.geometric(p) + 1);
    recent.push_back(interval);
    if (b >= blocks / 2) {
      tail_sum += interval;
      ++tail_n;
    }
    if (recent.size() == window) {
      d0 = retarget_d0(d0, recent);
      recent.clear();
    }
  }
  return tail_sum / static_cast<double>(tail_n);
}

double expected_reorg_interval(double m, unsigned k) {
  if (!(m > 1) || k == 0) throw std::invalid_argument("need M > 1 and k >= 1");
  return std::pow(m, static_cast<double>(k));
}

StreakStats simulate_streaks(double m, unsigned k, std::uint64_t blocks, std::uint64_t seed) {
  if (!(m > 1) || k == 0) throw std::invalid_argument("need M > 1 and k >= 1");
  Rng rng(seed, 0x57ea);
  const double share = 1.0 / m;
  StreakStats st;
  st.blocks = blocks;
  unsigned run = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    run = rng.bernoulli(share) ? run + 1 : 0;
    if (run >= k) ++st.streaks;
  }
  st.mean_gap = st.streaks ? static_cast<double>(blocks) / static_cast<double>(st.streaks)
                           : std::numeric_limits<double>::infinity();
  return st;
}

ForkRateStats simulate_fork_rate(unsigned outputs, std::uint64_t seconds, std::uint64_t seed) {
  if (outputs == 0) throw std::invalid_argument("need at least one output");
  const double p_any = 1.0 / kTargetInterval;
  const double q = -std::expm1(std::log1p(-p_any) / outputs);
  const double log_miss = std::log1p(-q);
  Rng rng(seed, 0xf0c);
  ForkRateStats st;
  st.seconds = seconds;
  std::uint64_t t = 0;
  while (true) {
    t += rng.geometric(p_any) + 1;
    if (t > seconds) break;
    ++st.solved_seconds;
    // First solver conditional on at least one, then the rest by skipping.
    const double u = rng.uniform();
    auto first = static_cast<std::uint64_t>(std::ceil(std::log1p(-u * p_any) / log_miss));
    first = std::clamp<std::uint64_t>(first, 1, outputs);
    std::uint64_t solvers = 1;
    for (std::uint64_t k = first + rng.geometric(q) + 1; k <= outputs; k += rng.geometric(q) + 1) {
      ++solvers;
    }
    if (solvers >= 2) {
      ++st.multi_solve_seconds;
      st.contested_blocks += solvers;
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  st.pairwise_interval = st.contested_blocks ? static_cast<double>(seconds) / st.contested_blocks : inf;
  st.poisson_interval = st.multi_solve_seconds ? static_cast<double>(seconds) / st.multi_solve_seconds : inf;
  return st;
}

double pairwise_interval_analytic(double p_any) { return 1.0 / (p_any * p_any); }

double poisson_interval_analytic(double p_any) {
  const double lambda = -std::log1p(-p_any);
  return 1.0 / (-std::expm1(-lambda) - lambda * std::exp(-lambda));
}

TimeweightResult simulate_timeweight_attack(const TimeweightAttack& cfg, std::uint64_t trials,
                                            std::uint64_t seed) {
  if (!(cfg.attacker_stake > 0 && cfg.attacker_stake < 1)) {
    throw std::invalid_argument("attacker stake must be in (0, 1)");
  }
  if (!(cfg.honest_participation > 0 && cfg.honest_participation <= 1)) {
    throw std::invalid_argument("honest participation must be in (0, 1]");
  }
  if (cfg.attacker_outputs == 0 || cfg.honest_outputs == 0 || trials == 0) {
    throw std::invalid_argument("need outputs on both sides and at least one trial");
  }
  Rng rng(seed, 0x71e);
  const double a_coins = cfg.attacker_stake / cfg.attacker_outputs;
  const double h_coins = (1 - cfg.attacker_stake) * cfg.honest_participation / cfg.honest_outputs;
  const auto attacker_age = static_cast<std::int64_t>(std::llround(cfg.wait_multiplier * cfg.honest_age));
  const double a_weight = a_coins * timeweight(attacker_age, cfg.version, cfg.tw);

  TimeweightResult r;
  r.trials = trials;
  {
    const double h_mean = h_coins * timeweight(cfg.honest_age, cfg.version, cfg.tw);
    const double a_total = a_weight * cfg.attacker_outputs;
    r.analytic = a_total / (a_total + h_mean * cfg.honest_outputs);
  }
  std::vector<double> weights(cfg.attacker_outputs + cfg.honest_outputs);
  std::uint64_t wins = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    double total = 0;
    for (unsigned i = 0; i < weights.size(); ++i) {
      if (i < cfg.attacker_outputs) {
        weights[i] = a_weight;
      } else {
        // Honest ages spread uniformly around their mean.
        const auto age = static_cast<std::int64_t>(cfg.honest_age * rng.uniform(0.5, 1.5));
        weights[i] = h_coins * timeweight(age, cfg.version, cfg.tw);
      }
      total += weights[i];
    }
    // d0 retargeted so the network solves a block every 600 s on average.
    const double d0 = 1.0 / (kTargetInterval * total);
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    unsigned best_attacker = 0;
    unsigned best_count = 0;
    for (unsigned i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0) continue;
      const std::uint64_t t = rng.geometric(std::min(1.0, d0 * weights[i]));
      const bool attacker = i < cfg.attacker_outputs;
      if (t < best) {
        best = t;
        best_count = 1;
        best_attacker = attacker ? 1 : 0;
      } else if (t == best) {
        ++best_count;
        best_attacker += attacker ? 1 : 0;
      }
    }
    if (best_attacker > 0 && rng.below(best_count) < best_attacker) ++wins;
  }
  r.win_probability = static_cast<double>(wins) / static_cast<double>(trials);
  r.std_error = std::sqrt(r.win_probability * (1 - r.win_probability) / static_cast<double>(trials));
  return r;
}

}  // namespace coalab::ppcoin
