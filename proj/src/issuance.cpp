#include "coalab/issuance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "coalab/rng.hpp"

namespace coalab::issuance {

double Demand::total(std::uint64_t step) const {
  switch (kind) {
    case Kind::Constant:
      return base;
    case Kind::Linear:
      return std::max(0.0, base + slope * static_cast<double>(step));
    case Kind::Shock:
      return step >= shock_step ? base * shock_factor : base;
  }
  return base;
}

double Demand::value_per_coin(double supply, std::uint64_t step) const {
  if (!(supply > 0)) throw std::invalid_argument("supply must be positive");
  return total(step) / supply;
}

Demand::Kind demand_kind_from_string(const std::string& s) {
  if (s == "constant") return Demand::Kind::Constant;
  if (s == "linear") return Demand::Kind::Linear;
  if (s == "shock") return Demand::Kind::Shock;
  throw std::invalid_argument("unknown demand kind '" + s + "'");
}

void Params::validate() const {
  if (!(production_cost_per_coin > 0)) throw std::invalid_argument("production_cost_per_coin must be positive");
  if (!(fixed_difficulty > 0 && fixed_difficulty <= 1)) {
    throw std::invalid_argument("fixed_difficulty must be in (0, 1]");
  }
  if (min_gap_seconds < 0) throw std::invalid_argument("min_gap_seconds must be non-negative");
  if (maturity_n < 1) throw std::invalid_argument("maturity_n must be at least 1");
  if (!(step_seconds > 0)) throw std::invalid_argument("step_seconds must be positive");
  if (!(reward > 0)) throw std::invalid_argument("reward must be positive");
  if (!(initial_supply > 0)) throw std::invalid_argument("initial_supply must be positive");
  if (initial_miners < 0) throw std::invalid_argument("initial_miners must be non-negative");
  if (!(adjustment >= 0 && adjustment <= 1)) throw std::invalid_argument("adjustment must be in [0, 1]");
  if (!(miner_elasticity >= 0)) throw std::invalid_argument("miner_elasticity must be non-negative");
  if (demand.base < 0) throw std::invalid_argument("demand base must be non-negative");
}

bool maturity_spendable(std::uint64_t coinbase_height, std::uint64_t tip_height, std::uint64_t n) {
  if (tip_height < coinbase_height) throw std::invalid_argument("tip below coinbase");
  return tip_height - coinbase_height >= n;
}

bool accepts_coinbase(std::uint64_t height, const std::optional<std::uint64_t>& last_pow_block) {
  return !last_pow_block || height <= *last_pow_block;
}

double effective_difficulty(const Params& p, double miners) {
  if (miners <= 0) return p.fixed_difficulty;
  double cap_per_step;
  if (p.difficulty == Difficulty::Retarget) {
    cap_per_step = p.step_seconds / 600.0;
    return std::min(1.0, cap_per_step / miners);
  }
  if (p.min_gap_seconds <= 0) return p.fixed_difficulty;
  cap_per_step = p.step_seconds / p.min_gap_seconds;
  return std::min(p.fixed_difficulty, cap_per_step / miners);
}

double expected_block_rate(const Params& p, double miners) {
  return miners * effective_difficulty(p, miners) / p.step_seconds;
}

namespace {

// Binomial(n, q) by geometric skipping: cost is proportional to successes.
std::uint64_t binomial(Rng& rng, std::uint64_t n, double q) {
  if (n == 0 || q <= 0) return 0;
  if (q >= 1) return n;
  std::uint64_t k = 0;
  for (std::uint64_t pos = rng.geometric(q); pos < n; pos += rng.geometric(q) + 1) ++k;
  return k;
}

}  // namespace

Summary simulate_issuance(const Params& p, std::uint64_t steps, std::uint64_t burn_in, std::uint64_t seed) {
  p.validate();
  if (burn_in >= steps) throw std::invalid_argument("burn-in must be shorter than the run");
  Rng rng(seed, 0x155e);
  Summary out;
  out.series.reserve(steps);
  double miners = p.initial_miners;
  double supply = p.initial_supply;
  std::uint64_t height = 0;
  double sum = 0, sum_sq = 0, tail_blocks = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const auto n = static_cast<std::uint64_t>(std::llround(miners));
    const double q = effective_difficulty(p, static_cast<double>(n));
    const std::uint64_t solved = binomial(rng, n, q);
    std::uint64_t minted = 0;
    for (std::uint64_t b = 0; b < solved; ++b) {
      if (accepts_coinbase(height + 1, p.last_pow_block)) {
        ++height;
        ++minted;
      } else {
        ++out.rejected_coinbases;
      }
    }
    out.coinbases += minted;
    supply += static_cast<double>(minted) * p.reward;
    const double value = p.demand.value_per_coin(supply, t);
    out.series.push_back({t, miners, minted, height, supply, value});
    if (t >= burn_in) {
      sum += value;
      sum_sq += value * value;
      tail_blocks += static_cast<double>(minted);
    }
    // Revenue per unit of mining cost: value per coin over the cost of a
    // coin at the difficulty the miners actually face.
    const double cost = p.production_cost_per_coin * p.fixed_difficulty / std::max(q, 1e-300);
    const bool done = !accepts_coinbase(height + 1, p.last_pow_block);
    const double ratio = done ? 0.0 : value / cost;
    // Population drawn in by the current margin; close part of the gap.
    const double target = p.miner_elasticity * std::max(0.0, ratio - 1);
    miners = std::max(0.0, miners + p.adjustment * (target - miners));
  }
  const auto tail = static_cast<double>(steps - burn_in);
  out.mean_value = sum / tail;
  const double var = std::max(0.0, sum_sq / tail - out.mean_value * out.mean_value);
  out.value_cv = out.mean_value > 0 ? std::sqrt(var) / out.mean_value : 0.0;
  out.relative_gap = std::abs(out.mean_value - p.production_cost_per_coin) / p.production_cost_per_coin;
  out.block_rate = tail_blocks / (tail * p.step_seconds);
  return out;
}

std::string csv_header() { return "step,miners,blocks,height,supply,value"; }

std::string csv_row(const Sample& s) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%llu,%.6f,%llu,%llu,%.6f,%.9g", static_cast<unsigned long long>(s.step),
                s.miners, static_cast<unsigned long long>(s.blocks),
                static_cast<unsigned long long>(s.height), s.supply, s.value);
  return buf;
}

}  // namespace coalab::issuance
