#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "coalab/types.hpp"

namespace coalab::attacks {

/// Smallest integer S >= 0 with V < eps*(rho_obs*S - delta + 1).
std::uint64_t min_safe_confirmations_observed(double v, double eps, double rho_obs, double delta);

/// Smallest integer S >= 0 with V < eps*(rho*S - K + 1).
std::uint64_t min_safe_confirmations_density(double v, double eps, double rho, double k);

/// Linear scan used to cross-check the closed forms.
std::uint64_t min_safe_confirmations_scan(double v, double eps, double rho, double offset);

/// Whether V < eps*(rho*S - offset + 1) holds, with a 1e-9 relative guard so
/// exact boundary cases count as equality.
bool confirmation_inequality(double v, double eps, double rho, double offset, std::uint64_t s);

/// Seconds a merchant waits for S blocks at one block per G0.
double wait_seconds(std::uint64_t s, double g0);

/// delta for the slots preceding B0 (true = block produced): the largest
/// missing-minus-produced count over segments ending right before B0.
std::uint64_t measure_delta(std::span<const bool> slots_before_b0);

/// Produced fraction of the slots following B0.
double observed_density(std::span<const bool> slots_after_b0);

/// Length of the segment achieving `measure_delta`, counted back from B0.
std::size_t delta_segment_length(std::span<const bool> slots_before_b0);

/// E = d^2 * mu / 3 with mu = (2+q_hat)*p*ell, d = ell/mu - 1 and
/// q_hat = 1/((1-p)(1-q)) - 1, for Y ~ Bin((2+q_hat)*ell, p).
/// This is the d <= 1 Chernoff form; for large d (small p) e^-E can fall
/// below the true tail. Use takeover_log_bound_any_deviation for a bound
/// that holds everywhere.
double takeover_log_bound(double ell, double p, double q);
/// E = d^2 * mu / (2 + d), so that Pr(Y > ell) <= e^-E for every d > 0.
double takeover_log_bound_any_deviation(double ell, double p, double q);
double takeover_q_hat(double p, double q);

struct TakeoverMc {
  std::uint64_t n = 0;
  std::uint64_t exceed = 0;
  std::uint64_t trials = 0;
  double empirical = 0;
  double bound = 0;
};

/// Samples Y ~ Bin(ceil((2+q_hat)*ell), p) and counts Y > ell.
TakeoverMc takeover_monte_carlo(unsigned ell, double p, double q, std::uint64_t trials,
                                std::uint64_t seed);

/// Minimal bribe a rational stakeholder accepts under
/// (mu + F')P > F(1 - P). For PPCoin nothing is forfeited by also signing
/// the attacker's branch, so any positive bribe suffices.
double bribe_acceptance_threshold(double f, double f_attacker, double p_success, bool ppcoin);

bool accepts_bribe(double mu, double f, double f_attacker, double p_success, bool ppcoin);

struct BribeScenario {
  std::uint32_t stakeholders = 20;
  /// Honest online probability per slot on the honest chain.
  double participation = 0.8;
  std::uint64_t warmup_slots = 40;
  /// Confirmations the merchant waits for.
  std::uint64_t confirmations = 12;
  double value = 100;    // V
  double fee = 10;       // eps: fee a creator earns per block
  double bribe = 11;     // mu offered per attacker block
  double budget = 1e9;   // attacker's total bribe budget
  double perceived_success = 0.5;
  /// Bribe demanded by stakeholders who already skipped their slot.
  double free_colluder_bribe = 0;
  bool ppcoin_rules = false;
  std::uint64_t horizon_slots = 80;
  std::uint64_t seed = 1;
  /// Per-stakeholder decision for offers that cost a slot; defaults to the
  /// rational rule with `perceived_success`.
  std::function<bool(StakeholderId who, double mu, double fee)> acceptor;
};

struct BribeOutcome {
  bool success = false;
  std::uint64_t delta = 0;
  double rho_observed = 0;
  std::uint64_t s_required = 0;
  std::uint64_t honest_blocks = 0;
  std::uint64_t attacker_blocks = 0;
  std::uint64_t bribed = 0;
  std::uint64_t free_colluders = 0;
  std::uint64_t refusals = 0;
  std::uint64_t double_signs = 0;
  double attacker_cost = 0;
  double attacker_profit = 0;
  std::vector<double> payoff;  // per stakeholder
};

/// Builds an honest chain with the CoA engine, then races an attacker fork
/// that only recruits skipped-slot stakeholders and bribe acceptors. Every
/// block on both chains goes through full validation.
BribeOutcome simulate_bribe_attack(const BribeScenario& s);

struct DosResult {
  /// Seconds per block on the final best chain.
  double mean_interval = 0;
  /// G0 / (1-f)^ell: one chain tip, no competing branches.
  double closed_form = 0;
  std::uint64_t blocks = 0;
  std::uint64_t fork_blocks = 0;
};

/// Dense-CoA network run where stake fraction f refuses every committee
/// seat; runs until the best chain holds `blocks` blocks. With
/// `help_prior_blocks` honest members also extend the parent of a stalled
/// tip, so competing branches can overtake it; without it only the best
/// tip is ever extended.
DosResult simulate_withholding_dos(unsigned ell, double f, double g0, std::uint64_t blocks, std::uint64_t seed,
                                   bool help_prior_blocks = true);

}  // namespace coalab::attacks
