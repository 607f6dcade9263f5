#include "coalab/netsim.hpp"

#include <cmath>
#include <stdexcept>

#include "coalab/attacks.hpp"
#include "coalab/dense_coa.hpp"
#include "coalab/issuance.hpp"
#include "coalab/ppcoin.hpp"

namespace coalab {
namespace netsim {

Network::Network(const ScenarioConfig& config, std::size_t nodes)
    : model_(config.delays), rng_(config.seed, 0x0de1a7) {
  Rng clocks(config.seed, 0xc10c);
  drift_.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    drift_.push_back(config.clock_drift > 0 ? clocks.uniform(-config.clock_drift, config.clock_drift) : 0.0);
  }
}

double Network::delay() { return rng_.uniform(model_.min, model_.max); }

std::vector<NodeSetup> make_nodes(const ScenarioConfig& config) {
  const auto& reg = StrategyRegistry::builtin();
  std::vector<NodeSetup> nodes;
  for (const auto& a : config.stake) {
    NodeSetup n;
    n.id = a.owner;
    const Behavior* b = config.behavior_of(a.owner);
    n.strategy = b ? reg.create(b->strategy, b->params) : reg.create("honest", nlohmann::json::object());
    nodes.push_back(std::move(n));
  }
  return nodes;
}

Seed genesis_seed(const ScenarioConfig& config) {
  const unsigned k = config.params.kappa;
  const std::uint64_t v = mix64(config.seed ^ 0x9e3779b97f4a7c15ULL);
  return Seed{k == 64 ? v : v >> (64 - k), k};
}

}  // namespace netsim

SimTrace run_scenario(const ScenarioConfig& config, bool keep_lines) {
  if (auto errs = validate_scenario(config); !errs.empty()) throw ConfigError(std::move(errs));
  SimTrace trace(keep_lines);
  if (config.duration_slots > 0 || config.duration_seconds > 0) {
    switch (config.protocol) {
      case Protocol::CoA:
        trace = netsim::run_coa(config, keep_lines);
        break;
      case Protocol::DenseCoA:
        trace = netsim::run_dense(config, keep_lines);
        break;
      case Protocol::PPCoin:
        trace = netsim::run_ppcoin(config, keep_lines);
        break;
    }
  }
  if (config.analysis) run_analysis(config, trace);
  return trace;
}

namespace {

using nlohmann::json;

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::vector<FieldError>{{std::string("analysis.") + key, "must be a number"}});
  return j.at(key).get<double>();
}

std::uint64_t count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(std::vector<FieldError>{{std::string("analysis.") + key, "must be a non-negative integer"}});
  }
  return j.at(key).get<std::uint64_t>();
}

void bribe_analysis(const ScenarioConfig& config, const json& a, Trace& t) {
  attacks::BribeScenario s;
  s.stakeholders = static_cast<std::uint32_t>(count(a, "stakeholders", s.stakeholders));
  s.participation = num(a, "participation", s.participation);
  s.warmup_slots = count(a, "warmup_slots", s.warmup_slots);
  s.confirmations = count(a, "confirmations", s.confirmations);
  s.value = num(a, "V", s.value);
  s.fee = num(a, "eps", s.fee);
  s.bribe = num(a, "mu", s.bribe);
  s.budget = num(a, "budget", s.budget);
  s.perceived_success = num(a, "P", s.perceived_success);
  s.free_colluder_bribe = num(a, "free_colluder_bribe", s.free_colluder_bribe);
  s.ppcoin_rules = config.protocol == Protocol::PPCoin;
  s.horizon_slots = count(a, "horizon_slots", s.horizon_slots);
  s.seed = config.seed;
  // Stakeholders named in the behaviour table decide through their strategy.
  auto nodes = std::make_shared<std::vector<netsim::NodeSetup>>(netsim::make_nodes(config));
  s.acceptor = [nodes, &s](StakeholderId who, double mu, double fee) {
    for (auto& n : *nodes) {
      if (n.id == who) return n.strategy.accept_bribe(BribeOffer{mu, fee, s.ppcoin_rules}, n.state);
    }
    return attacks::accepts_bribe(mu, fee, 0.0, s.perceived_success, s.ppcoin_rules);
  };
  const auto r = attacks::simulate_bribe_attack(s);
  t.metric("bribe.success", r.success ? 1.0 : 0.0);
  t.metric("bribe.delta", static_cast<double>(r.delta));
  t.metric("bribe.rho_observed", r.rho_observed);
  t.metric("bribe.s_required", static_cast<double>(r.s_required));
  t.metric("bribe.honest_blocks", static_cast<double>(r.honest_blocks));
  t.metric("bribe.attacker_blocks", static_cast<double>(r.attacker_blocks));
  t.metric("bribe.bribed", static_cast<double>(r.bribed));
  t.metric("bribe.free_colluders", static_cast<double>(r.free_colluders));
  t.metric("bribe.refusals", static_cast<double>(r.refusals));
  t.metric("bribe.double_signs", static_cast<double>(r.double_signs));
  t.metric("bribe.attacker_cost", r.attacker_cost);
  t.metric("bribe.attacker_profit", r.attacker_profit);
  t.metric("bribe.acceptance_threshold",
           attacks::bribe_acceptance_threshold(s.fee, 0.0, s.perceived_success, s.ppcoin_rules));
}

}  // namespace

void run_analysis(const ScenarioConfig& config, Trace& t) {
  const json& a = *config.analysis;
  const std::string type = a.at("type").get<std::string>();
  const double g0 = static_cast<double>(config.params.g0_seconds);
  if (type == "claim1") {
    const auto s = attacks::min_safe_confirmations_observed(num(a, "V", 100), num(a, "eps", 10),
                                                            num(a, "rho_observed", 0.7), num(a, "delta", 3));
    t.metric("S", static_cast<double>(s));
    t.metric("wait_minutes", attacks::wait_seconds(s, g0) / 60);
  } else if (type == "claim2") {
    const auto s = attacks::min_safe_confirmations_density(num(a, "V", 100), num(a, "eps", 10),
                                                           num(a, "rho", 0.7), num(a, "K", 20));
    t.metric("S", static_cast<double>(s));
    t.metric("wait_hours", attacks::wait_seconds(s, g0) / 3600);
  } else if (type == "takeover") {
    const double ell = num(a, "ell", 459), p = num(a, "p", 0.1), q = num(a, "q", 0.2);
    const double e = attacks::takeover_log_bound(ell, p, q);
    t.metric("q_hat", attacks::takeover_q_hat(p, q));
    t.metric("exponent", e);
    t.metric("log2_attempts", e / std::log(2.0));
    if (const auto trials = count(a, "mc_trials", 0); trials > 0) {
      const auto mc = attacks::takeover_monte_carlo(static_cast<unsigned>(count(a, "mc_ell", 20)),
                                                    num(a, "mc_p", 0.3), num(a, "mc_q", 0), trials, config.seed);
      t.metric("mc.n", static_cast<double>(mc.n));
      t.metric("mc.empirical", mc.empirical);
      t.metric("mc.bound", mc.bound);
    }
  } else if (type == "bribe") {
    bribe_analysis(config, a, t);
  } else if (type == "timeweight") {
    ppcoin::TimeweightAttack cfg;
    cfg.version = a.value("version", std::string("v0.2")) == "v0.3" ? ppcoin::Version::V03 : ppcoin::Version::V02;
    cfg.attacker_stake = num(a, "stake", cfg.attacker_stake);
    cfg.wait_multiplier = num(a, "multiplier", cfg.wait_multiplier);
    cfg.honest_participation = num(a, "honest_participation", cfg.honest_participation);
    cfg.honest_age = static_cast<std::int64_t>(num(a, "honest_age_days", 10) * ppcoin::kSecondsPerDay);
    const auto r = ppcoin::simulate_timeweight_attack(cfg, count(a, "trials", 100000), config.seed);
    t.metric("win_probability", r.win_probability);
    t.metric("std_error", r.std_error);
    t.metric("analytic", r.analytic);
  } else if (type == "withholding") {
    const auto r = attacks::simulate_withholding_dos(static_cast<unsigned>(count(a, "ell", 23)), num(a, "f", 0.1),
                                                     num(a, "g0", g0), count(a, "blocks", 1000), config.seed,
                                                     a.value("help_prior_blocks", true));
    t.metric("mean_interval_minutes", r.mean_interval / 60);
    t.metric("closed_form_minutes", r.closed_form / 60);
    t.metric("blocks", static_cast<double>(r.blocks));
    t.metric("fork_blocks", static_cast<double>(r.fork_blocks));
  } else if (type == "grinding") {
    const double f = num(a, "f", 0.05);
    const auto ell = static_cast<unsigned>(count(a, "ell", 23));
    t.metric("log2_attempts", dense::grinding_log2(f, ell));
  } else if (type == "issuance") {
    issuance::Params p;
    p.production_cost_per_coin = num(a, "cost", p.production_cost_per_coin);
    p.demand.kind = issuance::demand_kind_from_string(a.value("demand", std::string("constant")));
    p.demand.base = num(a, "demand_base", p.demand.base);
    p.demand.slope = num(a, "demand_slope", p.demand.slope);
    p.demand.shock_step = count(a, "shock_step", p.demand.shock_step);
    p.demand.shock_factor = num(a, "shock_factor", p.demand.shock_factor);
    p.fixed_difficulty = num(a, "difficulty", p.fixed_difficulty);
    p.min_gap_seconds = num(a, "min_gap_seconds", p.min_gap_seconds);
    p.maturity_n = count(a, "maturity_n", p.maturity_n);
    p.step_seconds = num(a, "step_seconds", p.step_seconds);
    p.reward = num(a, "reward", p.reward);
    p.initial_supply = num(a, "initial_supply", p.initial_supply);
    p.initial_miners = num(a, "initial_miners", p.initial_miners);
    p.adjustment = num(a, "adjustment", p.adjustment);
    p.miner_elasticity = num(a, "miner_elasticity", p.miner_elasticity);
    if (a.contains("last_pow_block")) p.last_pow_block = count(a, "last_pow_block", 0);
    if (a.value("difficulty_mode", std::string("fixed")) == "retarget") p.difficulty = issuance::Difficulty::Retarget;
    const auto r = issuance::simulate_issuance(p, count(a, "steps", 5000), count(a, "burn_in", 2500), config.seed);
    t.metric("mean_value", r.mean_value);
    t.metric("value_cv", r.value_cv);
    t.metric("relative_gap", r.relative_gap);
    t.metric("block_rate", r.block_rate);
    t.metric("coinbases", static_cast<double>(r.coinbases));
    t.metric("rejected_coinbases", static_cast<double>(r.rejected_coinbases));
    t.metric("final_miners", r.series.back().miners);
  } else {
    throw ConfigError(std::vector<FieldError>{{"analysis.type", "unknown analysis '" + type + "'"}});
  }
}

}  // namespace coalab
