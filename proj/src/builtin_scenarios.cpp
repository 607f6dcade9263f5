#include "coalab/builtin_scenarios.hpp"

namespace coalab {
namespace {

using nlohmann::json;

// `nodes` stakeholders sharing 2^kappa satoshis evenly, remainder to node 0.
std::vector<Allocation> even_stake(unsigned nodes, unsigned kappa, unsigned outputs) {
  const Amount supply = Amount{1} << kappa;
  std::vector<Allocation> s;
  for (unsigned i = 0; i < nodes; ++i) {
    s.push_back({i, supply / nodes + (i == 0 ? supply % nodes : 0), outputs});
  }
  return s;
}

ScenarioConfig coa(const std::string& name, std::uint64_t slots) {
  ScenarioConfig c;
  c.name = name;
  c.protocol = Protocol::CoA;
  c.params.t0 = 20;
  c.stake = even_stake(8, c.params.kappa, 3);
  c.duration_slots = slots;
  c.seed = 11;
  return c;
}

ScenarioConfig dense(const std::string& name, std::uint64_t blocks) {
  ScenarioConfig c;
  c.name = name;
  c.protocol = Protocol::DenseCoA;
  c.params.committee = 5;
  c.params.t0 = 20;
  c.stake = even_stake(8, c.params.kappa, 3);
  c.duration_slots = blocks;
  c.seed = 12;
  return c;
}

ScenarioConfig ppc(const std::string& name, std::uint64_t seconds) {
  ScenarioConfig c;
  c.name = name;
  c.protocol = Protocol::PPCoin;
  c.stake = even_stake(8, c.params.kappa, 2);
  c.duration_seconds = seconds;
  c.seed = 13;
  return c;
}

ScenarioConfig analysis(const std::string& name, Protocol p, json a) {
  ScenarioConfig c;
  c.name = name;
  c.protocol = p;
  c.stake = even_stake(4, c.params.kappa, 1);
  c.analysis = std::move(a);
  c.seed = 7;
  return c;
}

std::vector<ScenarioConfig> build() {
  std::vector<ScenarioConfig> v;

  v.push_back(coa("coa-honest", 120));
  {
    auto c = coa("coa-majority", 120);
    c.params.kappa = 12;
    c.params.w = 3;
    c.params.comb = CombKind::Majority;
    c.stake = even_stake(8, 12, 3);
    v.push_back(c);
  }
  {
    auto c = coa("coa-iterated-majority", 120);
    c.params.kappa = 8;
    c.params.w = 9;
    c.params.comb = CombKind::IteratedMajority;
    c.stake = even_stake(8, 8, 2);
    v.push_back(c);
  }
  {
    auto c = coa("coa-offline", 160);
    c.behaviors.push_back({3, "offline", json::object()});
    v.push_back(c);
  }
  {
    auto c = coa("coa-intermittent", 120);
    for (StakeholderId i = 0; i < 8; ++i) c.behaviors.push_back({i, "intermittent", json{{"online", 0.7}}});
    v.push_back(c);
  }
  {
    auto c = coa("coa-withhold", 120);
    c.behaviors.push_back({5, "withhold", json::object()});
    v.push_back(c);
  }
  {
    auto c = coa("coa-no-checkpoints", 120);
    c.params.checkpoints = false;
    v.push_back(c);
  }
  {
    auto c = coa("coa-wide-delays", 120);
    c.delays = DelayModel{0.5, 5.25, 10.0, "uniform"};
    c.clock_drift = 10;
    v.push_back(c);
  }
  {
    auto c = coa("coa-zero-drift", 120);
    c.clock_drift = 0;
    v.push_back(c);
  }

  v.push_back(dense("dense-honest", 60));
  {
    auto c = dense("dense-withhold", 60);
    c.behaviors.push_back({2, "withhold", json::object()});
    v.push_back(c);
  }
  {
    auto c = dense("dense-intermittent", 40);
    for (StakeholderId i = 0; i < 8; ++i) c.behaviors.push_back({i, "intermittent", json{{"online", 0.9}}});
    v.push_back(c);
  }

  v.push_back(ppc("ppcoin-honest", 4 * 3600));
  {
    auto c = ppc("ppcoin-multifork", 4 * 3600);
    for (StakeholderId i = 0; i < 4; ++i) c.behaviors.push_back({i, "ppcoin-multifork", json{{"tips", 3}}});
    v.push_back(c);
  }
  {
    auto c = ppc("ppcoin-v02", 4 * 3600);
    c.params.ppcoin_version = "v0.2";
    v.push_back(c);
  }

  v.push_back(analysis("claim1", Protocol::CoA, {{"type", "claim1"}, {"V", 100}, {"eps", 10}, {"rho_observed", 10.0 / 14}, {"delta", 3}}));
  v.push_back(analysis("claim2", Protocol::CoA, {{"type", "claim2"}, {"V", 100}, {"eps", 10}, {"rho", 0.7}, {"K", 20}}));
  v.push_back(analysis("takeover", Protocol::CoA,
                       {{"type", "takeover"}, {"ell", 459}, {"p", 0.1}, {"q", 0.2}, {"mc_trials", 20000}}));
  v.push_back(analysis("grinding", Protocol::DenseCoA, {{"type", "grinding"}, {"f", 0.05}, {"ell", 23}}));
  v.push_back(analysis("withholding-short", Protocol::DenseCoA,
                       {{"type", "withholding"}, {"ell", 23}, {"f", 0.1}, {"blocks", 40}}));
  v.push_back(analysis("bribe-coa", Protocol::CoA, {{"type", "bribe"}, {"P", 0.5}}));
  {
    auto c = analysis("bribe-ppcoin", Protocol::PPCoin, {{"type", "bribe"}, {"P", 0.5}});
    c.behaviors.push_back({1, "bribe-acceptor", json{{"P", 0.5}}});
    v.push_back(c);
  }
  v.push_back(analysis("timeweight-v02", Protocol::PPCoin,
                       {{"type", "timeweight"}, {"version", "v0.2"}, {"stake", 0.1}, {"multiplier", 5}, {"trials", 20000}}));
  v.push_back(analysis("timeweight-v03", Protocol::PPCoin,
                       {{"type", "timeweight"}, {"version", "v0.3"}, {"stake", 0.1}, {"multiplier", 5},
                        {"honest_age_days", 100}, {"trials", 20000}}));
  v.push_back(analysis("issuance-constant", Protocol::CoA,
                       {{"type", "issuance"}, {"initial_supply", 5e5}, {"min_gap_seconds", 0}, {"steps", 20000},
                        {"burn_in", 10000}}));
  v.push_back(analysis("issuance-shock", Protocol::CoA,
                       {{"type", "issuance"}, {"demand", "shock"}, {"shock_step", 2000}, {"shock_factor", 2.0},
                        {"steps", 4000}, {"burn_in", 1000}}));
  return v;
}

}  // namespace

const std::vector<ScenarioConfig>& builtin_scenarios() {
  static const std::vector<ScenarioConfig> all = build();
  return all;
}

std::optional<ScenarioConfig> find_builtin(const std::string& name) {
  for (const auto& c : builtin_scenarios()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

}  // namespace coalab
