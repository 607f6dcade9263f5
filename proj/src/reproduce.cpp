#include "coalab/reproduce.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>

#include "coalab/attacks.hpp"
#include "coalab/comb.hpp"
#include "coalab/dense_coa.hpp"
#include "coalab/issuance.hpp"
#include "coalab/ppcoin.hpp"

namespace coalab {

bool ReproReport::pass() const {
  if (rows.empty()) return false;
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ReproRow exact(std::string q, double expected, double computed) {
  return {std::move(q), fmt("%.10g", expected), computed, "exact", computed == expected};
}

ReproRow within(std::string q, double expected, double computed, double tol) {
  return {std::move(q), fmt("%.10g", expected), computed, "+/- " + fmt("%.4g", tol),
          std::abs(computed - expected) <= tol};
}

ReproRow relative(std::string q, double expected, double computed, double frac) {
  return {std::move(q), fmt("%.10g", expected), computed, "+/- " + fmt("%.4g", frac * 100) + "%",
          std::abs(computed - expected) <= frac * expected};
}

ReproRow at_most(std::string q, std::string expected, double computed, double limit) {
  return {std::move(q), std::move(expected), computed, "<= " + fmt("%.6g", limit), computed <= limit};
}

ReproRow runtime(double seconds, double limit) {
  return {"runtime_seconds", "< " + fmt("%.6g", limit), seconds, "limit", seconds < limit};
}

void claim1(ReproReport& r, std::uint64_t) {
  r.title = "Observed-density confirmation bound";
  r.criterion = 1;
  // The illustration "slot pattern with three net misses, 10 of 14 after B0".
  const bool before[] = {true, true, false, true, true, true, true, true, true, true, false, false, false, true, false};
  const auto delta = attacks::measure_delta(before);
  r.rows.push_back(exact("delta of illustrated slot pattern", 3, static_cast<double>(delta)));
  const auto s = attacks::min_safe_confirmations_observed(100, 10, 10.0 / 14, static_cast<double>(delta));
  r.rows.push_back(exact("S(V=100, eps=10, rho'=10/14, delta=3)", 17, static_cast<double>(s)));
  r.rows.push_back(exact("closed form equals exhaustive scan",
                         static_cast<double>(attacks::min_safe_confirmations_scan(100, 10, 10.0 / 14, 3)),
                         static_cast<double>(s)));
  // The density instance restated with -delta + 1 = -19.
  r.rows.push_back(exact("S(V=100, eps=10, rho'=0.7, delta=20)", 42,
                         static_cast<double>(attacks::min_safe_confirmations_observed(100, 10, 0.7, 20))));
}

void claim2(ReproReport& r, std::uint64_t) {
  r.title = "Density-assumption confirmation bound";
  r.criterion = 1;
  const auto t0 = Clock::now();
  const auto s = attacks::min_safe_confirmations_density(100, 10, 0.7, 20);
  const double hours = attacks::wait_seconds(s, 300) / 3600;
  const double secs = since(t0);
  r.rows.push_back(exact("S(V=100, eps=10, rho=0.7, K=20)", 42, static_cast<double>(s)));
  r.rows.push_back(exact("wait hours at G0=5 min", 3.5, hours));
  r.rows.push_back(runtime(secs, 1e-3));
}

void takeover(ReproReport& r, std::uint64_t seed) {
  r.title = "Majority-takeover tail exponent";
  r.criterion = 2;
  auto t0 = Clock::now();
  const double e = attacks::takeover_log_bound(459, 0.1, 0.2);
  const double secs = since(t0);
  r.rows.push_back(within("exponent E(ell=459, p=0.1, q=0.2)", 371, e, 1));
  r.rows.push_back(runtime(secs, 1e-3));
  t0 = Clock::now();
  const auto mc = attacks::takeover_monte_carlo(20, 0.3, 0, 1'000'000, seed);
  const double mc_secs = since(t0);
  r.rows.push_back(at_most("empirical Pr(Y > 20) at (p=0.3, q=0), 1e6 samples", "<= e^-E", mc.empirical, mc.bound));
  r.rows.push_back(runtime(mc_secs, 30));
}

void dense_dos(ReproReport& r, std::uint64_t seed) {
  r.title = "Dense-CoA withholding slowdown";
  r.criterion = 3;
  const auto t0 = Clock::now();
  const auto d = attacks::simulate_withholding_dos(23, 0.1, 300, 1000, seed);
  const double secs = since(t0);
  const double minutes = d.mean_interval / 60;
  r.rows.push_back({"mean block interval minutes (f=0.1, ell=23, 1000 blocks)", "40 .. 56.4", minutes,
                    "[40, 56.4]", minutes >= 40 && minutes <= 56.4});
  r.rows.push_back(within("single-tip closed form minutes", 56.4, d.closed_form / 60, 0.05));
  r.rows.push_back(runtime(secs, 60));
}

void grinding(ReproReport& r, std::uint64_t) {
  r.title = "Dense-CoA committee grinding cost";
  r.criterion = 4;
  const auto t0 = Clock::now();
  const double a = dense::grinding_log2(0.05, 23);
  const double b = dense::grinding_log2(0.1, 30);
  const double secs = since(t0);
  r.rows.push_back(within("log2 attempts (f=0.05, ell=23)", 99.4, a, 0.05));
  r.rows.push_back(within("log2 attempts (f=0.1, ell=30)", 99.7, b, 0.05));
  r.rows.push_back(runtime(secs, 1e-3));
}

void ppcoin_mk(ReproReport& r, std::uint64_t seed) {
  r.title = "PPCoin k-streak interval";
  r.criterion = 5;
  const auto t0 = Clock::now();
  const auto st = ppcoin::simulate_streaks(4, 6, 10'000'000, seed);
  const double secs = since(t0);
  r.rows.push_back(exact("M^k for M=4, k=6", 4096, ppcoin::expected_reorg_interval(4, 6)));
  r.rows.push_back(relative("mean gap between 6-streaks, 1e7 blocks", 4096, st.mean_gap, 0.15));
  r.rows.push_back(runtime(secs, 120));
}

void timeweight(ReproReport& r, std::uint64_t seed) {
  r.title = "Timeweight waiting advantage";
  r.criterion = 6;
  const auto t0 = Clock::now();
  ppcoin::TimeweightAttack v2;
  v2.version = ppcoin::Version::V02;
  v2.attacker_stake = 0.1;
  v2.wait_multiplier = 5;
  const auto a = ppcoin::simulate_timeweight_attack(v2, 100'000, seed);
  ppcoin::TimeweightAttack v3 = v2;
  v3.version = ppcoin::Version::V03;
  v3.honest_age = 100 * ppcoin::kSecondsPerDay;  // past the cap: saturated
  const auto b = ppcoin::simulate_timeweight_attack(v3, 100'000, seed + 1);
  const double secs = since(t0);
  r.rows.push_back(within("v0.2 win probability (10% stake, x5 age)", 0.5, a.win_probability, 0.03));
  r.rows.push_back(within("v0.3 saturated win probability", 0.1, b.win_probability, 0.02));
  r.rows.push_back(runtime(secs, 60));
}

void mu_concat(ReproReport& r, std::uint64_t seed) {
  r.title = "Concatenation comb last-player advantage";
  r.criterion = 7;
  const auto t0 = Clock::now();
  CombSpec spec{CombKind::Concat, 16, 1};
  for (double p : {0.02, 0.05, 0.1}) {
    const auto est = last_player_advantage(spec, p, 100'000, seed);
    const double mu = 2 * p - p * p;
    r.rows.push_back({"mu-hat at p=" + fmt("%.2g", p), fmt("%.6g", mu), est.mean,
                      "3 sigma (" + fmt("%.3g", 3 * est.std_error) + ")",
                      std::abs(est.mean - mu) <= 3 * est.std_error});
  }
  r.rows.push_back(runtime(since(t0), 60));
}

void mu_majority(ReproReport& r, std::uint64_t) {
  r.title = "Majority comb tie frequency";
  r.criterion = 7;
  const auto t0 = Clock::now();
  r.rows.push_back(exact("tied prefixes of 2^8 at w=9", 70, static_cast<double>(majority_tie_count(9))));
  r.rows.push_back(exact("tie probability at w=9", 70.0 / 256, majority_tie_probability(9)));
  r.rows.push_back(runtime(since(t0), 60));
}

void kz_bounds(ReproReport& r, std::uint64_t seed) {
  r.title = "KZ extractor coalition bounds";
  r.criterion = 8;
  const auto t0 = Clock::now();
  for (double eps : {0.01, 0.05, 0.1}) {
    const auto b = coalition_bounds(459, 51, eps);
    r.rows.push_back(exact("achievable c at eps=" + fmt("%.2g", eps), 2 * eps, b.achievable));
    r.rows.push_back(within("upper c at eps=" + fmt("%.2g", eps), 91.8 * eps, b.upper, 1e-9 * eps));
  }
  // One coalition member fits the bound with implied eps = c / 2.
  const CombSpec spec{CombKind::IteratedMajority, 4, 9};
  const std::vector<std::size_t> coalition{35};
  const double eps = static_cast<double>(coalition.size()) / coalition_bounds(36, 4, 1.0).achievable;
  const auto strategy = target_strategy(spec, [](const Seed& s) { return s.value == 0; });
  const double bias = coalition_bias(spec, coalition, strategy, 1'000'000, seed);
  r.rows.push_back(at_most("statistical distance, 1 of 36 inputs adversarial", "<= eps + 0.02", bias, eps + 0.02));
  r.rows.push_back(runtime(since(t0), 180));
}

void fork_rate(ReproReport& r, std::uint64_t seed) {
  r.title = "PPCoin same-second fork rate";
  r.criterion = 12;
  const auto t0 = Clock::now();
  const auto st = ppcoin::simulate_fork_rate(1000, 1'000'000'000, seed);
  const double secs = since(t0);
  r.rows.push_back(relative("pairwise-collision interval seconds, 1e9 s", 360000, st.pairwise_interval, 0.2));
  r.rows.push_back(relative("two-or-more arrival interval seconds, 1e9 s", 720000, st.poisson_interval, 0.2));
  r.rows.push_back(runtime(secs, 120));
}

issuance::Params equilibrium_params() {
  issuance::Params p;
  p.demand.base = 1e6;
  p.initial_supply = 5e5;
  p.initial_miners = 100;
  p.fixed_difficulty = 1e-3;
  p.min_gap_seconds = 0;
  p.reward = 50;
  p.adjustment = 0.05;
  return p;
}

void issuance_run(ReproReport& r, std::uint64_t seed) {
  r.title = "PoW issuance equilibrium and min-gap floor";
  r.criterion = 13;
  const auto t0 = Clock::now();
  const auto p = equilibrium_params();
  const auto s = issuance::simulate_issuance(p, 20'000, 10'000, seed);
  r.rows.push_back({"|value - cost| / cost after burn-in", "< 0.1", s.relative_gap, "< 0.1", s.relative_gap < 0.1});

  // Floor at one block per 60 s; 1000 miners at 1e-3 per step sit on it.
  issuance::Params f = p;
  f.min_gap_seconds = 60;
  f.adjustment = 0;  // hold the population fixed
  const double floor_rate = 1.0 / f.min_gap_seconds;
  f.initial_miners = 500;
  r.rows.push_back(within("analytic rate below the threshold (500 miners)", 0.5 * floor_rate,
                          issuance::expected_block_rate(f, 500), 1e-12));
  f.initial_miners = 8000;
  r.rows.push_back(within("analytic rate above the threshold (8000 miners)", floor_rate,
                          issuance::expected_block_rate(f, 8000), 1e-12));
  const auto clamped = issuance::simulate_issuance(f, 20'000, 1'000, seed + 1);
  r.rows.push_back(relative("simulated rate with 8000 miners", floor_rate, clamped.block_rate, 0.05));
  r.rows.push_back(runtime(since(t0), 30));
}

using Runner = std::function<void(ReproReport&, std::uint64_t)>;

const std::vector<std::pair<std::string, Runner>>& table() {
  static const std::vector<std::pair<std::string, Runner>> t = {
      {"claim1", claim1},       {"claim2", claim2},       {"takeover", takeover},   {"dense-dos", dense_dos},
      {"grinding", grinding},   {"ppcoin-mk", ppcoin_mk}, {"timeweight", timeweight}, {"mu-concat", mu_concat},
      {"mu-majority", mu_majority}, {"kz-bounds", kz_bounds}, {"fork-rate", fork_rate}, {"issuance", issuance_run},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& reproduce_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [id, fn] : table()) v.push_back(id);
    return v;
  }();
  return ids;
}

ReproReport reproduce(const std::string& id, std::uint64_t seed) {
  for (const auto& [name, fn] : table()) {
    if (name != id) continue;
    ReproReport r;
    r.id = id;
    const auto t0 = Clock::now();
    fn(r, seed);
    r.seconds = since(t0);
    return r;
  }
  throw std::invalid_argument("unknown reproduce id '" + id + "'");
}

}  // namespace coalab
