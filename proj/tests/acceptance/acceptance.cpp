// Acceptance runner: one PASS/FAIL line per criterion.
//   coalab_acceptance            run all criteria
//   coalab_acceptance 3 9        run the listed criteria
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "../support/fixtures.hpp"
#include "../support/invariants.hpp"
#include "coalab/builtin_scenarios.hpp"
#include "coalab/fts.hpp"
#include "coalab/netsim.hpp"
#include "coalab/reproduce.hpp"

using namespace coalab;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Runs reproduce ids and prints their rows; passes when every row passes.
Outcome from_reproduce(std::initializer_list<const char*> ids) {
  Outcome o{true, ""};
  for (const char* id : ids) {
    const ReproReport r = reproduce(id);
    for (const auto& row : r.rows) {
      std::printf("    %-12s %-44s computed %-14s expected %-14s tol %-14s %s\n", id, row.quantity.c_str(),
                  format_number(row.computed).c_str(), row.expected.c_str(), row.tolerance.c_str(),
                  row.pass ? "ok" : "MISS");
    }
    o.pass = o.pass && r.pass();
    if (!o.summary.empty()) o.summary += "; ";
    o.summary += std::string(id) + (r.pass() ? " ok" : " failed");
  }
  return o;
}

Outcome invariants() {
  constexpr std::uint64_t kCases = 1000;
  const auto t0 = Clock::now();
  const auto results = testing::run_all_properties(kCases, 20261015);
  const double secs = seconds_since(t0);
  Outcome o{secs < 120.0, ""};
  for (const auto& r : results) {
    std::printf("    %-40s cases %-6llu failures %-4llu %s\n", r.name.c_str(),
                static_cast<unsigned long long>(r.cases), static_cast<unsigned long long>(r.failures),
                r.first_failure.c_str());
    o.pass = o.pass && r.ok() && r.cases >= kCases;
  }
  o.summary = std::to_string(results.size()) + " properties x " + std::to_string(kCases) + " cases, " +
              fmt("%.1f s (limit 120 s)", secs);
  return o;
}

Outcome determinism() {
  const auto t0 = Clock::now();
  const auto& all = builtin_scenarios();
  unsigned same = 0;
  for (const auto& c : all) {
    const Digest a = run_scenario(c, false).digest();
    const Digest b = run_scenario(c, false).digest();
    std::printf("    %-24s %s %s\n", c.name.c_str(), to_hex(a).substr(0, 16).c_str(), a == b ? "identical" : "DIFFERS");
    same += a == b;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = all.size() >= 20 && same == all.size() && secs < 120.0;
  o.summary = std::to_string(same) + "/" + std::to_string(all.size()) + " scenarios identical, " +
              fmt("%.1f s (limit 120 s)", secs);
  return o;
}

Outcome fts_proportionality() {
  const auto t0 = Clock::now();
  Rng rng(11, 0xf75);
  const Amount supply = Amount{1} << 20;
  const auto alloc = testing::random_allocation(rng, supply, 10, 3);
  const auto ledger = LedgerState::from_allocation(alloc);
  std::map<StakeholderId, Amount> stake;
  for (const auto& a : alloc) stake[a.owner] += a.amount;

  // Chi-square of 1e5 slot draws against the stake distribution.
  constexpr std::uint64_t kDraws = 100000;
  std::map<StakeholderId, std::uint64_t> hits;
  const Seed seed(0x5eed, 20);
  for (std::uint64_t z = 1; z <= kDraws; ++z) ++hits[derive_slot_winner(ledger, {0, z, seed}).owner];
  double chi2 = 0;
  for (const auto& [owner, amount] : stake) {
    const double expect = static_cast<double>(kDraws) * static_cast<double>(amount) / static_cast<double>(supply);
    const double d = static_cast<double>(hits[owner]) - expect;
    chi2 += d * d / expect;
  }
  const boost::math::chi_squared_distribution<> dist(static_cast<double>(stake.size() - 1));
  const double p = boost::math::cdf(boost::math::complement(dist, chi2));
  std::printf("    chi-square %.3f on %zu dof, p = %.4f (need > 0.01)\n", chi2, stake.size() - 1, p);

  // Sybil: the same holdings split into many outputs, by allocation and by
  // an in-ledger split, give every satoshi the same owner.
  auto sybil_alloc = alloc;
  for (auto& a : sybil_alloc) a.outputs = static_cast<unsigned>(std::min<Amount>(a.amount, 1 + rng.below(500)));
  const auto sybil = LedgerState::from_allocation(sybil_alloc);
  auto split = ledger;
  const StakeholderId victim = alloc.front().owner;
  for (auto id : split.outputs_of(victim)) {
    const Amount v = split.at(id).amount();
    Transaction tx;
    tx.inputs = {{id, {}}};
    const Amount parts = std::min<Amount>(v, 64);
    for (Amount k = 0; k < parts; ++k) tx.outputs.push_back({victim, v / parts + (k == 0 ? v % parts : 0)});
    split.apply(tx, 1, {});
  }
  std::uint64_t mismatches = 0;
  for (std::uint64_t i = 0; i < supply; ++i) {
    const auto o = follow_the_satoshi(ledger, i).owner;
    mismatches += o != follow_the_satoshi(sybil, i).owner;
    mismatches += o != follow_the_satoshi(split, i).owner;
  }
  std::uint64_t draw_mismatches = 0;
  for (std::uint64_t z = 1; z <= kDraws; ++z) {
    draw_mismatches += derive_slot_winner(ledger, {0, z, seed}).owner != derive_slot_winner(sybil, {0, z, seed}).owner;
  }
  std::printf("    outputs %zu -> %zu (allocation) and %zu (in-ledger split); owner mismatches %llu over all satoshis, "
              "%llu over draws\n",
              ledger.utxo_count(), sybil.utxo_count(), split.utxo_count(),
              static_cast<unsigned long long>(mismatches), static_cast<unsigned long long>(draw_mismatches));
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = p > 0.01 && mismatches == 0 && draw_mismatches == 0 && secs < 30.0;
  o.summary = fmt("p = %.4f", p) + ", Sybil mismatches " + std::to_string(mismatches + draw_mismatches) + ", " +
              fmt("%.1f s (limit 30 s)", secs);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "confirmation depth S=42 and 3.5 h wait", [] { return from_reproduce({"claim2", "claim1"}); }},
      {2, "takeover exponent 371 and tail-bound Monte Carlo", [] { return from_reproduce({"takeover"}); }},
      {3, "dense DoS mean interval in [40, 56.4] min", [] { return from_reproduce({"dense-dos"}); }},
      {4, "grinding cost 99.4 / 99.7 bits", [] { return from_reproduce({"grinding"}); }},
      {5, "PPCoin 6-streak gap near 4096 blocks", [] { return from_reproduce({"ppcoin-mk"}); }},
      {6, "timeweight attack win probabilities", [] { return from_reproduce({"timeweight"}); }},
      {7, "comb mu values and majority tie count", [] { return from_reproduce({"mu-concat", "mu-majority"}); }},
      {8, "coalition bounds and measured bias", [] { return from_reproduce({"kz-bounds"}); }},
      {9, "protocol invariant property suite", invariants},
      {10, "deterministic traces across builtin scenarios", determinism},
      {11, "FTS proportionality and Sybil invariance", fts_proportionality},
      {12, "fork-rate counting conventions", [] { return from_reproduce({"fork-rate"}); }},
      {13, "issuance equilibrium and min-gap floor", [] { return from_reproduce({"issuance"}); }},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    try {
      wanted.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::fprintf(stderr, "usage: %s [criterion ...]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    ++ran;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("AC%02d %s  %s: %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.summary.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
