#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>

#include "coalab/attacks.hpp"
#include "coalab/coa.hpp"
#include "coalab/rng.hpp"
#include "coalab/signature.hpp"

namespace coalab::attacks {
namespace {

struct Chain {
  std::vector<Block> blocks;
  std::vector<coa::ChainState> states;
  std::set<std::uint64_t> indices;

  const Block& tip_block() const { return blocks.back(); }
  const coa::ChainState& tip() const { return states.back(); }
  Height height() const { return tip().height; }
};

// Validates and appends; returns false when the engine rejects the block.
bool extend(const coa::Engine& engine, Chain& c, const Block& b) {
  auto on_path = [&c](std::uint64_t idx) { return c.indices.count(idx) > 0; };
  auto t = engine.transition(c.tip(), c.tip_block(), b, std::nullopt, on_path);
  if (!t.state) return false;
  c.blocks.push_back(b);
  c.states.push_back(std::move(*t.state));
  c.indices.insert(b.index);
  return true;
}

// Tries the block with `txs` first and falls back to an empty block, so a
// frozen wallet output only delays the payment.
bool produce(const coa::Engine& engine, Chain& c, std::uint64_t idx, StakeholderId who,
             std::vector<Transaction>& pending) {
  const std::int64_t ts = static_cast<std::int64_t>(idx) * engine.params().g0;
  if (!pending.empty()) {
    if (extend(engine, c, engine.make_block(c.tip(), c.tip_block(), idx, ts, who, pending))) {
      pending.clear();
      return true;
    }
  }
  return extend(engine, c, engine.make_block(c.tip(), c.tip_block(), idx, ts, who));
}

Chain truncate(const Chain& c, std::size_t keep) {
  Chain r;
  r.blocks.assign(c.blocks.begin(), c.blocks.begin() + static_cast<std::ptrdiff_t>(keep));
  r.states.assign(c.states.begin(), c.states.begin() + static_cast<std::ptrdiff_t>(keep));
  for (const auto& b : r.blocks) r.indices.insert(b.index);
  return r;
}

}  // namespace

BribeOutcome simulate_bribe_attack(const BribeScenario& s) {
  if (s.stakeholders < 2) throw std::invalid_argument("need at least two stakeholders");
  if (!(s.participation > 0 && s.participation <= 1)) {
    throw std::invalid_argument("participation must be in (0, 1]");
  }
  if (s.bribe < 0 || s.budget < 0 || s.free_colluder_bribe < 0) {
    throw std::invalid_argument("bribes and budget must be non-negative");
  }

  coa::Params params;
  params.kappa = 16;
  params.w = 1;
  params.comb = CombKind::Concat;
  params.t0 = 200;
  auto sigs = std::make_shared<SimulatedSignatures>(s.seed);
  const coa::Engine engine(params, sigs);

  // The attacker's wallet is a separate, tiny holding; the merchant is id 0.
  const StakeholderId attacker = s.stakeholders;
  const Amount supply = Amount{1} << params.kappa;
  const Amount wallet = 64;
  std::vector<Allocation> alloc;
  const Amount share = (supply - wallet) / s.stakeholders;
  for (StakeholderId i = 0; i < s.stakeholders; ++i) {
    const Amount extra = i == 0 ? (supply - wallet) - share * s.stakeholders : 0;
    alloc.push_back({i, share + extra, 2});
  }
  alloc.push_back({attacker, wallet, 1});

  const Seed genesis_seed{mix64(s.seed) >> (64 - params.kappa), params.kappa};
  const Block genesis = make_genesis(genesis_seed);
  Chain honest;
  honest.blocks.push_back(genesis);
  honest.states.push_back(engine.genesis_state(genesis, LedgerState::from_allocation(alloc)));
  honest.indices.insert(genesis.index);

  Rng rng(s.seed, 0xb41b);
  BribeOutcome out;
  out.payoff.assign(s.stakeholders + 1, 0.0);
  std::map<std::uint64_t, StakeholderId> honest_signer;  // index -> creator
  std::vector<bool> produced;                            // produced[idx-1]

  const UtxoId wallet_utxo = honest.tip().ledger.outputs_of(attacker).front();
  auto payment = [&](StakeholderId to, std::uint64_t bound_index, const LedgerState& l) {
    Transaction tx;
    tx.inputs.push_back({wallet_utxo, {}});
    tx.outputs.push_back({to, wallet});
    tx.latest_block_index = bound_index;
    sign_transaction(tx, l, *sigs);
    return tx;
  };

  auto honest_slot = [&](std::uint64_t idx, std::vector<Transaction>& pending) {
    const StakeholderId who = engine.eligible_creator(honest.tip(), idx).owner;
    const bool online = who != attacker && rng.bernoulli(s.participation);
    bool ok = online && produce(engine, honest, idx, who, pending);
    if (ok) honest_signer[idx] = who;
    produced.push_back(ok);
    return ok;
  };

  // Honest history up to B0, then S confirmations on top of it.
  std::uint64_t idx = 0;
  std::uint64_t b0_index = 0;
  std::size_t b0_pos = 0;
  std::vector<Transaction> none;
  while (b0_index == 0) {
    ++idx;
    if (idx > s.warmup_slots) {
      std::vector<Transaction> pay{payment(0, honest.tip().index, honest.tip().ledger)};
      if (honest_slot(idx, pay) && pay.empty()) {
        b0_index = idx;
        b0_pos = honest.blocks.size() - 1;
      }
    } else {
      honest_slot(idx, none);
    }
  }
  std::uint64_t confirmations = 0;
  const std::size_t before_len = b0_index - 1;
  while (confirmations < s.confirmations) {
    ++idx;
    if (honest_slot(idx, none)) ++confirmations;
  }

  const auto flags = std::make_unique<bool[]>(produced.size());
  std::copy(produced.begin(), produced.end(), flags.get());
  const std::span<const bool> all(flags.get(), produced.size());
  const auto before = all.subspan(0, before_len);
  out.delta = measure_delta(before);
  out.rho_observed = s.confirmations ? observed_density(all.subspan(b0_index)) : 1.0;
  out.s_required = min_safe_confirmations_observed(s.value, s.fee, std::max(out.rho_observed, 1e-9),
                                                   static_cast<double>(out.delta));

  // Fork from the last honest block before the delta segment.
  const std::uint64_t segment_start = b0_index - delta_segment_length(before);
  std::size_t fork_pos = b0_pos;
  while (fork_pos > 0 && honest.blocks[fork_pos].index >= segment_start) --fork_pos;
  Chain evil = truncate(honest, fork_pos + 1);
  std::vector<Transaction> double_spend{payment(attacker, evil.tip().index, evil.tip().ledger)};

  double committed = 0;
  std::uint64_t bribed = 0;
  std::vector<std::uint64_t> bribed_by(s.stakeholders + 1, 0);
  std::set<std::pair<StakeholderId, std::uint64_t>> attacker_signatures;

  // Price of one attacker signature, or nullopt when the stakeholder refuses.
  auto offer = [&](StakeholderId who, bool forfeits_slot) -> std::optional<double> {
    if (who == attacker) return 0.0;
    bool yes = s.bribe >= s.free_colluder_bribe;
    if (forfeits_slot) {
      yes = s.acceptor ? s.acceptor(who, s.bribe, s.fee)
                       : accepts_bribe(s.bribe, s.fee, 0.0, s.perceived_success, s.ppcoin_rules);
    }
    const double price = forfeits_slot ? s.bribe : s.free_colluder_bribe;
    if (!yes || committed + price > s.budget) {
      ++out.refusals;
      return std::nullopt;
    }
    return price;
  };

  auto attacker_slot = [&](std::uint64_t slot, StakeholderId who, bool forfeits_slot) {
    if (honest_signer.count(slot) && honest_signer[slot] == who) {
      // Signing here would equivocate; the restricted strategy space rules it out.
      return false;
    }
    const auto price = offer(who, forfeits_slot);
    if (!price || !produce(engine, evil, slot, who, double_spend)) return false;
    committed += *price;
    if (!attacker_signatures.insert({who, slot}).second) ++out.double_signs;
    if (honest_signer.count(slot) && honest_signer[slot] == who) ++out.double_signs;
    if (who != attacker) {
      if (forfeits_slot) {
        ++bribed;
        ++bribed_by[who];
      } else {
        ++out.free_colluders;
      }
    }
    return true;
  };

  // Replay the slots the honest chain already covers.
  for (std::uint64_t slot = evil.tip().index + 1; slot <= idx; ++slot) {
    const StakeholderId who = engine.eligible_creator(evil.tip(), slot).owner;
    const bool skipped = !honest_signer.count(slot);
    // A stakeholder whose honest slot was filled by someone else still has
    // to give up the fee it could earn at this slot on the honest side.
    attacker_slot(slot, who, !skipped);
    if (evil.height() > honest.height()) {
      out.success = true;
      break;
    }
  }
  // Race on fresh slots: each eligible stakeholder picks one side.
  for (std::uint64_t n = 0; !out.success && n < s.horizon_slots; ++n) {
    const std::uint64_t slot = ++idx;
    const StakeholderId h = engine.eligible_creator(honest.tip(), slot).owner;
    const StakeholderId a = engine.eligible_creator(evil.tip(), slot).owner;
    const bool h_online = h != attacker && rng.bernoulli(s.participation);
    bool h_defects = false;
    if (a == h && h_online) {
      h_defects = attacker_slot(slot, a, true);
    } else if (a == h) {
      attacker_slot(slot, a, false);
    } else {
      attacker_slot(slot, a, true);
    }
    if (h_online && !h_defects && produce(engine, honest, slot, h, none)) honest_signer[slot] = h;
    if (evil.height() > honest.height()) out.success = true;
  }

  out.honest_blocks = honest.height();
  out.attacker_blocks = evil.height();
  out.bribed = bribed;
  out.attacker_cost = out.success ? committed : 0.0;
  out.attacker_profit = out.success ? s.value - committed : 0.0;
  // Fees on the abandoned branch are lost; the attacker's branch carries no
  // transactions bound to the honest history, so its creators earn bribes only.
  const std::size_t kept = out.success ? fork_pos + 1 : honest.blocks.size();
  for (std::size_t k = 1; k < kept; ++k) {
    if (honest.blocks[k].creator < s.stakeholders) out.payoff[honest.blocks[k].creator] += s.fee;
  }
  if (out.success) {
    for (StakeholderId i = 0; i < s.stakeholders; ++i) {
      out.payoff[i] += static_cast<double>(bribed_by[i]) * s.bribe;
    }
  }
  return out;
}

}  // namespace coalab::attacks
