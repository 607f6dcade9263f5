#include "invariants.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "coalab/block_tree.hpp"
#include "coalab/chain_node.hpp"
#include "coalab/checkpoint.hpp"
#include "fixtures.hpp"

namespace coalab::testing {
namespace {

coa::Params small_params(Rng& rng) {
  coa::Params p;
  p.kappa = 8;
  p.w = 1;
  p.comb = CombKind::Concat;
  p.g0 = 10;
  p.t0 = 2 * (1 + rng.below(4));
  p.leniency = 5;
  return p;
}

LedgerState small_ledger(Rng& rng, unsigned min_owners, unsigned max_owners, unsigned max_outputs) {
  const unsigned owners = min_owners + static_cast<unsigned>(rng.below(max_owners - min_owners + 1));
  const auto alloc = random_allocation(rng, 256, owners, max_outputs);
  return LedgerState::from_allocation(alloc);
}

struct Recorder {
  PropertyResult r;
  std::uint64_t current_case = 0;
  void fail(const std::string& what) {
    if (r.failures++ == 0) {
      std::ostringstream s;
      s << "case " << current_case << ": " << what;
      r.first_failure = s.str();
    }
  }
  void check(bool cond, const std::string& what) {
    if (!cond) fail(what);
  }
};

// Index of the next slot whose eligible creator is not `offline`.
std::uint64_t next_online_index(const CoaChain& c, std::optional<StakeholderId> offline) {
  std::uint64_t idx = c.tip().index + 1;
  while (offline && c.engine.eligible_creator(c.tip(), idx).owner == *offline) {
    if (++idx - c.tip().index > 100'000) throw std::runtime_error("no online creator within reach");
  }
  return idx;
}

}  // namespace

PropertyResult prop_single_eligible_creator(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "single eligible creator per slot";
  Rng rng(seed, 0x51);
  for (std::uint64_t i = 0; i < cases; ++i) {
    rec.current_case = i;
    auto ledger = small_ledger(rng, 2, 9, 3);
    std::set<StakeholderId> owners;
    for (const auto& [id, u] : ledger.utxos()) owners.insert(u.owner);
    CoaChain c(small_params(rng), ledger, rng.next());
    // Random prefix, with gaps, so later groups and strikes are exercised.
    const auto prefix = rng.below(20);
    for (std::uint64_t k = 0; k < prefix; ++k) c.extend_at(c.tip().index + 1 + rng.below(3));

    const std::uint64_t index = c.tip().index + 1 + rng.below(6);
    const StakeholderId eligible = c.engine.eligible_creator(c.tip(), index).owner;
    const auto ts = coa::min_timestamp(c.tip().timestamp, index, c.tip().index, c.engine.params().g0);
    unsigned accepted = 0;
    for (auto who : owners) {
      const Block b = c.engine.make_block(c.tip(), c.tip_block(), index, ts, who);
      const auto t = c.try_extend(b);
      if (t.state) {
        ++accepted;
        rec.check(who == eligible, "non-eligible stakeholder " + std::to_string(who) + " accepted");
      } else if (who != eligible) {
        rec.check(t.rejection->reason == RejectReason::WrongCreator,
                  std::string("unexpected rejection ") + to_string(t.rejection->reason));
      }
    }
    rec.check(accepted == 1, "slot " + std::to_string(index) + " had " + std::to_string(accepted) +
                                 " accepted creators");
    ++rec.r.cases;
  }
  return rec.r;
}

PropertyResult prop_interleaving_cement(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "interleaving cement exactness";
  Rng rng(seed, 0x1e);
  for (std::uint64_t i = 0; i < cases; ++i) {
    rec.current_case = i;
    CoaChain c(small_params(rng), small_ledger(rng, 2, 8, 3), rng.next());
    const auto spec = c.engine.params().comb_spec();
    const unsigned ell = spec.ell();
    const std::uint64_t target_group = 1 + rng.below(3);
    auto gap = [&] { return rng.bernoulli(0.2) ? 2 + rng.below(2) : 1; };

    // Run to the end of the target group, checking each completed group's seed.
    std::vector<std::uint8_t> bits;
    while (c.tip().group <= target_group) {
      const auto parent_next = c.tip().next;
      const Block b = c.candidate(c.tip().index + gap());
      bits.push_back(block_bit(b) ? 1 : 0);
      c.extend(b);
      if (bits.size() == ell) {
        const auto& s = c.tip();
        rec.check(s.next->seed() == coa::seed_from_group(bits, spec), "group seed differs from comb of its bits");
        rec.check(s.next->anchor() == b.index, "new schedule anchored elsewhere");
        rec.check(s.current == parent_next, "current schedule is not the previously announced next");
        bits.clear();
      }
    }
    // Group g+1 up to its last block.
    for (unsigned k = 0; k + 1 < ell; ++k) {
      const Block b = c.candidate(c.tip().index + gap());
      bits.push_back(block_bit(b) ? 1 : 0);
      c.extend(b);
    }
    const auto announced = c.tip().next;
    // Competing last blocks of group g+1, at different slots.
    const Block a = c.candidate(c.tip().index + 1);
    const Block b = c.candidate(c.tip().index + 2 + rng.below(3));
    const auto ta = c.try_extend(a);
    const auto tb = c.try_extend(b);
    if (!ta.state || !tb.state) {
      rec.fail("competing last block rejected");
      continue;
    }
    const auto& sa = *ta.state;
    const auto& sb = *tb.state;
    rec.check(sa.current->seed() == sb.current->seed() && sa.current->anchor() == sb.current->anchor(),
              "competing last blocks produced different next-group seeds");
    rec.check(sa.current->seed() == announced->seed(), "next group does not use the cemented seed");
    for (std::uint64_t p = 1; p <= 2 * ell; ++p) {
      if (!(sa.current->at(p) == sb.current->at(p))) {
        rec.fail("slot assignment differs at position " + std::to_string(p));
        break;
      }
    }
    auto with = [&](const Block& last) {
      auto v = bits;
      v.push_back(block_bit(last) ? 1 : 0);
      return coa::seed_from_group(v, spec);
    };
    rec.check(sa.next->seed() == with(a) && sb.next->seed() == with(b),
              "seed two groups ahead is not the comb of the branch's own bits");
    ++rec.r.cases;
  }
  return rec.r;
}

PropertyResult prop_confiscation_conservation(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "confiscation conservation";
  Rng rng(seed, 0xc0);
  for (std::uint64_t i = 0; i < cases; ++i) {
    rec.current_case = i;
    const Amount supply = (Amount{1} << 10) + rng.below(Amount{1} << 20);
    const unsigned owners = 2 + static_cast<unsigned>(rng.below(11));
    auto ledger = LedgerState::from_allocation(random_allocation(rng, supply, owners, 4));
    Amount destroyed = 0;
    bool ok = true;
    for (Height h = 1; h <= 20 && ok; ++h) {
      std::vector<UtxoId> live;
      for (const auto& [id, u] : ledger.utxos()) live.push_back(id);
      std::shuffle(live.begin(), live.end(), rng);
      if (live.empty()) break;  // everything burnt
      live.resize(std::min<std::size_t>(live.size(), 1 + rng.below(3)));
      Amount picked = 0;
      for (auto id : live) picked += ledger.at(id).amount();

      const bool spendable = std::none_of(live.begin(), live.end(), [&](UtxoId id) {
        return ledger.at(id).frozen_at(h);
      });
      if (spendable && rng.bernoulli(0.5)) {
        Transaction tx;
        for (auto id : live) tx.inputs.push_back({id, {}});
        tx.fee = rng.below(picked / 4 + 1);
        Amount left = picked - tx.fee;
        while (left > 0) {
          const Amount part = tx.outputs.size() == 2 ? left : 1 + rng.below(left);
          tx.outputs.push_back({static_cast<StakeholderId>(rng.below(owners)), part});
          left -= part;
        }
        if (tx.outputs.empty()) tx.fee = 0, tx.outputs.push_back({0, picked});
        ledger.apply(tx, h, FeeCredit{static_cast<StakeholderId>(rng.below(owners)), h + 5});
      } else {
        const auto reporter = static_cast<StakeholderId>(rng.below(owners));
        const Amount before = ledger.balance_of(reporter);
        const bool reporter_is_victim = std::any_of(live.begin(), live.end(), [&](UtxoId id) {
          return ledger.at(id).owner == reporter;
        });
        const Amount award = rng.below(picked + 5);
        const auto c = ledger.confiscate(live, reporter, award, h, h + 5);
        destroyed += c.destroyed;
        rec.check(c.confiscated == picked, "confiscated amount differs from victims' value");
        rec.check(c.awarded + c.destroyed == c.confiscated, "award plus burn differs from confiscation");
        rec.check(c.awarded == std::min(award, picked), "award not capped at confiscated value");
        if (!reporter_is_victim) {
          rec.check(ledger.balance_of(reporter) == before + c.awarded, "reporter balance off by award");
        }
      }
      try {
        ledger.check_invariants();
      } catch (const std::exception& e) {
        rec.fail(e.what());
        ok = false;
      }
      Amount sum = 0;
      for (const auto& [id, u] : ledger.utxos()) sum += u.amount();
      rec.check(sum == ledger.total_supply(), "outputs do not sum to supply");
      rec.check(ledger.total_supply() + ledger.destroyed() == supply, "supply plus destroyed drifted");
      rec.check(ledger.destroyed() == destroyed, "destroyed counter differs from burnt total");
    }
    ++rec.r.cases;
  }
  return rec.r;
}

PropertyResult prop_three_strikes_timing(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "three-strikes blacklist timing";
  Rng rng(seed, 0x35);
  std::uint64_t attempts = 0;
  while (rec.r.cases < cases && attempts < 20 * cases) {
    rec.current_case = attempts++;
    auto ledger = small_ledger(rng, 3, 6, 2);
    std::vector<StakeholderId> owners;
    for (const auto& [id, u] : ledger.utxos()) {
      if (std::find(owners.begin(), owners.end(), u.owner) == owners.end()) owners.push_back(u.owner);
    }
    if (owners.size() < 2) continue;
    const StakeholderId offline = owners[rng.below(owners.size())];
    CoaChain c(small_params(rng), ledger, rng.next());

    std::map<UtxoId, unsigned> strikes;  // oracle
    std::set<UtxoId> blacklisted;
    std::optional<std::pair<UtxoId, std::uint64_t>> first;  // (output, group it was struck out in)
    bool exercised = false;
    for (int blocks = 0; blocks < 400; ++blocks) {
      const auto& parent = c.tip();
      if (first && parent.group > first->second + 2) {
        exercised = true;
        break;
      }
      const std::uint64_t idx = next_online_index(c, offline);
      std::set<UtxoId> expect;
      for (std::uint64_t k = parent.index + 1; k < idx; ++k) {
        const SlotWinner w = c.engine.eligible_creator(parent, k);
        if (first && parent.group == first->second + 2) {
          rec.check(w.utxo != first->first, "blacklisted output derived in the after-next group");
        }
        if (blacklisted.count(w.utxo)) continue;
        if (++strikes[w.utxo] >= 3) {
          strikes[w.utxo] = 3;
          expect.insert(w.utxo);
        }
      }
      const SlotWinner winner = c.engine.eligible_creator(parent, idx);
      if (first && parent.group == first->second + 2) {
        rec.check(winner.utxo != first->first, "blacklisted output won in the after-next group");
        rec.check(parent.current->snapshot().is_blacklisted(first->first),
                  "after-next group schedule ignores the blacklist");
      }
      if (first && parent.group == first->second + 1) {
        rec.check(!parent.current->snapshot().is_blacklisted(first->first),
                  "blacklist applied already in the next group");
      }
      strikes[winner.utxo] = 0;
      const std::uint64_t group = parent.group;
      const auto t = c.extend_at(idx);
      if (!t.state) {
        rec.fail("honest block rejected");
        break;
      }
      std::set<UtxoId> got;
      for (const auto& e : t.events) {
        if (e.kind == EventKind::Blacklist) got.insert(e.utxo);
      }
      if (got != expect) {
        rec.fail("blacklist events differ from the three-strikes oracle");
        break;
      }
      for (auto u : got) {
        blacklisted.insert(u);
        if (!first) first = std::make_pair(u, group);
      }
    }
    if (exercised) ++rec.r.cases;
  }
  return rec.r;
}

PropertyResult prop_freeze_enforcement(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "deposit freeze for T0 blocks";
  Rng rng(seed, 0xf2);
  for (std::uint64_t i = 0; i < cases; ++i) {
    rec.current_case = i;
    // Ledger level: frozen exactly on heights h+1 .. h+T0.
    {
      auto ledger = small_ledger(rng, 2, 6, 3);
      const Height h = rng.below(1000);
      const Height t0 = 2 * (1 + rng.below(50));
      const UtxoId u = std::next(ledger.utxos().begin(), static_cast<long>(rng.below(ledger.utxo_count())))->first;
      ledger.freeze_until(u, h + t0 + 1);
      Transaction tx;
      tx.inputs.push_back({u, {}});
      tx.outputs.push_back({ledger.at(u).owner, ledger.at(u).amount()});
      const Height inside = h + 1 + rng.below(t0);
      try {
        apply_transaction(ledger, tx, inside);
        rec.fail("spent at height " + std::to_string(inside) + " inside the freeze");
      } catch (const LedgerError& e) {
        rec.check(e.kind() == LedgerError::Kind::Frozen, "wrong error kind inside freeze");
      }
      try {
        apply_transaction(ledger, tx, h + t0 + 1);
      } catch (const std::exception& e) {
        rec.fail(std::string("release height refused: ") + e.what());
      }
    }
    // Engine level: a creator's deposit cannot move until T0 blocks later.
    {
      CoaChain c(small_params(rng), small_ledger(rng, 2, 6, 3), rng.next());
      const Height t0 = c.engine.params().t0;
      std::map<UtxoId, Height> release;  // oracle
      auto record = [&] {
        for (auto id : c.tip().deposits.back().outputs) {
          release[id] = std::max(release[id], c.tip().height + t0 + 1);
        }
      };
      c.extend_at(c.tip().index + 1);
      record();
      const UtxoId d = c.tip().deposits.back().outputs.front();
      const auto extra = rng.below(t0 + 3);
      for (std::uint64_t k = 0; k < extra; ++k) {
        c.extend_at(c.tip().index + 1);
        record();
      }
      const std::uint64_t idx = c.tip().index + 1;
      const Height h = c.tip().height + 1;
      const Utxo& du = c.tip().ledger.at(d);
      Transaction tx;
      tx.inputs.push_back({d, {}});
      tx.outputs.push_back({du.owner, du.amount()});
      tx.latest_block_index = idx;
      sign_transaction(tx, c.tip().ledger, *c.sigs);
      const Block b = c.candidate(idx, {tx});
      const auto st = c.engine.stake_for(c.tip(), idx, b.creator);
      const bool own_deposit = st.derived == d || st.aux == d;
      const bool expect_frozen = own_deposit || h < release[d];
      const auto t = c.try_extend(b);
      if (expect_frozen) {
        rec.check(!t.state && t.rejection->reason == RejectReason::FrozenStake,
                  "deposit spent at height " + std::to_string(h) + " before release " +
                      std::to_string(release[d]));
      } else {
        rec.check(t.state.has_value(), "deposit still frozen at release height " + std::to_string(h));
      }
    }
    ++rec.r.cases;
  }
  return rec.r;
}

PropertyResult prop_checkpoint_monotonic(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "checkpoint monotonicity";
  Rng rng(seed, 0xcb);
  for (std::uint64_t i = 0; i < cases; ++i) {
    rec.current_case = i;
    const Block genesis = make_genesis(Seed(1, 8), 0);
    BlockTree tree(genesis);
    CheckpointTracker cp(1 + rng.below(5));
    // Oracle copy of the tree shape.
    std::unordered_map<Digest, std::pair<Digest, Height>, DigestHash> shape;
    std::vector<Digest> all{tree.root()};
    shape[tree.root()] = {tree.root(), 0};
    auto descends = [&](Digest d, const Digest& anc) {
      while (true) {
        if (d == anc) return true;
        if (d == tree.root()) return false;
        d = shape[d].first;
      }
    };
    for (int step = 0; step < 80; ++step) {
      const double r = rng.uniform();
      const Digest parent = r < 0.6 ? tree.best_tip() : all[rng.below(all.size())];
      Block b;
      b.prev_digest = parent;
      b.index = tree.block(parent).index + 1 + rng.below(3);
      b.timestamp = static_cast<std::int64_t>(rng.below(1'000'000));
      b.creator = static_cast<StakeholderId>(rng.below(8));
      const bool expect_ok = descends(parent, tree.solidified());
      const Digest old_solid = tree.solidified();
      const Height old_h = tree.node(old_solid).height;
      const Digest old_best = tree.best_tip();
      const auto got = tree.insert(b);
      if (got.has_value() != expect_ok) {
        rec.fail(expect_ok ? "valid extension refused" : "block below the solidified prefix accepted");
        break;
      }
      if (!got) {
        rec.check(tree.best_tip() == old_best, "refused block moved the best tip");
        continue;
      }
      const Digest d = *got;
      shape[d] = {parent, shape[parent].second + 1};
      all.push_back(d);
      const auto s = cp.on_accept(tree, d);
      const Height h = tree.node(d).height;
      if (s) {
        rec.check(h % cp.t1() == 0 && tree.node(*s).height + cp.t1() == h, "solidified the wrong height");
        rec.check(descends(d, *s), "solidified block is not an ancestor of the trigger");
      }
      rec.check(descends(tree.solidified(), old_solid), "solidified prefix moved backwards");
      rec.check(tree.node(tree.solidified()).height >= old_h, "solidified height decreased");
      rec.check(descends(tree.best_tip(), tree.solidified()), "best tip off the solidified prefix");
      Height best_h = 0;
      for (const auto& x : all) {
        if (descends(x, tree.solidified())) best_h = std::max(best_h, shape[x].second);
      }
      rec.check(tree.node(tree.best_tip()).height == best_h, "best tip is not the highest eligible block");
    }
    ++rec.r.cases;
  }
  return rec.r;
}

PropertyResult prop_checkpoint_rejects_long_fork(std::uint64_t cases, std::uint64_t seed) {
  Recorder rec;
  rec.r.name = "longer fork below checkpoint rejected";
  Rng rng(seed, 0xfb);
  for (std::uint64_t i = 0; i < cases; ++i) {
    rec.current_case = i;
    coa::Params p = small_params(rng);
    p.t0 = 4;  // T1 = 2
    const auto ledger = small_ledger(rng, 2, 6, 3);
    const std::uint64_t chain_seed = rng.next();
    CoaChain main(p, ledger, chain_seed);
    CoaChain fork(p, ledger, chain_seed);
    const auto main_len = 4 + rng.below(5);
    for (std::uint64_t k = 0; k < main_len; ++k) main.extend_at(main.tip().index + 1);
    fork.extend_at(2 + rng.below(3));
    const auto fork_len = main_len + 1 + rng.below(4);
    while (fork.blocks.size() - 1 < fork_len) fork.extend_at(fork.tip().index + 1);

    using Node = ChainNode<coa::Engine>;
    Node guarded(main.engine, main.genesis, main.states.front(), p.t1());
    Node open(main.engine, main.genesis, main.states.front(), std::nullopt);
    for (std::size_t k = 1; k < main.blocks.size(); ++k) {
      guarded.receive(main.blocks[k], std::nullopt);
      open.receive(main.blocks[k], std::nullopt);
    }
    const Digest main_tip = main.tip_block().digest();
    rec.check(guarded.best() == main_tip, "main chain not adopted");
    rec.check(guarded.tree().node(guarded.tree().solidified()).height >= 2, "nothing solidified");
    for (std::size_t k = 1; k < fork.blocks.size(); ++k) {
      const auto out = guarded.receive(fork.blocks[k], std::nullopt);
      if (k == 1) {
        rec.check(out.status == Node::Status::Rejected && out.rejection->reason == RejectReason::BelowCheckpoint,
                  "fork root below the checkpoint not rejected");
      } else {
        rec.check(out.status != Node::Status::Accepted, "fork block accepted below the checkpoint");
      }
      open.receive(fork.blocks[k], std::nullopt);
    }
    rec.check(guarded.best() == main_tip, "longer fork displaced the solidified chain");
    // The same fork wins without checkpoints, so it really is the longer valid chain.
    rec.check(open.best() == fork.tip_block().digest(), "control node did not switch to the longer fork");
    ++rec.r.cases;
  }
  return rec.r;
}

std::vector<PropertyResult> run_all_properties(std::uint64_t cases, std::uint64_t seed) {
  return {prop_single_eligible_creator(cases, seed),    prop_interleaving_cement(cases, seed),
          prop_confiscation_conservation(cases, seed),  prop_three_strikes_timing(cases, seed),
          prop_freeze_enforcement(cases, seed),         prop_checkpoint_monotonic(cases, seed),
          prop_checkpoint_rejects_long_fork(cases, seed)};
}

}  // namespace coalab::testing
