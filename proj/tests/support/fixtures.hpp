#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include "coalab/block.hpp"
#include "coalab/coa.hpp"
#include "coalab/ledger.hpp"
#include "coalab/rng.hpp"
#include "coalab/signature.hpp"

namespace coalab::testing {

// Random allocation of exactly `supply` satoshis over `owners` stakeholders,
// each holding between 1 and `max_outputs` outputs.
inline std::vector<Allocation> random_allocation(Rng& rng, Amount supply, unsigned owners,
                                                 unsigned max_outputs = 3) {
  std::vector<Amount> cut{0, supply};
  for (unsigned i = 1; i < owners; ++i) cut.push_back(1 + rng.below(supply - 1));
  std::sort(cut.begin(), cut.end());
  std::vector<Allocation> alloc;
  StakeholderId id = 0;
  for (std::size_t i = 1; i < cut.size(); ++i) {
    const Amount a = cut[i] - cut[i - 1];
    if (a == 0) continue;
    const unsigned outs = static_cast<unsigned>(std::min<Amount>(a, 1 + rng.below(max_outputs)));
    alloc.push_back({id++, a, outs});
  }
  return alloc;
}

// A small CoA chain driven block by block, without a network.
struct CoaChain {
  std::shared_ptr<SimulatedSignatures> sigs;
  coa::Engine engine;
  Block genesis;
  std::vector<Block> blocks;
  std::vector<coa::ChainState> states;

  CoaChain(coa::Params p, LedgerState ledger, std::uint64_t seed)
      : sigs(std::make_shared<SimulatedSignatures>(seed)),
        engine(p, sigs),
        genesis(make_genesis(Seed(seed & ((std::uint64_t{1} << p.kappa) - 1), p.kappa), 0)) {
    blocks.push_back(genesis);
    states.push_back(engine.genesis_state(genesis, std::move(ledger)));
  }

  const coa::ChainState& tip() const { return states.back(); }
  const Block& tip_block() const { return blocks.back(); }

  // The eligible creator's block at `index` on top of the current tip.
  Block candidate(std::uint64_t index, std::vector<Transaction> txs = {},
                  std::optional<DoubleSignEvidence> ev = std::nullopt) const {
    const auto& s = tip();
    const StakeholderId who = engine.eligible_creator(s, index).owner;
    const auto ts = coa::min_timestamp(s.timestamp, index, s.index, engine.params().g0);
    return engine.make_block(s, tip_block(), index, ts, who, std::move(txs), std::move(ev));
  }

  coa::Transition try_extend(const Block& b) const {
    return engine.transition(tip(), tip_block(), b, std::nullopt, {});
  }

  // Appends the block; returns the transition so callers can inspect events.
  coa::Transition extend(const Block& b) {
    auto t = try_extend(b);
    if (t.state) {
      blocks.push_back(b);
      states.push_back(*t.state);
    }
    return t;
  }

  coa::Transition extend_at(std::uint64_t index) { return extend(candidate(index)); }
};

}  // namespace coalab::testing
