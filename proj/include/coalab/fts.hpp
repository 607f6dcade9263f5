#pragma once

#include <cstdint>

#include "coalab/hash.hpp"
#include "coalab/ledger.hpp"
#include "coalab/types.hpp"

namespace coalab {

struct SlotDerivationInput {
  std::uint64_t group_anchor = 0;
  std::uint64_t slot_offset = 1;
  Seed seed;
};

struct SlotWinner {
  StakeholderId owner = 0;
  UtxoId utxo = 0;
  bool operator==(const SlotWinner&) const = default;
};

/// Stakeholder able to spend satoshi `index` right now.
SlotWinner follow_the_satoshi(const LedgerState& ledger, std::uint64_t index);

/// hash(anchor, z, seed): be64 anchor, be64 z, u8 seed width, be64 seed.
Digest slot_hash(std::uint64_t anchor, std::uint64_t z, const Seed& seed);

/// Hash reduced modulo the supply, then looked up. Blacklisted outputs are
/// reported as-is; skipping is the caller's decision.
SlotWinner derive_slot_winner(const LedgerState& ledger, const SlotDerivationInput& d);

}  // namespace coalab
