#include "coalab/fts.hpp"

#include <stdexcept>

namespace coalab {

SlotWinner follow_the_satoshi(const LedgerState& ledger, std::uint64_t index) {
  const Utxo& u = ledger.lookup(index);
  return {u.owner, u.id};
}

Digest slot_hash(std::uint64_t anchor, std::uint64_t z, const Seed& seed) {
  ByteWriter w;
  w.u64(anchor).u64(z).u8(static_cast<std::uint8_t>(seed.bits)).u64(seed.value);
  return w.hash();
}

SlotWinner derive_slot_winner(const LedgerState& ledger, const SlotDerivationInput& d) {
  if (d.slot_offset == 0) throw std::invalid_argument("slot offset must be at least 1");
  if (ledger.total_supply() == 0) throw std::out_of_range("empty ledger");
  const Digest h = slot_hash(d.group_anchor, d.slot_offset, d.seed);
  return follow_the_satoshi(ledger, digest_mod(h, ledger.total_supply()));
}

}  // namespace coalab
