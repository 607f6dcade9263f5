#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coalab/hash.hpp"
#include "coalab/signature.hpp"
#include "coalab/types.hpp"

namespace coalab {

struct Utxo {
  UtxoId id = 0;
  StakeholderId owner = 0;
  std::vector<Interval> intervals;
  Height creation_height = 0;
  std::uint8_t strikes = 0;
  /// First height at which the output may be spent.
  std::optional<Height> frozen_until;

  Amount amount() const;
  bool frozen_at(Height h) const { return frozen_until && h < *frozen_until; }
  bool operator==(const Utxo&) const = default;
};

struct TxInput {
  UtxoId utxo = 0;
  Digest signature{};
  bool operator==(const TxInput&) const = default;
};

struct TxOutput {
  StakeholderId owner = 0;
  Amount amount = 0;
  bool operator==(const TxOutput&) const = default;
};

struct Transaction {
  std::vector<TxInput> inputs;
  std::vector<TxOutput> outputs;
  /// Latest block index the sender was aware of; the transaction is only
  /// valid on chains containing that index.
  std::uint64_t latest_block_index = 0;
  Amount fee = 0;

  void encode(ByteWriter& w, bool with_signatures = true) const;
  static Transaction decode(ByteReader& r);
  /// Digest every input owner signs.
  Digest signing_digest() const;
  Digest digest() const;

  bool operator==(const Transaction&) const = default;
};

class LedgerError : public std::runtime_error {
 public:
  enum class Kind { DoubleSpend, Frozen, Conservation, BadSignature, EmptyOutput };
  LedgerError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Where a transaction's fee lands.
struct FeeCredit {
  StakeholderId owner = 0;
  std::optional<Height> frozen_until;
};

/// Everything needed to undo one applied transaction.
struct TxUndo {
  std::vector<Utxo> spent;
  std::vector<UtxoId> spent_blacklisted;
  std::vector<UtxoId> created;
  UtxoId next_id_before = 0;
};

struct Confiscation {
  Amount confiscated = 0;
  Amount awarded = 0;
  Amount destroyed = 0;
  std::optional<UtxoId> award_output;
};

struct Allocation {
  StakeholderId owner = 0;
  Amount amount = 0;
  unsigned outputs = 1;
};

/// Interval map from satoshi indices to live outputs, with blacklist and
/// supply bookkeeping. Copyable value type; engines keep snapshots by copy.
class LedgerState {
 public:
  LedgerState() = default;

  /// Lays allocations out contiguously from index 0 in list order. An entry
  /// with k outputs is split into k near-equal outputs.
  static LedgerState from_allocation(std::span<const Allocation> alloc);

  Amount total_supply() const { return supply_; }
  Amount destroyed() const { return destroyed_; }
  std::size_t utxo_count() const { return utxos_.size(); }
  const std::map<UtxoId, Utxo>& utxos() const { return utxos_; }
  const std::set<UtxoId>& blacklist() const { return blacklist_; }
  UtxoId next_id() const { return next_id_; }

  const Utxo* find(UtxoId id) const;
  const Utxo& at(UtxoId id) const;
  bool is_blacklisted(UtxoId id) const { return blacklist_.count(id) != 0; }
  Amount balance_of(StakeholderId owner) const;
  std::vector<UtxoId> outputs_of(StakeholderId owner) const;

  /// Output covering satoshi `index`; throws std::out_of_range past supply.
  const Utxo& lookup(std::uint64_t index) const;

  TxUndo apply(const Transaction& tx, Height height, const FeeCredit& fee,
               const SignatureScheme* sigs = nullptr);
  void revert(const TxUndo& undo);

  void blacklist_output(UtxoId id);
  void set_strikes(UtxoId id, std::uint8_t strikes);
  /// Extends the freeze; never shortens an existing one.
  void freeze_until(UtxoId id, Height first_spendable);

  /// Seizes the listed outputs: `award` satoshis (capped at the total) go to
  /// the reporter as a fresh output, the rest are destroyed and indices are
  /// compacted so the supply stays contiguous.
  Confiscation confiscate(std::span<const UtxoId> victims, StakeholderId reporter, Amount award,
                          Height height, std::optional<Height> award_frozen_until);

  /// Throws std::logic_error describing the first broken invariant.
  void check_invariants() const;

  Digest digest() const;

  bool operator==(const LedgerState&) const = default;

 private:
  UtxoId insert_output(StakeholderId owner, std::vector<Interval> intervals, Height height,
                       std::optional<Height> frozen_until);
  void erase_output(UtxoId id);
  void compact(const std::vector<Interval>& removed);

  struct Span {
    std::uint64_t end = 0;
    UtxoId utxo = 0;
    bool operator==(const Span&) const = default;
  };
  std::map<std::uint64_t, Span> satoshi_map_;
  std::map<UtxoId, Utxo> utxos_;
  std::set<UtxoId> blacklist_;
  Amount supply_ = 0;
  Amount destroyed_ = 0;
  UtxoId next_id_ = 1;
};

/// Value-semantics wrapper: returns the successor state, leaving `ledger` intact.
LedgerState apply_transaction(LedgerState ledger, const Transaction& tx, Height height,
                              const FeeCredit& fee = {}, const SignatureScheme* sigs = nullptr);

/// Signs every input of `tx` with the current owner's key.
void sign_transaction(Transaction& tx, const LedgerState& ledger, const SignatureScheme& sigs);

/// Parses "owner amount [outputs]" lines; '#' starts a comment. Errors name
/// the offending line.
std::vector<Allocation> parse_allocation(std::istream& in);
Amount allocation_total(std::span<const Allocation> alloc);

}  // namespace coalab
