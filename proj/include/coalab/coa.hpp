#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "coalab/block.hpp"
#include "coalab/comb.hpp"
#include "coalab/deposit.hpp"
#include "coalab/events.hpp"
#include "coalab/fts.hpp"
#include "coalab/ledger.hpp"

namespace coalab::coa {

struct Params {
  unsigned kappa = 51;
  unsigned w = 9;
  CombKind comb = CombKind::IteratedMajority;
  std::int64_t g0 = 300;
  Amount c0 = 1;
  Amount c1 = 0;
  Height t0 = 100;
  std::int64_t leniency = 120;
  unsigned strikes_to_blacklist = 3;
  /// Upper bound on index jumps a single block may make.
  std::uint64_t max_gap = 1'000'000;

  unsigned ell() const { return kappa * w; }
  Height t1() const { return t0 / 2; }
  CombSpec comb_spec() const { return {comb, kappa, w}; }
  DepositRules deposit_rules() const { return {c0, c1, t0}; }
  void validate() const;
};

/// Slot assignment for one group: the k-th position goes to the k-th
/// derivation z whose output is not blacklisted in the snapshot. Filled
/// lazily; the inputs are immutable so sharing between chain states is safe.
class SlotSchedule {
 public:
  SlotSchedule(std::shared_ptr<const LedgerState> snapshot, std::uint64_t anchor, Seed seed);

  SlotWinner at(std::uint64_t position) const;
  /// Derivation offset z used for `position`.
  std::uint64_t z_of(std::uint64_t position) const;

  const Seed& seed() const { return seed_; }
  std::uint64_t anchor() const { return anchor_; }
  const LedgerState& snapshot() const { return *snapshot_; }

 private:
  void fill(std::uint64_t position) const;

  std::shared_ptr<const LedgerState> snapshot_;
  std::uint64_t anchor_;
  Seed seed_;
  mutable std::vector<std::pair<std::uint64_t, SlotWinner>> cache_;
  mutable std::uint64_t next_z_ = 1;
};

/// Everything derived from the path genesis..tip.
struct ChainState {
  Height height = 0;
  std::uint64_t index = 0;
  std::int64_t timestamp = 0;
  LedgerState ledger;
  /// Group the next block belongs to (1-based).
  std::uint64_t group = 1;
  /// Index of the last block of the previous group; positions count from it.
  std::uint64_t group_start_index = 0;
  std::vector<std::uint8_t> group_bits;
  std::shared_ptr<const SlotSchedule> current;
  std::shared_ptr<const SlotSchedule> next;
  std::vector<DepositRecord> deposits;
  EvidenceSet evidence_seen;

  Digest digest() const;
};

struct Transition {
  std::optional<ChainState> state;
  std::optional<Rejection> rejection;
  std::vector<EngineEvent> events;
};

Seed seed_from_group(std::span<const std::uint8_t> bits, const CombSpec& spec);

/// Earliest admissible timestamp for a child of `parent_ts` at `child_index`.
std::int64_t min_timestamp(std::int64_t parent_ts, std::uint64_t child_index,
                           std::uint64_t parent_index, std::int64_t g0);

/// Seed used for group 2, derived from the genesis seed.
Seed bootstrap_seed(const Seed& genesis_seed);

class Engine {
 public:
  using State = ChainState;

  Engine(Params params, std::shared_ptr<const SignatureScheme> sigs);

  const Params& params() const { return params_; }
  const SignatureScheme& sigs() const { return *sigs_; }

  ChainState genesis_state(const Block& genesis, LedgerState ledger) const;

  /// Creator of the block at `index` on top of `parent`.
  SlotWinner eligible_creator(const ChainState& parent, std::uint64_t index) const;

  /// Full rule check and state transition. `local_time` enables the
  /// future-dating check; `on_path` answers chain-binding queries for the
  /// parent's path (genesis is always on it).
  Transition transition(const ChainState& parent, const Block& parent_block, const Block& block,
                        std::optional<std::int64_t> local_time, const PathQuery& on_path) const;

  /// Builds and signs a block for `creator`, attaching an auxiliary stake
  /// proof when the derived output is short of C0.
  Block make_block(const ChainState& parent, const Block& parent_block, std::uint64_t index,
                   std::int64_t timestamp, StakeholderId creator,
                   std::vector<Transaction> txs = {},
                   std::optional<DoubleSignEvidence> evidence = std::nullopt) const;

  /// Stake that would back a block by `creator` at `index`: the derived
  /// output (if still live and owned) plus the best auxiliary output.
  struct Stake {
    std::optional<UtxoId> derived;
    Amount derived_amount = 0;
    std::optional<UtxoId> aux;
  };
  Stake stake_for(const ChainState& parent, std::uint64_t index, StakeholderId creator) const;

 private:
  Params params_;
  std::shared_ptr<const SignatureScheme> sigs_;
};

}  // namespace coalab::coa
