#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "coalab/block.hpp"
#include "coalab/events.hpp"
#include "coalab/ledger.hpp"

namespace coalab {

/// Outputs frozen as the deposit behind one produced block.
struct DepositRecord {
  Height height = 0;
  std::uint64_t index = 0;
  StakeholderId creator = 0;
  std::vector<UtxoId> outputs;
  bool operator==(const DepositRecord&) const = default;
};

/// (offender, slot index) pairs already punished on a chain.
using EvidenceSet = std::set<std::pair<StakeholderId, std::uint64_t>>;

struct DepositRules {
  Amount c0 = 1;
  Amount c1 = 0;
  Height t0 = 100;
};

struct StakeCheck {
  Verdict verdict;
  std::vector<UtxoId> deposit;
};

/// Minimal-stake rule: the derived output (if still live and owned by the
/// creator) plus an optional auxiliary output must reach C0.
StakeCheck check_stake(const LedgerState& ledger, UtxoId derived, const Block& block, Amount c0,
                       const SignatureScheme& sigs);

/// Smallest other output of `creator` that tops `derived` up to C0, if needed.
std::optional<UtxoId> choose_aux(const LedgerState& ledger, UtxoId derived, StakeholderId creator,
                                 Amount c0);

Verdict check_evidence(const Block& block, const EvidenceSet& seen, Height t0,
                       const SignatureScheme& sigs);

/// Freezes the deposit, records it, applies any evidence in the block, and
/// prunes bookkeeping that fell out of the T0 window. Returns the
/// confiscation event when evidence was present.
std::optional<EngineEvent> apply_deposit_rules(LedgerState& ledger,
                                               std::vector<DepositRecord>& deposits,
                                               EvidenceSet& seen, const Block& block, Height h,
                                               const std::vector<UtxoId>& deposit,
                                               const DepositRules& rules);

}  // namespace coalab
