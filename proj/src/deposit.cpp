#include "coalab/deposit.hpp"

#include <algorithm>

namespace coalab {

StakeCheck check_stake(const LedgerState& ledger, UtxoId derived, const Block& block, Amount c0,
                       const SignatureScheme& sigs) {
  StakeCheck out;
  Amount stake = 0;
  if (const Utxo* u = ledger.find(derived); u && u->owner == block.creator) {
    stake = u->amount();
    out.deposit.push_back(u->id);
  }
  if (block.aux) {
    const Utxo* a = ledger.find(block.aux->output);
    const bool valid = a && a->owner == block.creator && a->id != derived &&
                       sigs.verify(block.creator, aux_message(block.index, block.prev_digest, a->id),
                                   block.aux->signature);
    if (!valid) {
      out.verdict = Verdict::reject(RejectReason::Understaked, "invalid auxiliary stake proof");
      return out;
    }
    stake += a->amount();
    out.deposit.push_back(a->id);
  }
  if (stake < c0) {
    out.verdict = Verdict::reject(RejectReason::Understaked,
                                  "stake " + std::to_string(stake) + " below " + std::to_string(c0));
  }
  return out;
}

std::optional<UtxoId> choose_aux(const LedgerState& ledger, UtxoId derived, StakeholderId creator,
                                 Amount c0) {
  Amount have = 0;
  if (const Utxo* u = ledger.find(derived); u && u->owner == creator) have = u->amount();
  if (have >= c0) return std::nullopt;
  const Amount need = c0 - have;
  std::optional<UtxoId> best;
  Amount best_amount = 0;
  for (auto id : ledger.outputs_of(creator)) {
    if (id == derived) continue;
    const Amount a = ledger.at(id).amount();
    if (a >= need && (!best || a < best_amount)) {
      best = id;
      best_amount = a;
    }
  }
  return best;
}

Verdict check_evidence(const Block& block, const EvidenceSet& seen, Height t0,
                       const SignatureScheme& sigs) {
  if (!block.evidence) return {};
  const auto& e = *block.evidence;
  if (e.first.index != e.second.index || e.first.creator != e.second.creator) {
    return Verdict::reject(RejectReason::BadEvidence, "headers differ in slot or signer");
  }
  if (e.first.digest() == e.second.digest()) {
    return Verdict::reject(RejectReason::BadEvidence, "headers are identical");
  }
  for (const auto* h : {&e.first, &e.second}) {
    if (!sigs.verify(h->creator, h->signing_digest(), h->signature)) {
      return Verdict::reject(RejectReason::BadEvidence, "evidence signature does not verify");
    }
  }
  if (e.first.index >= block.index) {
    return Verdict::reject(RejectReason::BadEvidence, "evidence refers to a future slot");
  }
  if (block.index - e.first.index > t0) {
    return Verdict::reject(RejectReason::StaleEvidence,
                           "offence " + std::to_string(block.index - e.first.index) + " slots old");
  }
  if (seen.count({e.first.creator, e.first.index})) {
    return Verdict::reject(RejectReason::DuplicateEvidence, "offence already punished");
  }
  return {};
}

std::optional<EngineEvent> apply_deposit_rules(LedgerState& ledger,
                                               std::vector<DepositRecord>& deposits,
                                               EvidenceSet& seen, const Block& block, Height h,
                                               const std::vector<UtxoId>& deposit,
                                               const DepositRules& rules) {
  const Height release = h + rules.t0 + 1;
  for (auto id : deposit) ledger.freeze_until(id, release);
  std::erase_if(deposits, [&](const DepositRecord& d) { return d.height + rules.t0 < h; });
  deposits.push_back({h, block.index, block.creator, deposit});

  std::optional<EngineEvent> event;
  if (block.evidence) {
    const StakeholderId offender = block.evidence->first.creator;
    const std::uint64_t offence = block.evidence->first.index;
    std::vector<UtxoId> victims;
    for (const auto& d : deposits) {
      if (d.index != offence || d.creator != offender) continue;
      for (auto id : d.outputs) {
        if (ledger.find(id)) victims.push_back(id);
      }
    }
    if (victims.empty()) {
      // Neither offending block is on this chain: seize enough of the
      // offender's outputs to cover the minimal stake.
      Amount seized = 0;
      for (auto id : ledger.outputs_of(offender)) {
        if (seized >= rules.c0) break;
        victims.push_back(id);
        seized += ledger.at(id).amount();
      }
    }
    const Confiscation c = ledger.confiscate(victims, block.creator, rules.c1, h, release);
    seen.insert({offender, offence});
    EngineEvent ev;
    ev.kind = EventKind::Confiscation;
    ev.index = offence;
    ev.height = h;
    ev.who = offender;
    ev.amount = c.confiscated;
    ev.value = c.destroyed;
    ev.detail = "reporter " + std::to_string(block.creator) + " awarded " + std::to_string(c.awarded);
    event = std::move(ev);
  }
  std::erase_if(seen, [&](const auto& e) { return e.second + rules.t0 < block.index; });
  return event;
}

}  // namespace coalab
