#include "coalab/coa.hpp"

#include <algorithm>
#include <stdexcept>

namespace coalab::coa {

void Params::validate() const {
  comb_spec().validate();
  if (g0 <= 0) throw std::invalid_argument("g0 must be positive");
  if (c0 == 0) throw std::invalid_argument("c0 must be positive");
  if (2 * c1 > c0) throw std::invalid_argument("c1 must not exceed c0/2");
  if (t0 < 2 || t0 % 2 != 0) throw std::invalid_argument("t0 must be even and at least 2");
  if (leniency < 0) throw std::invalid_argument("leniency must be non-negative");
  if (strikes_to_blacklist == 0 || strikes_to_blacklist > 3) {
    throw std::invalid_argument("strikes_to_blacklist must be in [1, 3]");
  }
  if (max_gap == 0) throw std::invalid_argument("max_gap must be positive");
}

SlotSchedule::SlotSchedule(std::shared_ptr<const LedgerState> snapshot, std::uint64_t anchor,
                           Seed seed)
    : snapshot_(std::move(snapshot)), anchor_(anchor), seed_(seed) {
  if (!snapshot_ || snapshot_->total_supply() == 0) throw std::invalid_argument("empty snapshot");
}

void SlotSchedule::fill(std::uint64_t position) const {
  std::uint64_t skipped = 0;
  while (cache_.size() < position) {
    const SlotWinner w = derive_slot_winner(*snapshot_, {anchor_, next_z_, seed_});
    if (!snapshot_->is_blacklisted(w.utxo)) {
      cache_.emplace_back(next_z_, w);
      skipped = 0;
    } else if (++skipped > 1'000'000) {
      throw std::runtime_error("no eligible output: snapshot is effectively all blacklisted");
    }
    ++next_z_;
  }
}

SlotWinner SlotSchedule::at(std::uint64_t position) const {
  if (position == 0) throw std::invalid_argument("slot positions start at 1");
  fill(position);
  return cache_[position - 1].second;
}

std::uint64_t SlotSchedule::z_of(std::uint64_t position) const {
  if (position == 0) throw std::invalid_argument("slot positions start at 1");
  fill(position);
  return cache_[position - 1].first;
}

Digest ChainState::digest() const {
  ByteWriter w;
  w.tag("coalab-coa-state").digest(ledger.digest());
  w.u64(height).u64(index).i64(timestamp).u64(group).u64(group_start_index);
  w.u32(static_cast<std::uint32_t>(group_bits.size()));
  for (auto b : group_bits) w.u8(b);
  for (const auto* s : {current.get(), next.get()}) {
    w.u64(s->anchor()).u64(s->seed().value).u8(static_cast<std::uint8_t>(s->seed().bits));
    w.digest(s->snapshot().digest());
  }
  w.u32(static_cast<std::uint32_t>(deposits.size()));
  for (const auto& d : deposits) {
    w.u64(d.height).u64(d.index).u32(d.creator).u32(static_cast<std::uint32_t>(d.outputs.size()));
    for (auto o : d.outputs) w.u64(o);
  }
  w.u32(static_cast<std::uint32_t>(evidence_seen.size()));
  for (const auto& [who, idx] : evidence_seen) w.u32(who).u64(idx);
  return w.hash();
}

Seed seed_from_group(std::span<const std::uint8_t> bits, const CombSpec& spec) {
  if (bits.size() != spec.ell()) {
    throw std::invalid_argument("a group needs exactly " + std::to_string(spec.ell()) + " bits");
  }
  return comb_apply(spec, bits);
}

std::int64_t min_timestamp(std::int64_t parent_ts, std::uint64_t child_index,
                           std::uint64_t parent_index, std::int64_t g0) {
  if (child_index <= parent_index) throw std::invalid_argument("child index must exceed parent index");
  return parent_ts + static_cast<std::int64_t>(child_index - parent_index) * g0;
}

Seed bootstrap_seed(const Seed& genesis_seed) {
  ByteWriter w;
  w.tag("coa-bootstrap").u64(genesis_seed.value).u8(static_cast<std::uint8_t>(genesis_seed.bits));
  const std::uint64_t v = leading_u64(w.hash());
  return Seed(genesis_seed.bits == 64 ? v : v >> (64 - genesis_seed.bits), genesis_seed.bits);
}

Engine::Engine(Params params, std::shared_ptr<const SignatureScheme> sigs)
    : params_(params), sigs_(std::move(sigs)) {
  params_.validate();
  if (!sigs_) throw std::invalid_argument("signature scheme required");
}

ChainState Engine::genesis_state(const Block& genesis, LedgerState ledger) const {
  if (!genesis.genesis_seed) throw std::invalid_argument("genesis block lacks a seed");
  if (genesis.genesis_seed->bits != params_.kappa) {
    throw std::invalid_argument("genesis seed width differs from kappa");
  }
  ChainState s;
  s.index = genesis.index;
  s.timestamp = genesis.timestamp;
  s.ledger = std::move(ledger);
  s.group_start_index = genesis.index;
  auto snap = std::make_shared<const LedgerState>(s.ledger);
  s.current = std::make_shared<const SlotSchedule>(snap, genesis.index, *genesis.genesis_seed);
  s.next = std::make_shared<const SlotSchedule>(snap, genesis.index, bootstrap_seed(*genesis.genesis_seed));
  return s;
}

SlotWinner Engine::eligible_creator(const ChainState& parent, std::uint64_t index) const {
  if (index <= parent.index) throw std::invalid_argument("index must exceed the parent's");
  return parent.current->at(index - parent.group_start_index);
}

Engine::Stake Engine::stake_for(const ChainState& parent, std::uint64_t index,
                                StakeholderId creator) const {
  Stake st;
  const SlotWinner w = eligible_creator(parent, index);
  if (const Utxo* u = parent.ledger.find(w.utxo); u && u->owner == creator) {
    st.derived = u->id;
    st.derived_amount = u->amount();
  }
  st.aux = choose_aux(parent.ledger, w.utxo, creator, params_.c0);
  return st;
}

Block Engine::make_block(const ChainState& parent, const Block& parent_block, std::uint64_t index,
                         std::int64_t timestamp, StakeholderId creator,
                         std::vector<Transaction> txs,
                         std::optional<DoubleSignEvidence> evidence) const {
  Block b;
  b.index = index;
  b.prev_digest = parent_block.digest();
  b.timestamp = timestamp;
  b.creator = creator;
  b.transactions = std::move(txs);
  b.evidence = std::move(evidence);
  const Stake st = stake_for(parent, index, creator);
  if (st.aux) {
    b.aux = AuxProof{*st.aux, sigs_->sign(creator, aux_message(index, b.prev_digest, *st.aux))};
  }
  b.sign(*sigs_);
  return b;
}

Transition Engine::transition(const ChainState& parent, const Block& parent_block,
                              const Block& block, std::optional<std::int64_t> local_time,
                              const PathQuery& on_path) const {
  Transition t;
  const Height h = parent.height + 1;
  auto reject = [&](RejectReason r, std::string detail) {
    EngineEvent ev;
    ev.kind = EventKind::BlockRejected;
    ev.index = block.index;
    ev.height = h;
    ev.who = block.creator;
    ev.value = static_cast<std::uint64_t>(r);
    ev.detail = std::string(to_string(r)) + ": " + detail;
    t.events.push_back(std::move(ev));
    t.rejection = Rejection{r, std::move(detail)};
    return std::move(t);
  };

  if (auto v = validate_block_structure(block, parent_block, *sigs_); !v) {
    return reject(v.reason(), v.detail());
  }
  if (block.genesis_seed || block.dense) {
    return reject(RejectReason::BadIndex, "unexpected genesis or committee payload");
  }
  if (block.index - parent.index > params_.max_gap) {
    return reject(RejectReason::BadIndex, "slot gap too large");
  }
  const std::int64_t earliest = min_timestamp(parent.timestamp, block.index, parent.index, params_.g0);
  if (block.timestamp < earliest) {
    return reject(RejectReason::TooEarly, "timestamp " + std::to_string(block.timestamp) +
                                              " before " + std::to_string(earliest));
  }
  if (local_time && block.timestamp > *local_time + params_.leniency) {
    return reject(RejectReason::FutureDated, "timestamp beyond local clock plus leniency");
  }
  const SlotWinner winner = eligible_creator(parent, block.index);
  if (winner.owner != block.creator) {
    return reject(RejectReason::WrongCreator, "slot belongs to stakeholder " + std::to_string(winner.owner));
  }

  const StakeCheck stake = check_stake(parent.ledger, winner.utxo, block, params_.c0, *sigs_);
  if (!stake.verdict) return reject(stake.verdict.reason(), stake.verdict.detail());
  if (auto v = check_evidence(block, parent.evidence_seen, params_.t0, *sigs_); !v) {
    return reject(v.reason(), v.detail());
  }

  ChainState s = parent;
  s.height = h;
  s.index = block.index;
  s.timestamp = block.timestamp;
  if (auto ev = apply_deposit_rules(s.ledger, s.deposits, s.evidence_seen, block, h, stake.deposit,
                                    params_.deposit_rules())) {
    t.events.push_back(std::move(*ev));
  }
  const Height release = h + params_.t0 + 1;

  for (const auto& tx : block.transactions) {
    if (tx.latest_block_index != block.index && !(on_path && on_path(tx.latest_block_index))) {
      return reject(RejectReason::BindingViolation,
                    "transaction bound to absent block " + std::to_string(tx.latest_block_index));
    }
    try {
      s.ledger.apply(tx, h, FeeCredit{block.creator, release}, sigs_.get());
    } catch (const LedgerError& e) {
      return reject(e.kind() == LedgerError::Kind::Frozen ? RejectReason::FrozenStake
                                                          : RejectReason::BadTransaction,
                    e.what());
    }
  }

  // Skipped positions cost their derived outputs a strike.
  for (std::uint64_t idx = parent.index + 1; idx < block.index; ++idx) {
    const SlotWinner missed = parent.current->at(idx - parent.group_start_index);
    const Utxo* u = s.ledger.find(missed.utxo);
    if (!u || s.ledger.is_blacklisted(u->id)) continue;
    const auto strikes = static_cast<std::uint8_t>(std::min<unsigned>(u->strikes + 1U, 3U));
    s.ledger.set_strikes(u->id, strikes);
    EngineEvent ev;
    ev.kind = EventKind::Strike;
    ev.index = idx;
    ev.height = h;
    ev.who = missed.owner;
    ev.utxo = missed.utxo;
    ev.value = strikes;
    t.events.push_back(ev);
    if (strikes >= params_.strikes_to_blacklist) {
      s.ledger.blacklist_output(missed.utxo);
      ev.kind = EventKind::Blacklist;
      t.events.push_back(ev);
    }
  }
  if (const Utxo* u = s.ledger.find(winner.utxo); u && u->owner == block.creator && u->strikes) {
    s.ledger.set_strikes(u->id, 0);
  }

  s.group_bits.push_back(block_bit(block) ? 1 : 0);
  if (s.group_bits.size() == params_.ell()) {
    const Seed seed = seed_from_group(s.group_bits, params_.comb_spec());
    auto snap = std::make_shared<const LedgerState>(s.ledger);
    s.current = s.next;
    s.next = std::make_shared<const SlotSchedule>(std::move(snap), block.index, seed);
    s.group_start_index = block.index;
    ++s.group;
    s.group_bits.clear();
  }

  EngineEvent ev;
  ev.kind = EventKind::BlockAccepted;
  ev.index = block.index;
  ev.height = h;
  ev.who = block.creator;
  ev.utxo = winner.utxo;
  t.events.push_back(std::move(ev));
  t.state = std::move(s);
  return t;
}

}  // namespace coalab::coa
