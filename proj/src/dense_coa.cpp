#include "coalab/dense_coa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coalab/rng.hpp"

namespace coalab::dense {

void Params::validate() const {
  if (kappa == 0 || kappa > 64) throw std::invalid_argument("kappa must be in [1, 64]");
  if (committee == 0) throw std::invalid_argument("committee size must be positive");
  if (g0 <= 0) throw std::invalid_argument("g0 must be positive");
  if (c0 == 0) throw std::invalid_argument("c0 must be positive");
  if (2 * c1 > c0) throw std::invalid_argument("c1 must not exceed c0/2");
  if (t0 < 2 || t0 % 2 != 0) throw std::invalid_argument("t0 must be even and at least 2");
  if (leniency < 0) throw std::invalid_argument("leniency must be non-negative");
}

std::vector<Member> derive_committee(const LedgerState& ledger, const Seed& prev_seed,
                                     std::uint64_t index, std::uint32_t t, unsigned ell) {
  std::vector<Member> out;
  out.reserve(ell);
  for (unsigned j = 1; j <= ell; ++j) {
    const SlotWinner w =
        derive_slot_winner(ledger, {index, static_cast<std::uint64_t>(t) * ell + j, prev_seed});
    out.push_back({w.owner, w.utxo});
  }
  return out;
}

Digest commitment_of(const Digest& secret) {
  ByteWriter w;
  w.tag("coalab-commit").digest(secret);
  return w.hash();
}

Digest random_secret(Rng& rng) {
  Digest d{};
  for (std::size_t i = 0; i < d.size(); i += 8) {
    const std::uint64_t v = rng.next();
    for (std::size_t k = 0; k < 8; ++k) d[i + k] = static_cast<std::uint8_t>(v >> (56 - 8 * k));
  }
  return d;
}

Digest message_digest(std::span<const Digest> commitments) {
  ByteWriter w;
  w.tag("coalab-dense-m").u32(static_cast<std::uint32_t>(commitments.size()));
  for (const auto& c : commitments) w.digest(c);
  return w.hash();
}

Digest aggregate_tag(const Digest& message, std::span<const Member> committee,
                     std::span<const Digest> signatures) {
  if (committee.size() != signatures.size()) throw std::invalid_argument("one signature per member");
  std::vector<std::pair<StakeholderId, Digest>> entries;
  for (std::size_t i = 0; i < committee.size(); ++i) entries.emplace_back(committee[i].owner, signatures[i]);
  std::sort(entries.begin(), entries.end());
  ByteWriter w;
  w.tag("coalab-agg").digest(message).u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& [id, sig] : entries) w.u32(id).digest(sig);
  return w.hash();
}

bool verify_aggregate(const Digest& tag, const Digest& message, std::span<const Member> committee,
                      const SignatureScheme& sigs) {
  std::vector<Digest> expected;
  expected.reserve(committee.size());
  for (const auto& m : committee) expected.push_back(sigs.sign(m.owner, message));
  return aggregate_tag(message, committee, expected) == tag;
}

Seed next_seed(std::span<const Digest> reveals, unsigned kappa) {
  if (reveals.empty()) throw std::invalid_argument("no reveals");
  if (kappa == 0 || kappa > 64) throw std::invalid_argument("kappa must be in [1, 64]");
  ByteWriter w;
  w.tag("coalab-dense-seed");
  for (const auto& r : reveals) w.digest(r);
  const std::uint64_t v = leading_u64(w.hash());
  return Seed(kappa == 64 ? v : v >> (64 - kappa), kappa);
}

CommitteeRound::CommitteeRound(std::uint64_t index, std::uint32_t fallback, std::vector<Member> members)
    : index_(index),
      fallback_(fallback),
      members_(std::move(members)),
      commitments_(members_.size()),
      secrets_(members_.size()),
      signatures_(members_.size()) {
  if (members_.empty()) throw std::invalid_argument("empty committee");
}

void CommitteeRound::commit(std::size_t position, const Digest& commitment) {
  auto& slot = commitments_.at(position);
  if (slot) throw std::invalid_argument("member " + std::to_string(position) + " already committed");
  slot = commitment;
}

bool CommitteeRound::all_committed() const {
  return std::all_of(commitments_.begin(), commitments_.end(), [](const auto& c) { return c.has_value(); });
}

std::vector<Digest> CommitteeRound::commitments() const {
  std::vector<Digest> out;
  for (std::size_t i = 0; i < commitments_.size(); ++i) {
    if (!commitments_[i]) throw std::runtime_error("commitment missing from member " + std::to_string(i));
    out.push_back(*commitments_[i]);
  }
  return out;
}

Digest CommitteeRound::message() const { return message_digest(commitments()); }

void CommitteeRound::reveal(std::size_t position, const Digest& secret) {
  // Opening early would let later members pick their commitment knowing it.
  if (!all_committed()) throw std::logic_error("reveal before every member has committed");
  const auto& c = commitments_.at(position);
  if (!c || commitment_of(secret) != *c) {
    throw std::invalid_argument("reveal from member " + std::to_string(position) +
                                " does not match its commitment");
  }
  secrets_[position] = secret;
}

void CommitteeRound::add_signature(std::size_t position, const Digest& signature,
                                   const SignatureScheme& sigs) {
  if (!sigs.verify(members_.at(position).owner, message(), signature)) {
    throw std::invalid_argument("signature from member " + std::to_string(position) +
                                " is not over this round's message");
  }
  signatures_[position] = signature;
}

bool CommitteeRound::complete() const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!secrets_[i] || !signatures_[i]) return false;
  }
  return true;
}

std::vector<Digest> CommitteeRound::reveals() const {
  std::vector<Digest> out;
  for (std::size_t i = 0; i < secrets_.size(); ++i) {
    if (!secrets_[i]) throw std::runtime_error("reveal missing from member " + std::to_string(i));
    out.push_back(*secrets_[i]);
  }
  return out;
}

Digest CommitteeRound::aggregate() const {
  std::vector<Digest> sigs;
  for (std::size_t i = 0; i < signatures_.size(); ++i) {
    if (!signatures_[i]) throw std::runtime_error("signature missing from member " + std::to_string(i));
    sigs.push_back(*signatures_[i]);
  }
  return aggregate_tag(message(), members_, sigs);
}

Digest ChainState::digest() const {
  ByteWriter w;
  w.tag("coalab-dense-state").digest(ledger.digest());
  w.u64(height).u64(index).i64(timestamp).u64(seed.value).u8(static_cast<std::uint8_t>(seed.bits));
  w.u32(static_cast<std::uint32_t>(deposits.size()));
  for (const auto& d : deposits) {
    w.u64(d.height).u64(d.index).u32(d.creator).u32(static_cast<std::uint32_t>(d.outputs.size()));
    for (auto o : d.outputs) w.u64(o);
  }
  w.u32(static_cast<std::uint32_t>(evidence_seen.size()));
  for (const auto& [who, idx] : evidence_seen) w.u32(who).u64(idx);
  return w.hash();
}

Engine::Engine(Params params, std::shared_ptr<const SignatureScheme> sigs)
    : params_(params), sigs_(std::move(sigs)) {
  params_.validate();
  if (!sigs_) throw std::invalid_argument("signature scheme required");
}

ChainState Engine::genesis_state(const Block& genesis, LedgerState ledger) const {
  if (!genesis.genesis_seed || genesis.genesis_seed->bits != params_.kappa) {
    throw std::invalid_argument("genesis block needs a kappa-bit seed");
  }
  ChainState s;
  s.index = genesis.index;
  s.timestamp = genesis.timestamp;
  s.ledger = std::move(ledger);
  s.seed = *genesis.genesis_seed;
  return s;
}

std::vector<Member> Engine::committee(const ChainState& parent, std::uint32_t fallback) const {
  return derive_committee(parent.ledger, parent.seed, parent.index + 1, fallback, params_.committee);
}

std::int64_t Engine::min_timestamp(const ChainState& parent, std::uint32_t fallback) const {
  return parent.timestamp + (static_cast<std::int64_t>(fallback) + 1) * params_.g0;
}

Block Engine::assemble(const ChainState& parent, const Block& parent_block,
                       const CommitteeRound& round, std::int64_t timestamp,
                       std::vector<Transaction> txs) const {
  Block b;
  b.index = round.index();
  b.prev_digest = parent_block.digest();
  b.timestamp = timestamp;
  b.creator = round.leader().owner;
  b.transactions = std::move(txs);
  b.dense = DenseProof{round.fallback(), round.reveals(), round.aggregate()};
  if (auto aux = choose_aux(parent.ledger, round.leader().utxo, b.creator, params_.c0)) {
    b.aux = AuxProof{*aux, sigs_->sign(b.creator, aux_message(b.index, b.prev_digest, *aux))};
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

  if (auto v = validate_block_structure(block, parent_block, *sigs_, true); !v) {
    return reject(v.reason(), v.detail());
  }
  if (block.genesis_seed) return reject(RejectReason::BadIndex, "unexpected genesis payload");
  if (!block.dense) return reject(RejectReason::WrongCommittee, "missing committee proof");
  const DenseProof& proof = *block.dense;
  if (proof.fallback > params_.max_fallback) {
    return reject(RejectReason::WrongCommittee, "fallback counter out of range");
  }
  if (proof.preimages.size() != params_.committee) {
    return reject(RejectReason::WrongCommittee, "expected " + std::to_string(params_.committee) + " preimages");
  }
  const std::int64_t earliest = min_timestamp(parent, proof.fallback);
  if (block.timestamp < earliest) {
    return reject(RejectReason::TooEarly, "timestamp " + std::to_string(block.timestamp) +
                                              " before " + std::to_string(earliest));
  }
  if (local_time && block.timestamp > *local_time + params_.leniency) {
    return reject(RejectReason::FutureDated, "timestamp beyond local clock plus leniency");
  }
  const auto members = committee(parent, proof.fallback);
  if (members.back().owner != block.creator) {
    return reject(RejectReason::WrongCommittee, "creator is not the derived leader");
  }
  std::vector<Digest> commitments;
  commitments.reserve(members.size());
  for (const auto& r : proof.preimages) commitments.push_back(commitment_of(r));
  if (!verify_aggregate(proof.aggregate, message_digest(commitments), members, *sigs_)) {
    return reject(RejectReason::PreimageMismatch,
                  "aggregate does not verify against the message rebuilt from the preimages");
  }
  const StakeCheck stake = check_stake(parent.ledger, members.back().utxo, block, params_.c0, *sigs_);
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
  s.seed = next_seed(proof.preimages, params_.kappa);

  EngineEvent ev;
  ev.kind = EventKind::BlockAccepted;
  ev.index = block.index;
  ev.height = h;
  ev.who = block.creator;
  ev.value = proof.fallback;
  t.events.push_back(std::move(ev));
  t.state = std::move(s);
  return t;
}

double grinding_log2(double f, unsigned ell) {
  if (!(f > 0 && f < 1)) throw std::invalid_argument("stake fraction must be in (0, 1)");
  return -static_cast<double>(ell) * std::log2(f);
}

double committee_membership_probability(double f, unsigned ell) {
  return 1.0 - std::pow(1.0 - f, static_cast<double>(ell));
}

double withholding_interval(double f, unsigned ell, double g0) {
  return g0 / std::pow(1.0 - f, static_cast<double>(ell));
}

}  // namespace coalab::dense
