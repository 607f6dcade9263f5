#include "coalab/ledger.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>

namespace coalab {

Digest SimulatedSignatures::secret(StakeholderId signer) const {
  ByteWriter w;
  w.tag("coalab-key").u64(domain_seed_).u32(signer);
  return w.hash();
}

Digest SimulatedSignatures::sign(StakeholderId signer, const Digest& message) const {
  ByteWriter w;
  w.digest(secret(signer)).digest(message);
  return w.hash();
}

bool SimulatedSignatures::verify(StakeholderId signer, const Digest& message,
                                 const Digest& signature) const {
  return sign(signer, message) == signature;
}

Amount Utxo::amount() const {
  Amount total = 0;
  for (const auto& iv : intervals) total += iv.length();
  return total;
}

void Transaction::encode(ByteWriter& w, bool with_signatures) const {
  w.u32(static_cast<std::uint32_t>(inputs.size()));
  for (const auto& in : inputs) {
    w.u64(in.utxo);
    if (with_signatures) w.digest(in.signature);
  }
  w.u32(static_cast<std::uint32_t>(outputs.size()));
  for (const auto& out : outputs) w.u32(out.owner).u64(out.amount);
  w.u64(latest_block_index).u64(fee);
}

Transaction Transaction::decode(ByteReader& r) {
  Transaction tx;
  const auto n_in = r.u32();
  for (std::uint32_t i = 0; i < n_in; ++i) {
    TxInput in;
    in.utxo = r.u64();
    in.signature = r.digest();
    tx.inputs.push_back(in);
  }
  const auto n_out = r.u32();
  for (std::uint32_t i = 0; i < n_out; ++i) {
    TxOutput out;
    out.owner = r.u32();
    out.amount = r.u64();
    tx.outputs.push_back(out);
  }
  tx.latest_block_index = r.u64();
  tx.fee = r.u64();
  return tx;
}

Digest Transaction::signing_digest() const {
  ByteWriter w;
  w.tag("coalab-tx-sign");
  encode(w, false);
  return w.hash();
}

Digest Transaction::digest() const {
  ByteWriter w;
  w.tag("coalab-tx");
  encode(w, true);
  return w.hash();
}

LedgerState LedgerState::from_allocation(std::span<const Allocation> alloc) {
  LedgerState s;
  std::uint64_t cursor = 0;
  for (const auto& a : alloc) {
    if (a.amount == 0) throw std::invalid_argument("allocation with zero amount");
    if (a.outputs == 0 || a.outputs > a.amount) {
      throw std::invalid_argument("allocation output count must be in [1, amount]");
    }
    const Amount base = a.amount / a.outputs;
    const Amount extra = a.amount % a.outputs;
    for (unsigned k = 0; k < a.outputs; ++k) {
      const Amount len = base + (k < extra ? 1 : 0);
      s.insert_output(a.owner, {Interval{cursor, cursor + len}}, 0, std::nullopt);
      cursor += len;
    }
  }
  s.supply_ = cursor;
  return s;
}

const Utxo* LedgerState::find(UtxoId id) const {
  auto it = utxos_.find(id);
  return it == utxos_.end() ? nullptr : &it->second;
}

const Utxo& LedgerState::at(UtxoId id) const {
  const Utxo* u = find(id);
  if (!u) throw std::out_of_range("unknown output " + std::to_string(id));
  return *u;
}

Amount LedgerState::balance_of(StakeholderId owner) const {
  Amount total = 0;
  for (const auto& [id, u] : utxos_) {
    if (u.owner == owner) total += u.amount();
  }
  return total;
}

std::vector<UtxoId> LedgerState::outputs_of(StakeholderId owner) const {
  std::vector<UtxoId> out;
  for (const auto& [id, u] : utxos_) {
    if (u.owner == owner) out.push_back(id);
  }
  return out;
}

const Utxo& LedgerState::lookup(std::uint64_t index) const {
  if (index >= supply_) throw std::out_of_range("satoshi index beyond total supply");
  auto it = satoshi_map_.upper_bound(index);
  --it;
  return utxos_.at(it->second.utxo);
}

UtxoId LedgerState::insert_output(StakeholderId owner, std::vector<Interval> intervals,
                                  Height height, std::optional<Height> frozen_until) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  std::vector<Interval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && merged.back().end == iv.begin) {
      merged.back().end = iv.end;
    } else {
      merged.push_back(iv);
    }
  }
  const UtxoId id = next_id_++;
  for (const auto& iv : merged) satoshi_map_.emplace(iv.begin, Span{iv.end, id});
  utxos_.emplace(id, Utxo{id, owner, std::move(merged), height, 0, frozen_until});
  return id;
}

void LedgerState::erase_output(UtxoId id) {
  auto it = utxos_.find(id);
  for (const auto& iv : it->second.intervals) satoshi_map_.erase(iv.begin);
  blacklist_.erase(id);
  utxos_.erase(it);
}

TxUndo LedgerState::apply(const Transaction& tx, Height height, const FeeCredit& fee,
                          const SignatureScheme* sigs) {
  using K = LedgerError::Kind;
  std::set<UtxoId> seen;
  Amount in_total = 0;
  std::optional<Digest> msg;
  for (const auto& in : tx.inputs) {
    const Utxo* u = find(in.utxo);
    if (!u || !seen.insert(in.utxo).second) {
      throw LedgerError(K::DoubleSpend, "input " + std::to_string(in.utxo) + " is not live");
    }
    if (u->frozen_at(height)) {
      throw LedgerError(K::Frozen, "input " + std::to_string(in.utxo) + " is frozen until height " +
                                       std::to_string(*u->frozen_until));
    }
    if (sigs) {
      if (!msg) msg = tx.signing_digest();
      if (!sigs->verify(u->owner, *msg, in.signature)) {
        throw LedgerError(K::BadSignature, "bad signature on input " + std::to_string(in.utxo));
      }
    }
    in_total += u->amount();
  }
  Amount out_total = tx.fee;
  for (const auto& out : tx.outputs) {
    if (out.amount == 0) throw LedgerError(K::EmptyOutput, "zero-amount output");
    if (out_total + out.amount < out_total) throw LedgerError(K::Conservation, "output overflow");
    out_total += out.amount;
  }
  if (in_total != out_total) {
    throw LedgerError(K::Conservation, "inputs " + std::to_string(in_total) + " != outputs+fee " +
                                           std::to_string(out_total));
  }

  TxUndo undo;
  undo.next_id_before = next_id_;
  std::vector<Interval> stream;
  for (const auto& in : tx.inputs) {
    const Utxo& u = utxos_.at(in.utxo);
    stream.insert(stream.end(), u.intervals.begin(), u.intervals.end());
    undo.spent.push_back(u);
    if (is_blacklisted(in.utxo)) undo.spent_blacklisted.push_back(in.utxo);
    erase_output(in.utxo);
  }

  // Satoshis flow in order: the concatenated input ranges are cut into the
  // outputs in declaration order, with the fee taking the remainder.
  std::size_t pos = 0;
  std::uint64_t offset = 0;
  auto take = [&](Amount want) {
    std::vector<Interval> pieces;
    while (want > 0) {
      const Interval& src = stream[pos];
      const std::uint64_t avail = src.length() - offset;
      const std::uint64_t n = std::min<std::uint64_t>(avail, want);
      pieces.push_back({src.begin + offset, src.begin + offset + n});
      want -= n;
      offset += n;
      if (offset == src.length()) {
        ++pos;
        offset = 0;
      }
    }
    return pieces;
  };
  for (const auto& out : tx.outputs) {
    undo.created.push_back(insert_output(out.owner, take(out.amount), height, std::nullopt));
  }
  if (tx.fee > 0) {
    undo.created.push_back(insert_output(fee.owner, take(tx.fee), height, fee.frozen_until));
  }
  return undo;
}

void LedgerState::revert(const TxUndo& undo) {
  for (auto id : undo.created) erase_output(id);
  for (const auto& u : undo.spent) {
    for (const auto& iv : u.intervals) satoshi_map_.emplace(iv.begin, Span{iv.end, u.id});
    utxos_.emplace(u.id, u);
  }
  for (auto id : undo.spent_blacklisted) blacklist_.insert(id);
  next_id_ = undo.next_id_before;
}

void LedgerState::blacklist_output(UtxoId id) {
  at(id);
  blacklist_.insert(id);
}

void LedgerState::set_strikes(UtxoId id, std::uint8_t strikes) {
  auto it = utxos_.find(id);
  if (it == utxos_.end()) throw std::out_of_range("unknown output " + std::to_string(id));
  if (strikes > 3) throw std::invalid_argument("strike count above 3");
  it->second.strikes = strikes;
}

void LedgerState::freeze_until(UtxoId id, Height first_spendable) {
  auto it = utxos_.find(id);
  if (it == utxos_.end()) throw std::out_of_range("unknown output " + std::to_string(id));
  auto& f = it->second.frozen_until;
  if (!f || *f < first_spendable) f = first_spendable;
}

Confiscation LedgerState::confiscate(std::span<const UtxoId> victims, StakeholderId reporter,
                                     Amount award, Height height,
                                     std::optional<Height> award_frozen_until) {
  std::vector<Interval> stream;
  std::set<UtxoId> seen;
  Confiscation result;
  for (auto id : victims) {
    if (!seen.insert(id).second) continue;
    const Utxo& u = at(id);
    stream.insert(stream.end(), u.intervals.begin(), u.intervals.end());
    result.confiscated += u.amount();
    erase_output(id);
  }
  result.awarded = std::min(award, result.confiscated);
  result.destroyed = result.confiscated - result.awarded;

  std::vector<Interval> awarded;
  std::vector<Interval> removed;
  Amount left = result.awarded;
  for (const auto& iv : stream) {
    const std::uint64_t n = std::min<std::uint64_t>(left, iv.length());
    if (n > 0) awarded.push_back({iv.begin, iv.begin + n});
    if (n < iv.length()) removed.push_back({iv.begin + n, iv.end});
    left -= n;
  }
  if (!awarded.empty()) {
    result.award_output = insert_output(reporter, std::move(awarded), height, award_frozen_until);
  }
  if (!removed.empty()) {
    compact(removed);
    supply_ -= result.destroyed;
    destroyed_ += result.destroyed;
  }
  return result;
}

void LedgerState::compact(const std::vector<Interval>& removed_in) {
  auto removed = removed_in;
  std::sort(removed.begin(), removed.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  for (auto& [id, u] : utxos_) u.intervals.clear();
  std::map<std::uint64_t, Span> fresh;
  std::size_t ri = 0;
  std::uint64_t shift = 0;
  for (const auto& [begin, span] : satoshi_map_) {
    while (ri < removed.size() && removed[ri].begin < begin) shift += removed[ri++].length();
    const std::uint64_t nb = begin - shift;
    const std::uint64_t ne = span.end - shift;
    auto& ivs = utxos_.at(span.utxo).intervals;
    if (!ivs.empty() && ivs.back().end == nb) {
      ivs.back().end = ne;
      fresh[ivs.back().begin].end = ne;
    } else {
      ivs.push_back({nb, ne});
      fresh.emplace(nb, Span{ne, span.utxo});
    }
  }
  satoshi_map_ = std::move(fresh);
}

void LedgerState::check_invariants() const {
  auto fail = [](const std::string& m) { throw std::logic_error("ledger invariant: " + m); };
  std::uint64_t cursor = 0;
  std::map<UtxoId, Amount> covered;
  for (const auto& [begin, span] : satoshi_map_) {
    if (begin != cursor) fail("gap or overlap at satoshi " + std::to_string(cursor));
    if (span.end <= begin) fail("empty interval");
    auto it = utxos_.find(span.utxo);
    if (it == utxos_.end()) fail("interval maps to dead output");
    const auto& ivs = it->second.intervals;
    if (std::find(ivs.begin(), ivs.end(), Interval{begin, span.end}) == ivs.end()) {
      fail("interval not recorded on its output");
    }
    covered[span.utxo] += span.end - begin;
    cursor = span.end;
  }
  if (cursor != supply_) fail("map does not cover total supply");
  for (const auto& [id, u] : utxos_) {
    if (u.id != id) fail("output id mismatch");
    if (u.strikes > 3) fail("strike count above 3");
    for (std::size_t k = 1; k < u.intervals.size(); ++k) {
      if (u.intervals[k - 1].end >= u.intervals[k].begin) fail("output intervals unsorted");
    }
    if (covered[id] != u.amount() || u.amount() == 0) fail("output amount mismatch");
  }
  for (auto id : blacklist_) {
    if (!utxos_.count(id)) fail("blacklist references dead output");
  }
}

Digest LedgerState::digest() const {
  ByteWriter w;
  w.tag("coalab-ledger").u64(supply_).u64(destroyed_).u64(next_id_);
  w.u32(static_cast<std::uint32_t>(utxos_.size()));
  for (const auto& [id, u] : utxos_) {
    w.u64(id).u32(u.owner).u64(u.creation_height).u8(u.strikes);
    w.boolean(u.frozen_until.has_value()).u64(u.frozen_until.value_or(0));
    w.u32(static_cast<std::uint32_t>(u.intervals.size()));
    for (const auto& iv : u.intervals) w.u64(iv.begin).u64(iv.end);
  }
  w.u32(static_cast<std::uint32_t>(blacklist_.size()));
  for (auto id : blacklist_) w.u64(id);
  return w.hash();
}

LedgerState apply_transaction(LedgerState ledger, const Transaction& tx, Height height,
                              const FeeCredit& fee, const SignatureScheme* sigs) {
  ledger.apply(tx, height, fee, sigs);
  return ledger;
}

void sign_transaction(Transaction& tx, const LedgerState& ledger, const SignatureScheme& sigs) {
  const Digest msg = tx.signing_digest();
  for (auto& in : tx.inputs) in.signature = sigs.sign(ledger.at(in.utxo).owner, msg);
}

namespace {

std::uint64_t parse_u64(const std::string& tok, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw std::invalid_argument("line " + std::to_string(line) + ": '" + tok +
                                "' is not a non-negative integer");
  }
  return v;
}

}  // namespace

std::vector<Allocation> parse_allocation(std::istream& in) {
  std::vector<Allocation> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ss(raw);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks.size() > 3 || toks.size() < 2) {
      throw std::invalid_argument("line " + std::to_string(line) +
                                  ": expected 'owner amount [outputs]'");
    }
    Allocation a;
    const auto owner = parse_u64(toks[0], line);
    if (owner > UINT32_MAX) throw std::invalid_argument("line " + std::to_string(line) + ": owner id too large");
    a.owner = static_cast<StakeholderId>(owner);
    a.amount = parse_u64(toks[1], line);
    if (a.amount == 0) throw std::invalid_argument("line " + std::to_string(line) + ": zero amount");
    if (toks.size() == 3) {
      const auto k = parse_u64(toks[2], line);
      if (k == 0 || k > a.amount) {
        throw std::invalid_argument("line " + std::to_string(line) + ": outputs must be in [1, amount]");
      }
      a.outputs = static_cast<unsigned>(k);
    }
    out.push_back(a);
  }
  return out;
}

Amount allocation_total(std::span<const Allocation> alloc) {
  Amount total = 0;
  for (const auto& a : alloc) total += a.amount;
  return total;
}

}  // namespace coalab
