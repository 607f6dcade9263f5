#include "coalab/block.hpp"

#include <stdexcept>

namespace coalab {

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::BadLink: return "bad-link";
    case RejectReason::BadSignature: return "bad-signature";
    case RejectReason::BadIndex: return "bad-index";
    case RejectReason::WrongCreator: return "wrong-creator";
    case RejectReason::TooEarly: return "too-early";
    case RejectReason::FutureDated: return "future-dated";
    case RejectReason::Understaked: return "understaked";
    case RejectReason::FrozenStake: return "frozen-stake";
    case RejectReason::BadEvidence: return "bad-evidence";
    case RejectReason::StaleEvidence: return "stale-evidence";
    case RejectReason::DuplicateEvidence: return "duplicate-evidence";
    case RejectReason::BadTransaction: return "bad-transaction";
    case RejectReason::BindingViolation: return "binding-violation";
    case RejectReason::BelowCheckpoint: return "below-checkpoint";
    case RejectReason::WrongCommittee: return "wrong-committee";
    case RejectReason::PreimageMismatch: return "preimage-mismatch";
    case RejectReason::BadAggregate: return "bad-aggregate";
    case RejectReason::UnknownParent: return "unknown-parent";
  }
  return "unknown";
}

void BlockHeader::encode(ByteWriter& w, bool with_signature) const {
  w.u64(index).digest(prev_digest).i64(timestamp).u32(creator).digest(body_root);
  if (with_signature) w.digest(signature);
}

BlockHeader BlockHeader::decode(ByteReader& r) {
  BlockHeader h;
  h.index = r.u64();
  h.prev_digest = r.digest();
  h.timestamp = r.i64();
  h.creator = r.u32();
  h.body_root = r.digest();
  h.signature = r.digest();
  return h;
}

Digest BlockHeader::signing_digest() const {
  ByteWriter w;
  w.tag("coalab-block-sign");
  encode(w, false);
  return w.hash();
}

Digest BlockHeader::digest() const {
  ByteWriter w;
  w.tag("coalab-block");
  encode(w, true);
  return w.hash();
}

namespace {

void encode_body(ByteWriter& w, const Block& b) {
  w.u32(static_cast<std::uint32_t>(b.transactions.size()));
  for (const auto& tx : b.transactions) tx.encode(w, true);
  w.boolean(b.aux.has_value());
  if (b.aux) w.u64(b.aux->output).digest(b.aux->signature);
  w.boolean(b.evidence.has_value());
  if (b.evidence) {
    b.evidence->first.encode(w);
    b.evidence->second.encode(w);
  }
  w.boolean(b.dense.has_value());
  if (b.dense) {
    w.u32(b.dense->fallback).u32(static_cast<std::uint32_t>(b.dense->preimages.size()));
    for (const auto& p : b.dense->preimages) w.digest(p);
    w.digest(b.dense->aggregate);
  }
  w.boolean(b.genesis_seed.has_value());
  if (b.genesis_seed) w.u64(b.genesis_seed->value).u8(static_cast<std::uint8_t>(b.genesis_seed->bits));
}

void decode_body(ByteReader& r, Block& b) {
  const auto n_tx = r.u32();
  for (std::uint32_t i = 0; i < n_tx; ++i) b.transactions.push_back(Transaction::decode(r));
  if (r.boolean()) {
    AuxProof a;
    a.output = r.u64();
    a.signature = r.digest();
    b.aux = a;
  }
  if (r.boolean()) {
    DoubleSignEvidence e;
    e.first = BlockHeader::decode(r);
    e.second = BlockHeader::decode(r);
    b.evidence = e;
  }
  if (r.boolean()) {
    DenseProof d;
    d.fallback = r.u32();
    const auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) d.preimages.push_back(r.digest());
    d.aggregate = r.digest();
    b.dense = std::move(d);
  }
  if (r.boolean()) {
    const auto v = r.u64();
    const auto bits = r.u8();
    b.genesis_seed = Seed(v, bits);
  }
}

}  // namespace

Digest Block::body_root() const {
  ByteWriter w;
  w.tag("coalab-body");
  encode_body(w, *this);
  return w.hash();
}

BlockHeader Block::header() const {
  return BlockHeader{index, prev_digest, timestamp, creator, body_root(), signature};
}

void Block::encode(ByteWriter& w) const {
  w.u64(index).digest(prev_digest).i64(timestamp).u32(creator);
  encode_body(w, *this);
  w.digest(signature);
}

std::vector<std::uint8_t> Block::serialize() const {
  ByteWriter w;
  encode(w);
  return w.take();
}

Block Block::decode(ByteReader& r) {
  Block b;
  b.index = r.u64();
  b.prev_digest = r.digest();
  b.timestamp = r.i64();
  b.creator = r.u32();
  decode_body(r, b);
  b.signature = r.digest();
  return b;
}

Block Block::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Block b = decode(r);
  if (!r.done()) throw std::invalid_argument("trailing bytes after block");
  return b;
}

Digest canonical_block_digest(const Block& block) { return block.digest(); }

bool block_bit(const Block& block) { return (block.digest()[0] & 0x80) != 0; }

Digest aux_message(std::uint64_t index, const Digest& prev_digest, UtxoId output) {
  ByteWriter w;
  w.tag("coalab-aux").u64(index).digest(prev_digest).u64(output);
  return w.hash();
}

Verdict validate_block_structure(const Block& block, const Block& parent,
                                 const SignatureScheme& sigs, bool contiguous) {
  if (block.prev_digest != parent.digest()) {
    return Verdict::reject(RejectReason::BadLink, "prev digest does not match parent");
  }
  const bool index_ok = contiguous ? block.index == parent.index + 1 : block.index > parent.index;
  if (!index_ok) {
    return Verdict::reject(RejectReason::BadIndex, "index " + std::to_string(block.index) +
                                                       " after parent " + std::to_string(parent.index));
  }
  if (!sigs.verify(block.creator, block.signing_digest(), block.signature)) {
    return Verdict::reject(RejectReason::BadSignature, "creator signature does not verify");
  }
  return {};
}

Block make_genesis(const Seed& seed, std::int64_t timestamp) {
  Block g;
  g.timestamp = timestamp;
  g.genesis_seed = seed;
  return g;
}

}  // namespace coalab
