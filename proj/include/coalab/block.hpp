#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coalab/hash.hpp"
#include "coalab/ledger.hpp"
#include "coalab/signature.hpp"
#include "coalab/types.hpp"

namespace coalab {

enum class RejectReason {
  BadLink,
  BadSignature,
  BadIndex,
  WrongCreator,
  TooEarly,
  FutureDated,
  Understaked,
  FrozenStake,
  BadEvidence,
  StaleEvidence,
  DuplicateEvidence,
  BadTransaction,
  BindingViolation,
  BelowCheckpoint,
  WrongCommittee,
  PreimageMismatch,
  BadAggregate,
  UnknownParent,
};

const char* to_string(RejectReason r);

struct Rejection {
  RejectReason reason;
  std::string detail;
};

/// Outcome of a validation step: empty on success.
class Verdict {
 public:
  Verdict() = default;
  static Verdict reject(RejectReason r, std::string detail = {}) {
    Verdict v;
    v.rejection_ = Rejection{r, std::move(detail)};
    return v;
  }
  bool ok() const { return !rejection_; }
  explicit operator bool() const { return ok(); }
  RejectReason reason() const { return rejection_.value().reason; }
  const std::string& detail() const { return rejection_.value().detail; }

 private:
  std::optional<Rejection> rejection_;
};

/// Signed header. The body (transactions, proofs, evidence) is committed to
/// through `body_root`, so a header alone suffices as double-sign evidence.
struct BlockHeader {
  std::uint64_t index = 0;
  Digest prev_digest{};
  std::int64_t timestamp = 0;
  StakeholderId creator = 0;
  Digest body_root{};
  Digest signature{};

  void encode(ByteWriter& w, bool with_signature = true) const;
  static BlockHeader decode(ByteReader& r);
  Digest signing_digest() const;
  Digest digest() const;
  bool operator==(const BlockHeader&) const = default;
};

/// Proof that the creator controls a second output topping the stake up to C0.
struct AuxProof {
  UtxoId output = 0;
  Digest signature{};
  bool operator==(const AuxProof&) const = default;
};

/// Two distinct headers for the same slot signed by the same creator.
struct DoubleSignEvidence {
  BlockHeader first;
  BlockHeader second;
  bool operator==(const DoubleSignEvidence&) const = default;
};

/// Committee artefacts carried by a Dense-CoA block.
struct DenseProof {
  std::uint32_t fallback = 0;
  std::vector<Digest> preimages;
  Digest aggregate{};
  bool operator==(const DenseProof&) const = default;
};

struct Block {
  std::uint64_t index = 0;
  Digest prev_digest{};
  std::int64_t timestamp = 0;
  StakeholderId creator = 0;
  std::vector<Transaction> transactions;
  std::optional<AuxProof> aux;
  std::optional<DoubleSignEvidence> evidence;
  std::optional<DenseProof> dense;
  /// Only the genesis block carries the bootstrap seed.
  std::optional<Seed> genesis_seed;
  Digest signature{};

  Digest body_root() const;
  BlockHeader header() const;
  Digest signing_digest() const { return header().signing_digest(); }
  Digest digest() const { return header().digest(); }

  void encode(ByteWriter& w) const;
  std::vector<std::uint8_t> serialize() const;
  static Block decode(ByteReader& r);
  static Block deserialize(std::span<const std::uint8_t> bytes);

  void sign(const SignatureScheme& sigs) { signature = sigs.sign(creator, signing_digest()); }

  bool operator==(const Block&) const = default;
};

Digest canonical_block_digest(const Block& block);

/// Most significant bit of the block digest.
bool block_bit(const Block& block);

/// Message the owner of an auxiliary output signs for block (index, prev).
Digest aux_message(std::uint64_t index, const Digest& prev_digest, UtxoId output);

/// Link, index and signature checks against the parent. With `contiguous`
/// the child index must be exactly parent+1; otherwise any larger index is
/// allowed (skipped slots leave gaps).
Verdict validate_block_structure(const Block& block, const Block& parent,
                                 const SignatureScheme& sigs, bool contiguous = false);

/// Genesis block with a fixed timestamp and bootstrap seed.
Block make_genesis(const Seed& seed, std::int64_t timestamp = 0);

}  // namespace coalab
