#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coalab/block.hpp"
#include "coalab/deposit.hpp"
#include "coalab/events.hpp"
#include "coalab/fts.hpp"
#include "coalab/ledger.hpp"

namespace coalab {
class Rng;
}

namespace coalab::dense {

struct Params {
  unsigned kappa = 51;
  unsigned committee = 23;
  std::int64_t g0 = 300;
  Amount c0 = 1;
  Amount c1 = 0;
  Height t0 = 100;
  std::int64_t leniency = 120;
  std::uint32_t max_fallback = 100'000;

  DepositRules deposit_rules() const { return {c0, c1, t0}; }
  Height t1() const { return t0 / 2; }
  void validate() const;
};

struct Member {
  StakeholderId owner = 0;
  UtxoId utxo = 0;
  bool operator==(const Member&) const = default;
};

/// Member j (1-based) comes from hash(i, t*ell + j, prev_seed); the last
/// member leads and signs the block.
std::vector<Member> derive_committee(const LedgerState& ledger, const Seed& prev_seed,
                                     std::uint64_t index, std::uint32_t t, unsigned ell);

/// h(R): commitment to a 256-bit secret.
Digest commitment_of(const Digest& secret);

/// Fresh 256-bit secret.
Digest random_secret(Rng& rng);

/// Digest of M = h(R_1) || ... || h(R_ell); this is what members sign.
Digest message_digest(std::span<const Digest> commitments);

/// Constant-size aggregate over the members' individual signatures on M.
Digest aggregate_tag(const Digest& message, std::span<const Member> committee,
                     std::span<const Digest> signatures);

/// Recomputes every member's signature from the key registry.
bool verify_aggregate(const Digest& tag, const Digest& message, std::span<const Member> committee,
                      const SignatureScheme& sigs);

/// kappa-bit truncation of hash(R_1 || ... || R_ell).
Seed next_seed(std::span<const Digest> reveals, unsigned kappa);

/// Commit-reveal bookkeeping for one (index, fallback) attempt.
class CommitteeRound {
 public:
  CommitteeRound(std::uint64_t index, std::uint32_t fallback, std::vector<Member> members);

  std::uint64_t index() const { return index_; }
  std::uint32_t fallback() const { return fallback_; }
  const std::vector<Member>& members() const { return members_; }
  const Member& leader() const { return members_.back(); }

  /// Positions are 0-based. Throws on a second commitment.
  void commit(std::size_t position, const Digest& commitment);
  bool all_committed() const;
  std::vector<Digest> commitments() const;
  /// Throws if some commitment is missing.
  Digest message() const;

  /// Throws std::invalid_argument when the secret does not match the commitment.
  void reveal(std::size_t position, const Digest& secret);
  /// Throws when the signature is not over this round's message.
  void add_signature(std::size_t position, const Digest& signature, const SignatureScheme& sigs);

  bool complete() const;
  std::vector<Digest> reveals() const;
  /// Throws std::runtime_error naming the first missing signer.
  Digest aggregate() const;

 private:
  std::uint64_t index_;
  std::uint32_t fallback_;
  std::vector<Member> members_;
  std::vector<std::optional<Digest>> commitments_;
  std::vector<std::optional<Digest>> secrets_;
  std::vector<std::optional<Digest>> signatures_;
};

struct ChainState {
  Height height = 0;
  std::uint64_t index = 0;
  std::int64_t timestamp = 0;
  LedgerState ledger;
  Seed seed;
  std::vector<DepositRecord> deposits;
  EvidenceSet evidence_seen;

  Digest digest() const;
};

struct Transition {
  std::optional<ChainState> state;
  std::optional<Rejection> rejection;
  std::vector<EngineEvent> events;
};

class Engine {
 public:
  using State = ChainState;

  Engine(Params params, std::shared_ptr<const SignatureScheme> sigs);

  const Params& params() const { return params_; }
  const SignatureScheme& sigs() const { return *sigs_; }

  ChainState genesis_state(const Block& genesis, LedgerState ledger) const;

  std::vector<Member> committee(const ChainState& parent, std::uint32_t fallback) const;

  /// Earliest timestamp for a block at fallback t: parent + (t+1)*G0.
  std::int64_t min_timestamp(const ChainState& parent, std::uint32_t fallback) const;

  /// Packs a completed round into a block signed by the leader.
  Block assemble(const ChainState& parent, const Block& parent_block, const CommitteeRound& round,
                 std::int64_t timestamp, std::vector<Transaction> txs = {}) const;

  Transition transition(const ChainState& parent, const Block& parent_block, const Block& block,
                        std::optional<std::int64_t> local_time, const PathQuery& on_path) const;

 private:
  Params params_;
  std::shared_ptr<const SignatureScheme> sigs_;
};

/// log2 of the expected hash invocations needed to grind a committee made
/// entirely of one party holding fraction f: -ell * log2(f).
double grinding_log2(double f, unsigned ell);

/// Probability that a holder of fraction f sits on a committee of ell.
double committee_membership_probability(double f, unsigned ell);

/// Closed-form mean interval when a fraction f withholds: G0 / (1-f)^ell.
double withholding_interval(double f, unsigned ell, double g0);

}  // namespace coalab::dense
