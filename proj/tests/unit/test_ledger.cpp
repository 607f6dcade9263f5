#include <map>
#include <sstream>

#include "../support/fixtures.hpp"
#include "coalab/ledger.hpp"
#include "doctest.h"

using namespace coalab;

namespace {

LedgerState three_owner_ledger() {
  const std::vector<Allocation> a{{0, 50, 2}, {1, 30, 1}, {2, 20, 4}};
  return LedgerState::from_allocation(a);
}

// Every index resolves to an output whose intervals contain it.
void check_lookup_oracle(const LedgerState& l) {
  for (std::uint64_t i = 0; i < l.total_supply(); ++i) {
    const Utxo& u = l.lookup(i);
    bool inside = false;
    for (const auto& iv : u.intervals) inside |= iv.begin <= i && i < iv.end;
    REQUIRE(inside);
  }
}

}  // namespace

TEST_CASE("allocation lays out outputs and balances") {
  const auto l = three_owner_ledger();
  CHECK(l.total_supply() == 100);
  CHECK(l.utxo_count() == 7);
  CHECK(l.balance_of(0) == 50);
  CHECK(l.balance_of(1) == 30);
  CHECK(l.balance_of(2) == 20);
  CHECK(l.outputs_of(2).size() == 4);
  CHECK(l.lookup(0).owner == 0);
  CHECK(l.lookup(49).owner == 0);
  CHECK(l.lookup(50).owner == 1);
  CHECK(l.lookup(99).owner == 2);
  CHECK_THROWS_AS(l.lookup(100), std::out_of_range);
  check_lookup_oracle(l);
  CHECK_NOTHROW(l.check_invariants());
}

TEST_CASE("allocation rejects zero amounts and impossible output counts") {
  CHECK_THROWS(LedgerState::from_allocation(std::vector<Allocation>{{0, 0, 1}}));
  CHECK_THROWS(LedgerState::from_allocation(std::vector<Allocation>{{0, 3, 4}}));
}

TEST_CASE("transaction conserves value and pays the fee to the creator") {
  auto l = three_owner_ledger();
  const UtxoId u = l.outputs_of(1).front();
  Transaction tx;
  tx.inputs.push_back({u, {}});
  tx.outputs = {{0, 10}, {2, 15}};
  tx.fee = 5;
  const LedgerState before = l;
  const auto undo = l.apply(tx, 3, FeeCredit{7, 9});
  CHECK(l.total_supply() == 100);
  CHECK(l.balance_of(1) == 0);
  CHECK(l.balance_of(0) == 60);
  CHECK(l.balance_of(2) == 35);
  CHECK(l.balance_of(7) == 5);
  const Utxo& fee_out = l.at(l.outputs_of(7).front());
  CHECK(fee_out.frozen_at(8));
  CHECK_FALSE(fee_out.frozen_at(9));
  CHECK_NOTHROW(l.check_invariants());
  check_lookup_oracle(l);
  l.revert(undo);
  CHECK(l == before);
}

TEST_CASE("ledger errors carry their kind") {
  auto l = three_owner_ledger();
  const UtxoId u = l.outputs_of(1).front();
  auto kind_of = [&](const Transaction& tx) {
    try {
      apply_transaction(l, tx, 1);
    } catch (const LedgerError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  Transaction twice;
  twice.inputs = {{u, {}}, {u, {}}};
  twice.outputs = {{0, 60}};
  CHECK(kind_of(twice) == static_cast<int>(LedgerError::Kind::DoubleSpend));
  Transaction missing;
  missing.inputs = {{999, {}}};
  missing.outputs = {{0, 1}};
  CHECK(kind_of(missing) == static_cast<int>(LedgerError::Kind::DoubleSpend));
  Transaction unbalanced;
  unbalanced.inputs = {{u, {}}};
  unbalanced.outputs = {{0, 29}};
  CHECK(kind_of(unbalanced) == static_cast<int>(LedgerError::Kind::Conservation));
  Transaction empty;
  empty.inputs = {{u, {}}};
  empty.outputs = {{0, 30}, {1, 0}};
  CHECK(kind_of(empty) == static_cast<int>(LedgerError::Kind::EmptyOutput));
  l.freeze_until(u, 5);
  Transaction ok;
  ok.inputs = {{u, {}}};
  ok.outputs = {{0, 30}};
  CHECK(kind_of(ok) == static_cast<int>(LedgerError::Kind::Frozen));
  CHECK_NOTHROW(apply_transaction(l, ok, 5));
}

TEST_CASE("signatures are checked when a scheme is supplied") {
  const SimulatedSignatures sigs(3);
  auto l = three_owner_ledger();
  Transaction tx;
  tx.inputs = {{l.outputs_of(1).front(), {}}};
  tx.outputs = {{0, 30}};
  CHECK_THROWS_AS(apply_transaction(l, tx, 1, {}, &sigs), LedgerError);
  sign_transaction(tx, l, sigs);
  CHECK_NOTHROW(apply_transaction(l, tx, 1, {}, &sigs));
  Transaction forged = tx;
  forged.outputs = {{2, 30}};
  CHECK_THROWS_AS(apply_transaction(l, forged, 1, {}, &sigs), LedgerError);
}

TEST_CASE("transactions round-trip through the wire encoding") {
  Transaction tx;
  tx.inputs = {{4, sha256(std::string_view("s"))}, {9, {}}};
  tx.outputs = {{1, 10}, {2, 20}};
  tx.latest_block_index = 77;
  tx.fee = 3;
  ByteWriter w;
  tx.encode(w);
  ByteReader r(w.data());
  CHECK(Transaction::decode(r) == tx);
  CHECK(r.done());
  // The signing digest ignores signatures; the full digest does not.
  Transaction unsigned_tx = tx;
  unsigned_tx.inputs[0].signature = {};
  CHECK(unsigned_tx.signing_digest() == tx.signing_digest());
  CHECK(unsigned_tx.digest() != tx.digest());
}

TEST_CASE("confiscation burns all but the award and renumbers the satoshis") {
  auto l = three_owner_ledger();
  const auto victims = l.outputs_of(0);
  const auto c = l.confiscate(victims, 2, 4, 6, 10);
  CHECK(c.confiscated == 50);
  CHECK(c.awarded == 4);
  CHECK(c.destroyed == 46);
  CHECK(l.total_supply() == 54);
  CHECK(l.destroyed() == 46);
  CHECK(l.balance_of(0) == 0);
  CHECK(l.balance_of(2) == 24);
  REQUIRE(c.award_output);
  CHECK(l.at(*c.award_output).frozen_at(9));
  CHECK_NOTHROW(l.check_invariants());
  check_lookup_oracle(l);
}

TEST_CASE("blacklist survives revert of a spend and strikes are capped") {
  auto l = three_owner_ledger();
  const UtxoId u = l.outputs_of(1).front();
  l.blacklist_output(u);
  Transaction tx;
  tx.inputs = {{u, {}}};
  tx.outputs = {{1, 30}};
  const auto undo = l.apply(tx, 1, {});
  CHECK_FALSE(l.is_blacklisted(u));
  l.revert(undo);
  CHECK(l.is_blacklisted(u));
  CHECK_THROWS(l.set_strikes(u, 4));
  CHECK_THROWS(l.blacklist_output(12345));
}

TEST_CASE("parse_allocation reads owner amount [outputs] lines") {
  std::istringstream ok("# comment\n0 100 2\n\n1 50   # trailing\n");
  const auto a = parse_allocation(ok);
  REQUIRE(a.size() == 2);
  CHECK(a[0].owner == 0);
  CHECK(a[0].amount == 100);
  CHECK(a[0].outputs == 2);
  CHECK(a[1].outputs == 1);
  CHECK(allocation_total(a) == 150);
  for (const char* bad : {"0\n", "0 1 2 3\n", "x 5\n", "0 0\n", "0 3 4\n", "0 -5\n", "4294967296 1\n"}) {
    std::istringstream in(bad);
    CHECK_THROWS_AS(parse_allocation(in), std::invalid_argument);
  }
}

TEST_CASE("property: random spends keep the interval map consistent with a balance oracle") {
  Rng rng(2024, 9);
  for (int round = 0; round < 200; ++round) {
    const unsigned owners = 2 + static_cast<unsigned>(rng.below(6));
    auto l = LedgerState::from_allocation(testing::random_allocation(rng, 512, owners, 4));
    std::map<StakeholderId, Amount> oracle;
    for (const auto& [id, u] : l.utxos()) oracle[u.owner] += u.amount();
    for (Height h = 1; h <= 15; ++h) {
      const auto& all = l.utxos();
      auto it = std::next(all.begin(), static_cast<long>(rng.below(all.size())));
      Transaction tx;
      tx.inputs = {{it->first, {}}};
      const Amount v = it->second.amount();
      oracle[it->second.owner] -= v;
      tx.fee = rng.below(v);
      const auto to = static_cast<StakeholderId>(rng.below(owners));
      tx.outputs = {{to, v - tx.fee}};
      oracle[to] += v - tx.fee;
      const auto miner = static_cast<StakeholderId>(rng.below(owners));
      oracle[miner] += tx.fee;
      l.apply(tx, h, FeeCredit{miner, std::nullopt});
      REQUIRE_NOTHROW(l.check_invariants());
    }
    for (const auto& [owner, amount] : oracle) CHECK(l.balance_of(owner) == amount);
    check_lookup_oracle(l);
  }
}
