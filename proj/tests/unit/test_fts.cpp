#include <map>

#include "../support/fixtures.hpp"
#include "coalab/fts.hpp"
#include "doctest.h"

using namespace coalab;

namespace {

// Naive oracle: walk the allocation in order, owner by owner.
StakeholderId owner_by_scan(const std::vector<Allocation>& alloc, std::uint64_t index) {
  for (const auto& a : alloc) {
    if (index < a.amount) return a.owner;
    index -= a.amount;
  }
  throw std::out_of_range("index past supply");
}

}  // namespace

TEST_CASE("follow-the-satoshi agrees with a linear scan of the allocation") {
  Rng rng(41);
  for (int round = 0; round < 50; ++round) {
    const auto alloc = testing::random_allocation(rng, 1000 + rng.below(5000), 2 + rng.below(10), 5);
    const auto l = LedgerState::from_allocation(alloc);
    for (int k = 0; k < 200; ++k) {
      const auto i = rng.below(l.total_supply());
      CHECK(follow_the_satoshi(l, i).owner == owner_by_scan(alloc, i));
    }
  }
}

TEST_CASE("slot hash depends on every input") {
  const Seed s(5, 8);
  const Digest base = slot_hash(10, 1, s);
  CHECK(slot_hash(10, 1, s) == base);
  CHECK(slot_hash(11, 1, s) != base);
  CHECK(slot_hash(10, 2, s) != base);
  CHECK(slot_hash(10, 1, Seed(6, 8)) != base);
  CHECK(slot_hash(10, 1, Seed(5, 9)) != base);
}

TEST_CASE("slot winner is the satoshi picked by the slot hash") {
  const std::vector<Allocation> alloc{{0, 300, 3}, {1, 700, 1}};
  const auto l = LedgerState::from_allocation(alloc);
  const Seed s(77, 10);
  for (std::uint64_t z = 1; z <= 100; ++z) {
    const auto w = derive_slot_winner(l, {4, z, s});
    CHECK(w == follow_the_satoshi(l, digest_mod(slot_hash(4, z, s), l.total_supply())));
  }
  CHECK_THROWS(derive_slot_winner(l, {4, 0, s}));
  CHECK_THROWS(derive_slot_winner(LedgerState{}, {4, 1, s}));
}

TEST_CASE("splitting an output in the ledger keeps every satoshi's owner") {
  const std::vector<Allocation> alloc{{0, 400, 1}, {1, 600, 1}};
  auto l = LedgerState::from_allocation(alloc);
  std::vector<StakeholderId> before;
  for (std::uint64_t i = 0; i < l.total_supply(); ++i) before.push_back(follow_the_satoshi(l, i).owner);
  Transaction split;
  split.inputs = {{l.outputs_of(1).front(), {}}};
  for (int k = 0; k < 6; ++k) split.outputs.push_back({1, 100});
  l.apply(split, 1, {});
  CHECK(l.outputs_of(1).size() == 6);
  for (std::uint64_t i = 0; i < l.total_supply(); ++i) CHECK(follow_the_satoshi(l, i).owner == before[i]);
}
