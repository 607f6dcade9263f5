#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace coalab {

using StakeholderId = std::uint32_t;
using UtxoId = std::uint64_t;
using Amount = std::uint64_t;
/// Number of blocks from genesis along a chain (genesis has height 0).
using Height = std::uint64_t;

/// Position of a single satoshi in the global ordering, in [0, total_supply).
struct SatoshiIndex {
  std::uint64_t value = 0;
  auto operator<=>(const SatoshiIndex&) const = default;
};

/// Half-open satoshi range [begin, end).
struct Interval {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  std::uint64_t length() const { return end - begin; }
  bool operator==(const Interval&) const = default;
};

/// A kappa-bit value; seeds drive slot assignment. The first combined bit is
/// the most significant bit of `value`.
struct Seed {
  std::uint64_t value = 0;
  unsigned bits = 0;

  Seed() = default;
  Seed(std::uint64_t v, unsigned b) : value(v), bits(b) {
    if (b == 0 || b > 64) throw std::invalid_argument("seed width must be in [1, 64]");
    if (b < 64 && (v >> b) != 0) throw std::invalid_argument("seed value exceeds its width");
  }

  bool bit(unsigned i) const { return ((value >> (bits - 1 - i)) & 1U) != 0; }
  bool operator==(const Seed&) const = default;
};

}  // namespace coalab
