#pragma once

#include <cstdint>

#include "coalab/hash.hpp"
#include "coalab/types.hpp"

namespace coalab {

/// Signing abstraction. The simulator studies incentives, not cryptanalysis,
/// so any scheme that binds (key, message) deterministically is sufficient.
class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  virtual Digest sign(StakeholderId signer, const Digest& message) const = 0;
  virtual bool verify(StakeholderId signer, const Digest& message, const Digest& signature) const = 0;
};

/// Keyed-hash signatures. Each stakeholder's secret is derived from a domain
/// seed; verification recomputes the tag from the key table.
class SimulatedSignatures final : public SignatureScheme {
 public:
  explicit SimulatedSignatures(std::uint64_t domain_seed = 0) : domain_seed_(domain_seed) {}

  Digest sign(StakeholderId signer, const Digest& message) const override;
  bool verify(StakeholderId signer, const Digest& message, const Digest& signature) const override;

 private:
  Digest secret(StakeholderId signer) const;

  std::uint64_t domain_seed_;
};

}  // namespace coalab
