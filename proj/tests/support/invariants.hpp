#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coalab::testing {

struct PropertyResult {
  std::string name;
  std::uint64_t cases = 0;     // randomized cases checked
  std::uint64_t failures = 0;
  std::string first_failure;   // empty when all cases hold
  bool ok() const { return failures == 0 && cases > 0; }
};

// Each property draws `cases` independent random instances from `seed`.
PropertyResult prop_single_eligible_creator(std::uint64_t cases, std::uint64_t seed);
PropertyResult prop_interleaving_cement(std::uint64_t cases, std::uint64_t seed);
PropertyResult prop_confiscation_conservation(std::uint64_t cases, std::uint64_t seed);
PropertyResult prop_three_strikes_timing(std::uint64_t cases, std::uint64_t seed);
PropertyResult prop_freeze_enforcement(std::uint64_t cases, std::uint64_t seed);
PropertyResult prop_checkpoint_monotonic(std::uint64_t cases, std::uint64_t seed);
PropertyResult prop_checkpoint_rejects_long_fork(std::uint64_t cases, std::uint64_t seed);

std::vector<PropertyResult> run_all_properties(std::uint64_t cases, std::uint64_t seed);

}  // namespace coalab::testing
