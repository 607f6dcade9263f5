#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coalab {

/// One reference quantity checked against its recomputation.
struct ReproRow {
  std::string quantity;
  std::string expected;   // reference value as quoted
  double computed = 0;
  std::string tolerance;
  bool pass = false;
};

struct ReproReport {
  std::string id;
  std::string title;
  int criterion = 0;      // acceptance criterion this id backs
  std::vector<ReproRow> rows;
  double seconds = 0;
  bool pass() const;
};

/// Known ids in acceptance order.
const std::vector<std::string>& reproduce_ids();

/// Runs one reproduction with every tolerance pinned. The acceptance suite
/// calls the same function, so the verdicts agree. Throws
/// std::invalid_argument for an unknown id.
ReproReport reproduce(const std::string& id, std::uint64_t seed = 1);

}  // namespace coalab
