#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "coalab/block.hpp"
#include "coalab/types.hpp"

namespace coalab {

enum class EventKind {
  BlockAccepted,
  BlockRejected,
  Confiscation,
  Strike,
  Blacklist,
  Solidification,
  Reorg,
  CommitReceived,
  RevealReceived,
  FallbackAdvanced,
};

const char* to_string(EventKind k);

/// Engine-level notification. Fields not meaningful for a kind stay zero.
struct EngineEvent {
  EventKind kind = EventKind::BlockAccepted;
  std::uint64_t index = 0;
  Height height = 0;
  StakeholderId who = 0;
  UtxoId utxo = 0;
  Amount amount = 0;
  std::uint64_t value = 0;
  std::string detail;
};

using Observer = std::function<void(const EngineEvent&)>;

/// Answers "does a block with this index lie on the parent's path?"
using PathQuery = std::function<bool(std::uint64_t index)>;

}  // namespace coalab
