#include "coalab/events.hpp"

namespace coalab {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::BlockAccepted: return "block-accepted";
    case EventKind::BlockRejected: return "block-rejected";
    case EventKind::Confiscation: return "confiscation";
    case EventKind::Strike: return "strike";
    case EventKind::Blacklist: return "blacklist";
    case EventKind::Solidification: return "solidification";
    case EventKind::Reorg: return "reorg";
    case EventKind::CommitReceived: return "commit-received";
    case EventKind::RevealReceived: return "reveal-received";
    case EventKind::FallbackAdvanced: return "fallback-advanced";
  }
  return "unknown";
}

}  // namespace coalab
