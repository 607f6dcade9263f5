#pragma once

#include <optional>
#include <set>

#include "coalab/block_tree.hpp"

namespace coalab {

/// Node-local checkpointing. Heights that are multiples of T1 are candidate
/// checkpoints; the first block a node receives at height h solidifies that
/// block's ancestor at h - T1. The block at h itself stays reversible.
class CheckpointTracker {
 public:
  explicit CheckpointTracker(Height t1);

  /// Call after `d` was inserted into `tree`. Returns the newly solidified
  /// block, if any.
  std::optional<Digest> on_accept(BlockTree& tree, const Digest& d);

  Height t1() const { return t1_; }

 private:
  Height t1_;
  std::set<Height> seen_;
};

}  // namespace coalab
