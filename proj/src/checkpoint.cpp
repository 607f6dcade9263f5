#include "coalab/checkpoint.hpp"

#include <stdexcept>

namespace coalab {

CheckpointTracker::CheckpointTracker(Height t1) : t1_(t1) {
  if (t1 == 0) throw std::invalid_argument("checkpoint interval must be positive");
}

std::optional<Digest> CheckpointTracker::on_accept(BlockTree& tree, const Digest& d) {
  const Height h = tree.node(d).height;
  if (h < t1_ || h % t1_ != 0) return std::nullopt;
  if (!seen_.insert(h).second) return std::nullopt;
  const Digest target = tree.ancestor_at_height(d, h - t1_);
  if (target == tree.solidified() || !tree.is_ancestor(tree.solidified(), target)) {
    return std::nullopt;
  }
  tree.solidify(target);
  return target;
}

}  // namespace coalab
