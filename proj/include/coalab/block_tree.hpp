#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "coalab/block.hpp"

namespace coalab {

struct TreeNode {
  Block block;
  Digest digest{};
  std::optional<Digest> parent;
  Height height = 0;
  /// Arrival order at this node; first-seen tie-break key.
  std::uint64_t arrival = 0;
  std::vector<Digest> children;
};

/// Fork-choice structure: every block ever accepted, with heights and a
/// solidified prefix that no reorganisation may cross.
class BlockTree {
 public:
  explicit BlockTree(Block genesis);

  const Digest& root() const { return root_; }
  bool contains(const Digest& d) const { return nodes_.count(d) != 0; }
  const TreeNode& node(const Digest& d) const;
  const Block& block(const Digest& d) const { return node(d).block; }
  std::size_t size() const { return nodes_.size(); }

  /// Adds a block whose parent is already present. Returns its digest, or
  /// nullopt when the block forks below the solidified prefix. Throws
  /// std::invalid_argument when the parent is unknown.
  std::optional<Digest> insert(const Block& block);

  /// Tip with the largest height among descendants of the solidified
  /// prefix; equal heights keep the earlier arrival.
  const Digest& best_tip() const { return best_; }
  std::vector<Digest> tips() const;

  const Digest& solidified() const { return solidified_; }
  /// Moves the irreversible prefix forward; throws if `d` does not extend it.
  void solidify(const Digest& d);

  bool is_ancestor(const Digest& ancestor, const Digest& descendant) const;
  /// Ancestor of `d` (inclusive) at height `h`; throws if h > height(d).
  const Digest& ancestor_at_height(const Digest& d, Height h) const;
  /// Whether a block with this index lies on the path from genesis to `tip`.
  bool path_contains_index(const Digest& tip, std::uint64_t index) const;
  /// Path genesis..tip inclusive.
  std::vector<Digest> path_to(const Digest& tip) const;

 private:
  void recompute_best();
  bool better(const TreeNode& a, const TreeNode& b) const;

  std::unordered_map<Digest, TreeNode, DigestHash> nodes_;
  Digest root_{};
  Digest best_{};
  Digest solidified_{};
  std::uint64_t arrivals_ = 0;
};

}  // namespace coalab
