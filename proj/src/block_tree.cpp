#include "coalab/block_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace coalab {

BlockTree::BlockTree(Block genesis) {
  TreeNode n;
  n.digest = genesis.digest();
  n.block = std::move(genesis);
  n.arrival = arrivals_++;
  root_ = best_ = solidified_ = n.digest;
  nodes_.emplace(n.digest, std::move(n));
}

const TreeNode& BlockTree::node(const Digest& d) const {
  auto it = nodes_.find(d);
  if (it == nodes_.end()) throw std::out_of_range("unknown block " + to_hex(d).substr(0, 12));
  return it->second;
}

bool BlockTree::better(const TreeNode& a, const TreeNode& b) const {
  if (a.height != b.height) return a.height > b.height;
  return a.arrival < b.arrival;
}

std::optional<Digest> BlockTree::insert(const Block& block) {
  const Digest d = block.digest();
  if (auto it = nodes_.find(d); it != nodes_.end()) return d;
  auto pit = nodes_.find(block.prev_digest);
  if (pit == nodes_.end()) throw std::invalid_argument("parent not in tree");
  if (!is_ancestor(solidified_, block.prev_digest)) return std::nullopt;
  TreeNode n;
  n.block = block;
  n.digest = d;
  n.parent = block.prev_digest;
  n.height = pit->second.height + 1;
  n.arrival = arrivals_++;
  pit->second.children.push_back(d);
  auto [nit, _] = nodes_.emplace(d, std::move(n));
  if (better(nit->second, node(best_))) best_ = d;
  return d;
}

std::vector<Digest> BlockTree::tips() const {
  std::vector<Digest> out;
  for (const auto& [d, n] : nodes_) {
    if (n.children.empty() && is_ancestor(solidified_, d)) out.push_back(d);
  }
  std::sort(out.begin(), out.end(),
            [this](const Digest& a, const Digest& b) { return node(a).arrival < node(b).arrival; });
  return out;
}

void BlockTree::solidify(const Digest& d) {
  if (!is_ancestor(solidified_, d)) {
    throw std::logic_error("solidified prefix can only move forward");
  }
  solidified_ = d;
  if (!is_ancestor(solidified_, best_)) recompute_best();
}

void BlockTree::recompute_best() {
  // Walk the subtree under the solidified block.
  std::vector<Digest> stack{solidified_};
  best_ = solidified_;
  while (!stack.empty()) {
    const Digest d = stack.back();
    stack.pop_back();
    const TreeNode& n = node(d);
    if (better(n, node(best_))) best_ = d;
    for (const auto& c : n.children) stack.push_back(c);
  }
}

bool BlockTree::is_ancestor(const Digest& ancestor, const Digest& descendant) const {
  const TreeNode& a = node(ancestor);
  const TreeNode* cur = &node(descendant);
  while (cur->height > a.height) cur = &node(*cur->parent);
  return cur->digest == a.digest;
}

const Digest& BlockTree::ancestor_at_height(const Digest& d, Height h) const {
  const TreeNode* cur = &node(d);
  if (h > cur->height) throw std::out_of_range("height above block");
  while (cur->height > h) cur = &node(*cur->parent);
  return cur->digest;
}

bool BlockTree::path_contains_index(const Digest& tip, std::uint64_t index) const {
  const TreeNode* cur = &node(tip);
  while (true) {
    if (cur->block.index == index) return true;
    if (cur->block.index < index || !cur->parent) return false;
    cur = &node(*cur->parent);
  }
}

std::vector<Digest> BlockTree::path_to(const Digest& tip) const {
  std::vector<Digest> out;
  const TreeNode* cur = &node(tip);
  while (true) {
    out.push_back(cur->digest);
    if (!cur->parent) break;
    cur = &node(*cur->parent);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace coalab
