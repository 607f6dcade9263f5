#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coalab/block_tree.hpp"
#include "coalab/checkpoint.hpp"
#include "coalab/events.hpp"

namespace coalab {

/// Result of validating a block on top of a known parent. Deterministic in
/// (parent path, block), so nodes may share it.
template <class State>
struct CachedTransition {
  std::shared_ptr<const State> state;
  std::optional<Rejection> rejection;
  std::vector<EngineEvent> events;
};

template <class State>
using TransitionCache = std::unordered_map<Digest, CachedTransition<State>, DigestHash>;

/// One participant's view: block tree, per-block derived state, orphan
/// buffer, checkpoints and reorg accounting. `Engine` supplies
/// `transition(parent_state, parent_block, block, local_time, on_path)` and
/// `params().leniency`.
template <class Engine>
class ChainNode {
 public:
  using State = typename Engine::State;

  enum class Status { Accepted, Duplicate, Orphaned, Rejected };
  struct Outcome {
    Status status = Status::Accepted;
    std::optional<Rejection> rejection;
  };

  ChainNode(const Engine& engine, const Block& genesis, State genesis_state,
            std::optional<Height> checkpoint_interval,
            std::shared_ptr<TransitionCache<State>> cache = nullptr)
      : engine_(&engine), tree_(genesis), cache_(std::move(cache)) {
    states_.emplace(tree_.root(), std::make_shared<const State>(std::move(genesis_state)));
    if (checkpoint_interval) checkpoints_.emplace(*checkpoint_interval);
  }

  void set_observer(Observer obs) { observer_ = std::move(obs); }

  Outcome receive(const Block& block, std::optional<std::int64_t> local_time) {
    const Digest d = block.digest();
    if (tree_.contains(d)) return {Status::Duplicate, std::nullopt};
    if (!tree_.contains(block.prev_digest)) {
      auto& bucket = orphans_[block.prev_digest];
      for (const auto& b : bucket) {
        if (b.digest() == d) return {Status::Orphaned, std::nullopt};
      }
      bucket.push_back(block);
      return {Status::Orphaned, std::nullopt};
    }
    Outcome out = accept(block, d, local_time);
    if (out.status == Status::Accepted) drain_orphans(d, local_time);
    return out;
  }

  const BlockTree& tree() const { return tree_; }
  const Digest& best() const { return tree_.best_tip(); }
  const State& best_state() const { return *states_.at(tree_.best_tip()); }
  const State& state(const Digest& d) const { return *states_.at(d); }
  std::shared_ptr<const State> state_ptr(const Digest& d) const { return states_.at(d); }

  std::uint64_t reorgs() const { return reorgs_; }
  Height max_reorg_depth() const { return max_reorg_depth_; }
  std::uint64_t rejected() const { return rejected_; }
  std::size_t orphan_count() const {
    std::size_t n = 0;
    for (const auto& [p, v] : orphans_) n += v.size();
    return n;
  }

 private:
  void emit(const EngineEvent& e) {
    if (observer_) observer_(e);
  }

  Outcome reject(const Block& block, RejectReason r, std::string detail) {
    ++rejected_;
    EngineEvent ev;
    ev.kind = EventKind::BlockRejected;
    ev.index = block.index;
    ev.who = block.creator;
    ev.value = static_cast<std::uint64_t>(r);
    ev.detail = std::string(to_string(r)) + ": " + detail;
    emit(ev);
    return {Status::Rejected, Rejection{r, std::move(detail)}};
  }

  Outcome accept(const Block& block, const Digest& d, std::optional<std::int64_t> local_time) {
    if (!tree_.is_ancestor(tree_.solidified(), block.prev_digest)) {
      return reject(block, RejectReason::BelowCheckpoint, "parent conflicts with solidified prefix");
    }
    if (local_time && block.timestamp > *local_time + engine_->params().leniency) {
      return reject(block, RejectReason::FutureDated, "timestamp beyond local clock plus leniency");
    }
    CachedTransition<State> tr;
    if (cache_) {
      if (auto it = cache_->find(d); it != cache_->end()) tr = it->second;
    }
    if (!tr.state && !tr.rejection) {
      const State& parent = *states_.at(block.prev_digest);
      const Block& parent_block = tree_.block(block.prev_digest);
      const Digest parent_digest = block.prev_digest;
      PathQuery on_path = [this, parent_digest](std::uint64_t idx) {
        return tree_.path_contains_index(parent_digest, idx);
      };
      auto t = engine_->transition(parent, parent_block, block, std::nullopt, on_path);
      if (t.state) tr.state = std::make_shared<const State>(std::move(*t.state));
      tr.rejection = std::move(t.rejection);
      tr.events = std::move(t.events);
      if (cache_) cache_->emplace(d, tr);
    }
    if (tr.rejection) {
      ++rejected_;
      for (const auto& e : tr.events) emit(e);
      return {Status::Rejected, tr.rejection};
    }
    const Digest old_best = tree_.best_tip();
    tree_.insert(block);
    states_.emplace(d, tr.state);
    for (const auto& e : tr.events) emit(e);
    if (checkpoints_) {
      if (auto s = checkpoints_->on_accept(tree_, d)) {
        EngineEvent ev;
        ev.kind = EventKind::Solidification;
        ev.height = tree_.node(*s).height;
        ev.index = tree_.block(*s).index;
        emit(ev);
      }
    }
    note_best_change(old_best);
    return {Status::Accepted, std::nullopt};
  }

  void note_best_change(const Digest& old_best) {
    const Digest& now = tree_.best_tip();
    if (now == old_best || tree_.is_ancestor(old_best, now)) return;
    // Find the fork point.
    const Height old_h = tree_.node(old_best).height;
    Digest a = old_best;
    Digest b = now;
    Height h = std::min(old_h, tree_.node(now).height);
    a = tree_.ancestor_at_height(a, h);
    b = tree_.ancestor_at_height(b, h);
    while (a != b) {
      a = *tree_.node(a).parent;
      b = *tree_.node(b).parent;
    }
    const Height depth = old_h - tree_.node(a).height;
    ++reorgs_;
    max_reorg_depth_ = std::max(max_reorg_depth_, depth);
    EngineEvent ev;
    ev.kind = EventKind::Reorg;
    ev.height = tree_.node(now).height;
    ev.value = depth;
    emit(ev);
  }

  void drain_orphans(const Digest& parent, std::optional<std::int64_t> local_time) {
    std::vector<Digest> work{parent};
    while (!work.empty()) {
      const Digest p = work.back();
      work.pop_back();
      auto it = orphans_.find(p);
      if (it == orphans_.end()) continue;
      auto children = std::move(it->second);
      orphans_.erase(it);
      for (const auto& child : children) {
        const Digest cd = child.digest();
        if (tree_.contains(cd)) continue;
        if (accept(child, cd, local_time).status == Status::Accepted) work.push_back(cd);
      }
    }
  }

  const Engine* engine_;
  BlockTree tree_;
  std::unordered_map<Digest, std::shared_ptr<const State>, DigestHash> states_;
  std::unordered_map<Digest, std::vector<Block>, DigestHash> orphans_;
  std::optional<CheckpointTracker> checkpoints_;
  std::shared_ptr<TransitionCache<State>> cache_;
  Observer observer_;
  std::uint64_t reorgs_ = 0;
  Height max_reorg_depth_ = 0;
  std::uint64_t rejected_ = 0;
};

}  // namespace coalab
