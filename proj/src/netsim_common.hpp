#pragma once

// Helpers shared by the chain-based drivers; not part of the public API.

#include <map>
#include <string>

#include "coalab/chain_node.hpp"
#include "coalab/netsim.hpp"

namespace coalab::netsim::detail {

struct Counters {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t confiscations = 0;
  std::uint64_t strikes = 0;
  std::uint64_t blacklists = 0;
  std::uint64_t solidifications = 0;
  std::uint64_t reorgs = 0;
  std::uint64_t sends = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t conservation_violations = 0;
  double min_delay = 1e300;
  double max_delay = 0;
};

inline void trace_engine_event(Trace& t, double now, StakeholderId node, const EngineEvent& e, Counters& c) {
  switch (e.kind) {
    case EventKind::BlockAccepted:
      ++c.accepted;
      break;
    case EventKind::BlockRejected:
      ++c.rejected;
      break;
    case EventKind::Confiscation:
      ++c.confiscations;
      break;
    case EventKind::Strike:
      ++c.strikes;
      break;
    case EventKind::Blacklist:
      ++c.blacklists;
      break;
    case EventKind::Solidification:
      ++c.solidifications;
      break;
    case EventKind::Reorg:
      ++c.reorgs;
      break;
    default:
      break;
  }
  if (e.detail.empty()) {
    t.event(now, to_string(e.kind), node,
            {{"index", e.index}, {"height", e.height}, {"who", std::uint64_t{e.who}}, {"value", e.value}});
  } else {
    t.event(now, to_string(e.kind), node,
            {{"index", e.index},
             {"height", e.height},
             {"who", std::uint64_t{e.who}},
             {"value", e.value},
             {"detail", e.detail}});
  }
}

inline const char* status_name(int s) {
  static const char* names[] = {"accepted", "duplicate", "orphaned", "rejected"};
  return names[s];
}

/// Supply plus destroyed satoshis must stay at the initial total.
template <class State>
bool conserves(const State& s, Amount initial) {
  return s.ledger.total_supply() + s.ledger.destroyed() == initial;
}

/// Metrics common to CoA and Dense-CoA runs, read off the reference node.
template <class Node>
void chain_metrics(Trace& t, const std::vector<std::unique_ptr<Node>>& chains,
                   const std::vector<NodeSetup>& nodes, std::size_t ref, const Counters& c,
                   Amount initial, double slots) {
  const auto& node = *chains[ref];
  const auto& tree = node.tree();
  const Height h = tree.node(node.best()).height;
  const auto& tip = tree.block(node.best());
  const auto& genesis = tree.block(tree.root());
  t.metric("reference_node", static_cast<double>(nodes[ref].id));
  t.metric("height", static_cast<double>(h));
  t.metric("mean_block_interval",
           h ? static_cast<double>(tip.timestamp - genesis.timestamp) / static_cast<double>(h) : 0.0);
  if (slots > 0) t.metric("density", static_cast<double>(h) / slots);
  t.metric("fork_blocks", static_cast<double>(tree.size() - 1 - h));
  std::uint64_t reorgs = 0;
  Height depth = 0;
  bool agree = true;
  std::uint64_t violations = c.conservation_violations;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    reorgs += chains[i]->reorgs();
    depth = std::max(depth, chains[i]->max_reorg_depth());
    if (nodes[i].strategy.id == "honest" && chains[i]->best() != node.best()) agree = false;
    if (!conserves(chains[i]->best_state(), initial)) ++violations;
  }
  t.metric("reorgs", static_cast<double>(reorgs));
  t.metric("max_reorg_depth", static_cast<double>(depth));
  t.metric("honest_tips_agree", agree ? 1.0 : 0.0);
  t.metric("solidified_height", static_cast<double>(tree.node(tree.solidified()).height));
  t.metric("accepted_events", static_cast<double>(c.accepted));
  t.metric("rejected_events", static_cast<double>(c.rejected));
  t.metric("confiscations", static_cast<double>(c.confiscations));
  t.metric("strikes", static_cast<double>(c.strikes));
  t.metric("blacklists", static_cast<double>(c.blacklists));
  t.metric("solidifications", static_cast<double>(c.solidifications));
  t.metric("messages_sent", static_cast<double>(c.sends));
  t.metric("deliveries", static_cast<double>(c.deliveries));
  t.metric("min_delay", c.deliveries ? c.min_delay : 0.0);
  t.metric("max_delay", c.max_delay);
  t.metric("conservation_violations", static_cast<double>(violations));
  // Stakeholder revenue in blocks on the reference chain.
  std::map<StakeholderId, std::uint64_t> produced;
  for (Digest d = node.best(); d != tree.root(); d = *tree.node(d).parent) ++produced[tree.block(d).creator];
  for (const auto& n : nodes) t.metric("blocks_by." + std::to_string(n.id), static_cast<double>(produced[n.id]));
}

/// First node running the honest strategy, else node 0.
inline std::size_t reference_node(const std::vector<NodeSetup>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].strategy.id == "honest") return i;
  }
  return 0;
}

}  // namespace coalab::netsim::detail
