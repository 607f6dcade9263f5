#include <algorithm>
#include <cmath>
#include <map>

#include "coalab/netsim.hpp"
#include "coalab/ppcoin.hpp"

namespace coalab::netsim {
namespace {

struct PpcBlock {
  std::uint64_t id = 0;
  std::uint64_t parent = 0;
  Height height = 0;
  StakeholderId creator = 0;
  UtxoId output = 0;
  std::int64_t second = 0;
};

// One node's block tree: heaviest = highest, first seen on ties.
struct View {
  std::map<std::uint64_t, std::size_t> children;  // known id -> child count
  std::uint64_t best = 0;
  Height best_height = 0;
  std::uint64_t reorgs = 0;
  Height max_reorg_depth = 0;
  std::multimap<std::uint64_t, std::uint64_t> orphans;  // parent -> child
};

struct Ev {
  std::size_t node = 0;
  std::uint64_t block = 0;
  std::size_t from = 0;
  double sent = 0;
};

}  // namespace

SimTrace run_ppcoin(const ScenarioConfig& cfg, bool keep_lines) {
  const ppcoin::Version version =
      cfg.params.ppcoin_version == "v0.2" ? ppcoin::Version::V02 : ppcoin::Version::V03;
  auto nodes = make_nodes(cfg);
  Network net(cfg, nodes.size());
  Trace trace(keep_lines);

  // Coin age starts staggered over two cap lengths and resets when an output
  // stakes. d0 follows the live total weight (an idealised retarget), so the
  // block rate stays at the target while relative weights differ by version.
  const ppcoin::TimeweightConfig tw;
  struct Out {
    ppcoin::KernelOutput k;
    std::size_t node;
  };
  std::vector<Out> outputs;
  UtxoId next_id = 1;
  Rng age_rng(cfg.seed, 0xa9e);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& a = cfg.stake[i];
    for (unsigned j = 0; j < a.outputs; ++j) {
      const Amount amt = a.amount / a.outputs + (j == 0 ? a.amount % a.outputs : 0);
      const auto born = -1 - static_cast<std::int64_t>(age_rng.below(static_cast<std::uint64_t>(2 * tw.cap_seconds)));
      outputs.push_back(Out{{next_id++, static_cast<double>(amt), born}, i});
    }
  }
  auto weight_of = [&](const Out& o, std::int64_t s) {
    return o.k.coins * ppcoin::timeweight(s - o.k.created_at, version, tw);
  };
  ppcoin::StakeKernelState kernel;
  kernel.version = version;
  kernel.tw = tw;
  double max_share_sum = 0;
  // One modifier per 6-hour epoch, derived from the seed and shared by all
  // branches.
  auto modifier = [&](std::int64_t s) {
    return mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(s / ppcoin::kModifierPeriod) + 1));
  };

  std::vector<PpcBlock> blocks(1);  // genesis, id 0
  std::vector<View> views(nodes.size());
  for (auto& v : views) v.children[0] = 0;

  auto ancestor = [&](std::uint64_t id, Height h) {
    while (blocks[id].height > h) id = blocks[id].parent;
    return id;
  };
  auto attach = [&](std::size_t n, std::uint64_t id, double now) {
    View& v = views[n];
    const PpcBlock& b = blocks[id];
    v.children[id] = 0;
    ++v.children[b.parent];
    if (b.height > v.best_height) {
      if (blocks[id].parent != v.best) {
        // Switch branches: depth is measured from the old tip.
        std::uint64_t a = ancestor(v.best, std::min(v.best_height, b.height));
        std::uint64_t c = ancestor(id, std::min(v.best_height, b.height));
        while (a != c) {
          a = blocks[a].parent;
          c = blocks[c].parent;
        }
        const Height depth = v.best_height - blocks[a].height;
        if (depth > 0) {
          ++v.reorgs;
          v.max_reorg_depth = std::max(v.max_reorg_depth, depth);
          trace.event(now, "reorg", nodes[n].id, {{"height", b.height}, {"depth", depth}});
        }
      }
      v.best = id;
      v.best_height = b.height;
    }
  };
  auto accept = [&](std::size_t n, std::uint64_t id, double now) {
    View& v = views[n];
    if (v.children.count(id)) return false;
    if (!v.children.count(blocks[id].parent)) {
      v.orphans.emplace(blocks[id].parent, id);
      return false;
    }
    std::vector<std::uint64_t> work{id};
    while (!work.empty()) {
      const std::uint64_t next = work.back();
      work.pop_back();
      attach(n, next, now);
      auto [lo, hi] = v.orphans.equal_range(next);
      for (auto it = lo; it != hi; ++it) work.push_back(it->second);
      v.orphans.erase(lo, hi);
    }
    return true;
  };

  EventQueue<Ev> queue;
  std::uint64_t produced = 0;
  const std::int64_t duration = static_cast<std::int64_t>(cfg.duration_seconds);
  for (std::int64_t s = 1; s <= duration; ++s) {
    // Deliveries due before this second.
    while (!queue.empty() && queue.top().time < static_cast<double>(s)) {
      auto item = queue.pop();
      if (accept(item.payload.node, item.payload.block, item.time)) {
        trace.event(item.time, "deliver", nodes[item.payload.node].id,
                    {{"block", item.payload.block}, {"from", std::uint64_t{nodes[item.payload.from].id}}});
      }
    }
    kernel.stake_modifier = modifier(s);
    double total_weight = 0;
    double max_weight = 0;
    for (const auto& o : outputs) {
      const double wgt = weight_of(o, s);
      total_weight += wgt;
      max_weight = std::max(max_weight, wgt);
    }
    kernel.d0 = 1.0 / (ppcoin::kTargetInterval * total_weight);
    max_share_sum += max_weight / total_weight;
    for (auto& o : outputs) {
      if (!ppcoin::kernel_eligibility(kernel, s, o.k)) continue;
      const std::size_t n = o.node;
      View& v = views[n];
      NodeSetup& me = nodes[n];
      const unsigned k = me.strategy.tips_to_extend(ForkView{me.id, v.children.size(), v.best_height}, me.state);
      if (k == 0) continue;
      // Nothing at stake: extend the k highest known blocks, best tip first,
      // so a multi-tip miner also re-mines the blocks just below the tip.
      std::vector<std::uint64_t> parents;
      if (k == 1) {
        parents.push_back(v.best);
      } else {
        for (const auto& entry : v.children) parents.push_back(entry.first);
        const std::size_t keep = std::min<std::size_t>(k, parents.size());
        std::partial_sort(parents.begin(), parents.begin() + static_cast<std::ptrdiff_t>(keep), parents.end(),
                          [&](std::uint64_t a, std::uint64_t b) {
                            if ((a == v.best) != (b == v.best)) return a == v.best;
                            if (blocks[a].height != blocks[b].height) return blocks[a].height > blocks[b].height;
                            return a < b;
                          });
        parents.resize(keep);
      }
      o.k.created_at = s;  // coin age is consumed by staking
      for (const std::uint64_t parent : parents) {
        PpcBlock b{blocks.size(), parent, blocks[parent].height + 1, me.id, o.k.id, s};
        blocks.push_back(b);
        ++produced;
        trace.event(static_cast<double>(s), "produce", me.id,
                    {{"block", b.id}, {"parent", parent}, {"height", b.height}, {"output", o.k.id}});
        accept(n, b.id, static_cast<double>(s));
        for (std::size_t r = 0; r < nodes.size(); ++r) {
          if (r != n) queue.push(static_cast<double>(s) + net.delay(), n, Ev{r, b.id, n, static_cast<double>(s)});
        }
      }
    }
  }
  while (!queue.empty()) {
    auto item = queue.pop();
    accept(item.payload.node, item.payload.block, item.time);
  }

  std::size_t ref = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].strategy.id == "honest") {
      ref = i;
      break;
    }
  }
  const View& rv = views[ref];
  std::uint64_t reorgs = 0;
  Height depth = 0;
  bool agree = true;
  for (std::size_t i = 0; i < views.size(); ++i) {
    reorgs += views[i].reorgs;
    depth = std::max(depth, views[i].max_reorg_depth);
    if (nodes[i].strategy.id == "honest" && views[i].best != rv.best) agree = false;
  }
  const double fork_blocks = static_cast<double>(produced - rv.best_height);
  trace.metric("reference_node", static_cast<double>(nodes[ref].id));
  trace.metric("height", static_cast<double>(rv.best_height));
  trace.metric("blocks_total", static_cast<double>(produced));
  trace.metric("mean_block_interval",
               rv.best_height ? static_cast<double>(duration) / static_cast<double>(rv.best_height) : 0.0);
  trace.metric("fork_blocks", fork_blocks);
  trace.metric("divergence", produced ? fork_blocks / static_cast<double>(produced) : 0.0);
  trace.metric("reorgs", static_cast<double>(reorgs));
  trace.metric("max_reorg_depth", static_cast<double>(depth));
  trace.metric("honest_tips_agree", agree ? 1.0 : 0.0);
  trace.metric("mean_max_weight_share", duration > 0 ? max_share_sum / static_cast<double>(duration) : 0.0);
  return trace;
}

}  // namespace coalab::netsim
