#include <cmath>
#include <memory>

#include "coalab/coa.hpp"
#include "coalab/signature.hpp"
#include "netsim_common.hpp"

namespace coalab::netsim {
namespace {

struct Ev {
  enum class Kind { Tick, Deliver } kind = Kind::Tick;
  std::size_t node = 0;
  std::uint64_t index = 0;
  std::shared_ptr<const Block> block;
  std::size_t from = 0;
  double sent = 0;
};

coa::Params coa_params(const ScenarioConfig& c) {
  coa::Params p;
  p.kappa = c.params.kappa;
  p.w = c.params.w;
  p.comb = c.params.comb;
  p.g0 = c.params.g0_seconds;
  p.c0 = c.params.c0;
  p.c1 = c.params.c1;
  p.t0 = c.params.t0;
  p.leniency = c.params.leniency;
  p.strikes_to_blacklist = c.params.strikes_to_blacklist;
  p.validate();
  return p;
}

}  // namespace

SimTrace run_coa(const ScenarioConfig& cfg, bool keep_lines) {
  using Node = ChainNode<coa::Engine>;
  const coa::Params params = coa_params(cfg);
  const coa::Engine engine(params, std::make_shared<SimulatedSignatures>(cfg.seed));
  auto nodes = make_nodes(cfg);
  Network net(cfg, nodes.size());
  Trace trace(keep_lines);
  detail::Counters counters;

  const Block genesis = make_genesis(genesis_seed(cfg), 0);
  const LedgerState ledger = LedgerState::from_allocation(cfg.stake);
  const Amount initial = ledger.total_supply();
  const auto gstate = engine.genesis_state(genesis, ledger);
  auto cache = std::make_shared<TransitionCache<coa::ChainState>>();
  const std::optional<Height> t1 = cfg.params.checkpoints ? std::optional<Height>(params.t1()) : std::nullopt;

  double now = 0;
  std::vector<std::unique_ptr<Node>> chains;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    chains.push_back(std::make_unique<Node>(engine, genesis, gstate, t1, cache));
    const StakeholderId id = nodes[i].id;
    Node* self = chains.back().get();
    chains.back()->set_observer([&, id, self](const EngineEvent& e) {
      detail::trace_engine_event(trace, now, id, e, counters);
      if (e.kind == EventKind::Solidification &&
          !detail::conserves(self->state(self->tree().solidified()), initial)) {
        ++counters.conservation_violations;
      }
    });
  }

  const auto g0 = static_cast<double>(params.g0);
  EventQueue<Ev> queue;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    queue.push(g0 - net.drift(j), j, Ev{Ev::Kind::Tick, j, 1, nullptr, 0, 0});
  }

  auto broadcast = [&](std::size_t from, const std::shared_ptr<const Block>& b) {
    ++counters.sends;
    trace.event(now, "send", nodes[from].id, {{"index", b->index}, {"fanout", std::uint64_t{nodes.size() - 1}}});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k == from) continue;
      queue.push(now + net.delay(), from, Ev{Ev::Kind::Deliver, k, b->index, b, from, now});
    }
  };

  while (!queue.empty()) {
    auto item = queue.pop();
    now = item.time;
    Ev& ev = item.payload;
    Node& chain = *chains[ev.node];
    NodeSetup& me = nodes[ev.node];
    const double local = net.local_time(ev.node, now);

    if (ev.kind == Ev::Kind::Deliver) {
      const auto out = chain.receive(*ev.block, std::llround(local));
      const double delay = now - ev.sent;
      ++counters.deliveries;
      counters.min_delay = std::min(counters.min_delay, delay);
      counters.max_delay = std::max(counters.max_delay, delay);
      trace.event(now, "deliver", me.id,
                  {{"index", ev.block->index},
                   {"from", std::uint64_t{nodes[ev.from].id}},
                   {"status", std::string(detail::status_name(static_cast<int>(out.status)))}});
      continue;
    }

    // Slot tick: the node's local clock reached index * G0.
    if (ev.index < cfg.duration_slots) {
      queue.push(static_cast<double>(ev.index + 1) * g0 - net.drift(ev.node), ev.node,
                 Ev{Ev::Kind::Tick, ev.node, ev.index + 1, nullptr, 0, 0});
    }
    const auto& best = chain.best_state();
    if (ev.index <= best.index) continue;
    if (engine.eligible_creator(best, ev.index).owner != me.id) continue;
    const SlotView view{me.id, ev.index, best.height, local, strategy_coin(cfg.seed, me.id, ev.index)};
    if (!me.strategy.produce(view, me.state)) {
      trace.event(now, "skip", me.id, {{"index", ev.index}});
      continue;
    }
    const std::int64_t ts =
        std::max<std::int64_t>(coa::min_timestamp(best.timestamp, ev.index, best.index, params.g0), std::llround(local));
    auto block = std::make_shared<const Block>(
        engine.make_block(best, chain.tree().block(chain.best()), ev.index, ts, me.id));
    trace.event(now, "produce", me.id, {{"index", ev.index}, {"timestamp", std::int64_t{ts}}});
    chain.receive(*block, std::llround(local));
    broadcast(ev.node, block);
  }

  detail::chain_metrics(trace, chains, nodes, detail::reference_node(nodes), counters, initial,
                        static_cast<double>(cfg.duration_slots));
  return trace;
}

}  // namespace coalab::netsim
