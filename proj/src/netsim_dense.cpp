#include <cmath>
#include <map>
#include <memory>

#include "coalab/attacks.hpp"
#include "coalab/dense_coa.hpp"
#include "coalab/signature.hpp"
#include "netsim_common.hpp"

namespace coalab {
namespace netsim {
namespace {

// An attempt is one (parent, fallback) committee round. Committee
// messages travel in well under a second, so a round settles at its
// scheduled time; only the finished block goes through the network.
struct Ev {
  enum class Kind { Attempt, Deliver } kind = Kind::Attempt;
  Digest parent{};
  std::uint32_t fallback = 0;
  std::size_t node = 0;
  std::shared_ptr<const Block> block;
  std::size_t from = 0;
  double sent = 0;
};

dense::Params dense_params(const ScenarioConfig& c) {
  dense::Params p;
  p.kappa = c.params.kappa;
  p.committee = c.params.committee;
  p.g0 = c.params.g0_seconds;
  p.c0 = c.params.c0;
  p.c1 = c.params.c1;
  p.t0 = c.params.t0;
  p.leniency = c.params.leniency;
  p.validate();
  return p;
}

}  // namespace

SimTrace run_dense(const ScenarioConfig& cfg, bool keep_lines) {
  using Node = ChainNode<dense::Engine>;
  const dense::Params params = dense_params(cfg);
  auto sigs = std::make_shared<SimulatedSignatures>(cfg.seed);
  const dense::Engine engine(params, sigs);
  auto nodes = make_nodes(cfg);
  std::map<StakeholderId, std::size_t> slot_of;
  for (std::size_t i = 0; i < nodes.size(); ++i) slot_of[nodes[i].id] = i;
  Network net(cfg, nodes.size());
  Trace trace(keep_lines);
  detail::Counters counters;
  Rng secrets(cfg.seed, 0x5ec2e7);

  const Block genesis = make_genesis(genesis_seed(cfg), 0);
  const LedgerState ledger = LedgerState::from_allocation(cfg.stake);
  const Amount initial = ledger.total_supply();
  const auto gstate = engine.genesis_state(genesis, ledger);
  auto cache = std::make_shared<TransitionCache<dense::ChainState>>();
  const std::optional<Height> t1 = cfg.params.checkpoints ? std::optional<Height>(params.t1()) : std::nullopt;
  const std::size_t ref = detail::reference_node(nodes);

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
  auto schedule = [&](const Digest& parent, std::int64_t parent_ts, std::uint32_t t) {
    Ev ev;
    ev.parent = parent;
    ev.fallback = t;
    queue.push(static_cast<double>(parent_ts) + (t + 1) * g0, 0, ev);
  };
  schedule(genesis.digest(), genesis.timestamp, 0);

  auto lowest_best = [&] {
    Height h = ~Height{0};
    for (const auto& c : chains) h = std::min(h, c->tree().node(c->best()).height);
    return h;
  };
  auto target_reached = [&] {
    const auto& c = *chains[ref];
    return c.tree().node(c.best()).height >= cfg.duration_slots;
  };

  std::uint64_t attempts = 0;
  std::uint64_t failed_attempts = 0;
  while (!queue.empty() && !target_reached()) {
    auto item = queue.pop();
    now = item.time;
    Ev& ev = item.payload;

    if (ev.kind == Ev::Kind::Deliver) {
      Node& chain = *chains[ev.node];
      const auto out = chain.receive(*ev.block, std::llround(net.local_time(ev.node, now)));
      const double delay = now - ev.sent;
      ++counters.deliveries;
      counters.min_delay = std::min(counters.min_delay, delay);
      counters.max_delay = std::max(counters.max_delay, delay);
      trace.event(now, "deliver", nodes[ev.node].id,
                  {{"index", ev.block->index},
                   {"from", std::uint64_t{nodes[ev.from].id}},
                   {"status", std::string(detail::status_name(static_cast<int>(out.status)))}});
      continue;
    }

    // Committee attempt on `parent` at fallback t.
    const Node* holder = nullptr;
    for (const auto& c : chains) {
      if (c->tree().contains(ev.parent)) {
        holder = c.get();
        break;
      }
    }
    if (!holder) continue;
    const auto& pstate = holder->state(ev.parent);
    // No honest member helps a parent more than one block behind its tip.
    if (pstate.height + 1 < lowest_best()) continue;
    if (ev.fallback > params.max_fallback) continue;
    ++attempts;

    const auto committee = engine.committee(pstate, ev.fallback);
    std::size_t refuser = committee.size();
    for (std::size_t j = 0; j < committee.size() && refuser == committee.size(); ++j) {
      auto it = slot_of.find(committee[j].owner);
      if (it == slot_of.end()) {
        refuser = j;
        break;
      }
      const std::size_t k = it->second;
      const Node& view_chain = *chains[k];
      const bool knows = view_chain.tree().contains(ev.parent);
      const Digest best = view_chain.best();
      const double best_ts = static_cast<double>(view_chain.tree().block(best).timestamp);
      const CommitteeView view{nodes[k].id,
                               pstate.height,
                               view_chain.tree().node(best).height,
                               ev.fallback,
                               strategy_coin(cfg.seed, nodes[k].id, pstate.height + 1, ev.fallback),
                               now > best_ts + g0};
      if (!knows || !nodes[k].strategy.participate(view, nodes[k].state)) refuser = j;
    }
    if (refuser < committee.size()) {
      ++failed_attempts;
      trace.event(now, "fallback", committee[refuser].owner,
                  {{"height", pstate.height + 1}, {"t", std::uint64_t{ev.fallback}}});
      schedule(ev.parent, pstate.timestamp, ev.fallback + 1);
      continue;
    }

    // Full commit-reveal-sign exchange.
    dense::CommitteeRound round(pstate.index + 1, ev.fallback, committee);
    std::vector<Digest> rs;
    for (std::size_t j = 0; j < committee.size(); ++j) {
      rs.push_back(dense::random_secret(secrets));
      round.commit(j, dense::commitment_of(rs.back()));
    }
    const Digest m = round.message();
    for (std::size_t j = 0; j < committee.size(); ++j) {
      round.reveal(j, rs[j]);
      round.add_signature(j, sigs->sign(committee[j].owner, m), *sigs);
    }
    const std::size_t leader = slot_of.at(round.leader().owner);
    const auto ts = static_cast<std::int64_t>(std::llround(now));
    auto block = std::make_shared<const Block>(
        engine.assemble(pstate, holder->tree().block(ev.parent), round, ts));
    trace.event(now, "produce", nodes[leader].id,
                {{"index", block->index}, {"t", std::uint64_t{ev.fallback}}, {"timestamp", std::int64_t{ts}}});
    chains[leader]->receive(*block, std::llround(net.local_time(leader, now)));
    ++counters.sends;
    trace.event(now, "send", nodes[leader].id,
                {{"index", block->index}, {"fanout", std::uint64_t{nodes.size() - 1}}});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k == leader) continue;
      Ev d;
      d.kind = Ev::Kind::Deliver;
      d.node = k;
      d.block = block;
      d.from = leader;
      d.sent = now;
      queue.push(now + net.delay(), leader, d);
    }
    // The parent keeps going (competing siblings), and the new block opens its own rounds.
    schedule(ev.parent, pstate.timestamp, ev.fallback + 1);
    schedule(block->digest(), block->timestamp, 0);
  }

  // Let blocks already in flight land so the final views are comparable.
  while (!queue.empty()) {
    auto item = queue.pop();
    if (item.payload.kind != Ev::Kind::Deliver) continue;
    now = item.time;
    chains[item.payload.node]->receive(*item.payload.block, std::llround(net.local_time(item.payload.node, now)));
    ++counters.deliveries;
  }

  detail::chain_metrics(trace, chains, nodes, ref, counters, initial, 0.0);
  trace.metric("attempts", static_cast<double>(attempts));
  trace.metric("failed_attempts", static_cast<double>(failed_attempts));
  return trace;
}

}  // namespace netsim

namespace attacks {

DosResult simulate_withholding_dos(unsigned ell, double f, double g0, std::uint64_t blocks, std::uint64_t seed,
                                   bool help_prior_blocks) {
  if (!(f >= 0 && f < 1)) throw std::invalid_argument("withholding fraction must be in [0, 1)");
  if (ell == 0 || blocks == 0) throw std::invalid_argument("need ell > 0 and blocks > 0");
  ScenarioConfig c;
  c.name = "withholding-dos";
  c.protocol = Protocol::DenseCoA;
  c.params.kappa = 20;
  c.params.committee = ell;
  c.params.g0_seconds = static_cast<std::int64_t>(std::llround(g0));
  c.params.t0 = 100;
  c.seed = seed;
  c.duration_slots = blocks;
  const Amount supply = Amount{1} << c.params.kappa;
  const auto withheld = static_cast<Amount>(std::llround(f * static_cast<double>(supply)));
  const unsigned honest = 9;
  const Amount rest = supply - withheld;
  for (unsigned i = 0; i < honest; ++i) {
    const Amount a = rest / honest + (i == 0 ? rest % honest : 0);
    c.stake.push_back({i, a, 4});
    if (!help_prior_blocks) c.behaviors.push_back({i, "honest-tip-only", nlohmann::json::object()});
  }
  if (withheld > 0) {
    c.stake.push_back({honest, withheld, 4});
    c.behaviors.push_back({honest, "withhold", nlohmann::json::object()});
  }
  const Trace t = netsim::run_dense(c, false);
  DosResult r;
  r.mean_interval = t.metric_number("mean_block_interval");
  r.closed_form = dense::withholding_interval(f, ell, g0);
  r.blocks = static_cast<std::uint64_t>(t.metric_number("height"));
  r.fork_blocks = static_cast<std::uint64_t>(t.metric_number("fork_blocks"));
  return r;
}

}  // namespace attacks
}  // namespace coalab
