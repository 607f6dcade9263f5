#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include <json.hpp>

#include "coalab/rng.hpp"
#include "coalab/scenario.hpp"
#include "coalab/strategy.hpp"
#include "coalab/trace.hpp"

namespace coalab {

using SimTrace = Trace;

/// Runs the scenario's simulation (if it has a duration) and its analysis
/// block (if any). Deterministic in the config, seed included.
SimTrace run_scenario(const ScenarioConfig& config, bool keep_lines = true);

/// Evaluates an analysis block and records its results as metrics.
void run_analysis(const ScenarioConfig& config, Trace& trace);

namespace netsim {

/// Min-queue ordered by (time, sender, sequence number).
template <class Payload>
class EventQueue {
 public:
  struct Item {
    double time;
    std::uint64_t sender;
    std::uint64_t seq;
    Payload payload;
  };

  void push(double time, std::uint64_t sender, Payload p) {
    heap_.push(Item{time, sender, next_seq_++, std::move(p)});
  }
  bool empty() const { return heap_.empty(); }
  const Item& top() const { return heap_.top(); }
  Item pop() {
    Item it = heap_.top();
    heap_.pop();
    return it;
  }

 private:
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.sender != b.sender) return a.sender > b.sender;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Propagation delays and per-node clock offsets, all drawn from the seed.
class Network {
 public:
  Network(const ScenarioConfig& config, std::size_t nodes);

  double delay();
  /// Local clock minus real time for `node`.
  double drift(std::size_t node) const { return drift_[node]; }
  double local_time(std::size_t node, double real) const { return real + drift_[node]; }
  const DelayModel& model() const { return model_; }

 private:
  DelayModel model_;
  Rng rng_;
  std::vector<double> drift_;
};

struct NodeSetup {
  StakeholderId id = 0;
  Strategy strategy;
  nlohmann::json state = nlohmann::json::object();
};

/// One entry per stake-table row, in table order.
std::vector<NodeSetup> make_nodes(const ScenarioConfig& config);

Seed genesis_seed(const ScenarioConfig& config);

SimTrace run_coa(const ScenarioConfig& config, bool keep_lines);
SimTrace run_dense(const ScenarioConfig& config, bool keep_lines);
SimTrace run_ppcoin(const ScenarioConfig& config, bool keep_lines);

}  // namespace netsim
}  // namespace coalab
