#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalab/types.hpp"

namespace coalab {

/// Deterministic per-decision coin in [0, 1): strategies draw randomness
/// from here rather than from hidden state.
double strategy_coin(std::uint64_t seed, StakeholderId node, std::uint64_t slot, std::uint64_t salt = 0);

struct SlotView {
  StakeholderId node = 0;
  std::uint64_t index = 0;
  Height best_height = 0;
  double local_time = 0;
  double coin = 0;
};

struct CommitteeView {
  StakeholderId node = 0;
  Height parent_height = 0;
  Height best_height = 0;
  std::uint32_t fallback = 0;
  double coin = 0;
  /// The member's best tip is older than one G0 with no extension seen.
  bool tip_overdue = false;
};

/// Honest committee rule: sign on top of the best height, or one block
/// below it once the tip has stalled for a full G0.
bool honest_participation(const CommitteeView& v);

struct ForkView {
  StakeholderId node = 0;
  std::size_t tips = 0;  // blocks known to the node
  Height best_height = 0;
};

struct BribeOffer {
  double mu = 0;
  /// Fee the stakeholder forgoes on the honest branch.
  double fee = 0;
  bool ppcoin = false;
};

/// Callbacks a node consults at its decision points. Each receives the
/// node's view and its private state and returns the action.
struct Strategy {
  std::string id;
  std::function<bool(const SlotView&, nlohmann::json&)> produce;
  std::function<bool(const CommitteeView&, nlohmann::json&)> participate;
  /// How many of the highest known blocks to extend (1 for honest mining,
  /// which always means the best tip).
  std::function<unsigned(const ForkView&, nlohmann::json&)> tips_to_extend;
  std::function<bool(const BribeOffer&, nlohmann::json&)> accept_bribe;
};

class StrategyRegistry {
 public:
  using Factory = std::function<Strategy(const nlohmann::json& params)>;

  /// Throws std::invalid_argument when `id` is taken.
  void register_strategy(const std::string& id, Factory factory);
  bool contains(const std::string& id) const { return factories_.count(id) > 0; }
  /// Throws on unknown ids and on bad parameters.
  Strategy create(const std::string& id, const nlohmann::json& params) const;
  std::vector<std::string> ids() const;

  /// honest, offline, withhold, intermittent, ppcoin-multifork, bribe-acceptor.
  static const StrategyRegistry& builtin();

 private:
  std::map<std::string, Factory> factories_;
};

}  // namespace coalab
