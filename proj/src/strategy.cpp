#include "coalab/strategy.hpp"

#include <stdexcept>

#include "coalab/attacks.hpp"
#include "coalab/hash.hpp"

namespace coalab {

using nlohmann::json;

double strategy_coin(std::uint64_t seed, StakeholderId node, std::uint64_t slot, std::uint64_t salt) {
  ByteWriter w;
  w.tag("coalab-strategy-coin").u64(seed).u32(node).u64(slot).u64(salt);
  return digest_fraction(w.hash());
}

void StrategyRegistry::register_strategy(const std::string& id, Factory factory) {
  if (id.empty()) throw std::invalid_argument("strategy id must be non-empty");
  if (!factory) throw std::invalid_argument("strategy '" + id + "' needs a factory");
  if (!factories_.emplace(id, std::move(factory)).second) {
    throw std::invalid_argument("strategy '" + id + "' is already registered");
  }
}

Strategy StrategyRegistry::create(const std::string& id, const json& params) const {
  auto it = factories_.find(id);
  if (it == factories_.end()) throw std::invalid_argument("unknown strategy '" + id + "'");
  if (!params.is_object()) throw std::invalid_argument("strategy params must be an object");
  Strategy s = it->second(params);
  s.id = id;
  return s;
}

std::vector<std::string> StrategyRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : factories_) out.push_back(k);
  return out;
}

bool honest_participation(const CommitteeView& v) {
  return v.parent_height >= v.best_height || (v.parent_height + 1 == v.best_height && v.tip_overdue);
}

namespace {

double number_param(const json& p, const char* key, double fallback, double lo, double hi) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
  const double v = p.at(key).get<double>();
  if (!(v >= lo && v <= hi)) {
    throw std::invalid_argument(std::string(key) + " must be in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  return v;
}

Strategy honest() {
  Strategy s;
  s.produce = [](const SlotView&, json&) { return true; };
  s.participate = [](const CommitteeView& v, json&) { return honest_participation(v); };
  s.tips_to_extend = [](const ForkView&, json&) { return 1u; };
  s.accept_bribe = [](const BribeOffer&, json&) { return false; };
  return s;
}

Strategy absent() {
  Strategy s = honest();
  s.produce = [](const SlotView&, json&) { return false; };
  s.participate = [](const CommitteeView&, json&) { return false; };
  s.tips_to_extend = [](const ForkView&, json&) { return 0u; };
  return s;
}

}  // namespace

const StrategyRegistry& StrategyRegistry::builtin() {
  static const StrategyRegistry reg = [] {
    StrategyRegistry r;
    r.register_strategy("honest", [](const json&) { return honest(); });
    // Committee member that only ever signs on top of its best height.
    r.register_strategy("honest-tip-only", [](const json&) {
      Strategy s = honest();
      s.participate = [](const CommitteeView& v, json&) { return v.parent_height >= v.best_height; };
      return s;
    });
    r.register_strategy("offline", [](const json&) { return absent(); });
    // Stays online for everything else but refuses to help create blocks.
    r.register_strategy("withhold", [](const json&) {
      Strategy s = absent();
      s.tips_to_extend = [](const ForkView&, json&) { return 1u; };
      return s;
    });
    r.register_strategy("intermittent", [](const json& p) {
      const double online = number_param(p, "online", 0.5, 0, 1);
      Strategy s = honest();
      s.produce = [online](const SlotView& v, json&) { return v.coin < online; };
      s.participate = [online](const CommitteeView& v, json&) {
        return v.coin < online && honest_participation(v);
      };
      return s;
    });
    r.register_strategy("ppcoin-multifork", [](const json& p) {
      const auto depth = static_cast<unsigned>(number_param(p, "tips", 3, 1, 64));
      Strategy s = honest();
      s.tips_to_extend = [depth](const ForkView&, json&) { return depth; };
      return s;
    });
    r.register_strategy("bribe-acceptor", [](const json& p) {
      const double success = number_param(p, "P", 0.5, 1e-9, 1);
      const double f_attacker = number_param(p, "F_prime", 0, 0, 1e18);
      Strategy s = honest();
      s.accept_bribe = [success, f_attacker](const BribeOffer& o, json&) {
        return attacks::accepts_bribe(o.mu, o.fee, f_attacker, success, o.ppcoin);
      };
      return s;
    });
    return r;
  }();
  return reg;
}

}  // namespace coalab
