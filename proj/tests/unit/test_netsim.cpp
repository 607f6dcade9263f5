#include <set>

#include "coalab/builtin_scenarios.hpp"
#include "coalab/netsim.hpp"
#include "coalab/strategy.hpp"
#include "doctest.h"

using namespace coalab;
using nlohmann::json;

namespace {

json minimal() {
  return json{{"name", "t"},
              {"protocol", "coa"},
              {"params", {{"kappa", 4}, {"t0", 4}}},
              {"stake", json::array({{{"stakeholder", 0}, {"satoshis", 10}}, {{"stakeholder", 1}, {"satoshis", 6}}})},
              {"duration", {{"slots", 10}}}};
}

std::set<std::string> fields_of(const json& j) {
  std::set<std::string> out;
  try {
    parse_scenario(j);
  } catch (const ConfigError& e) {
    for (const auto& f : e.errors()) out.insert(f.field);
  }
  return out;
}

}  // namespace

TEST_CASE("event queue orders by time, then sender, then insertion") {
  netsim::EventQueue<int> q;
  q.push(2.0, 0, 1);
  q.push(1.0, 5, 2);
  q.push(1.0, 3, 3);
  q.push(1.0, 3, 4);
  std::vector<int> order;
  while (!q.empty()) order.push_back(q.pop().payload);
  CHECK(order == std::vector<int>{3, 4, 2, 1});
}

TEST_CASE("scenario parsing accepts a minimal config and round-trips") {
  const auto c = parse_scenario(minimal());
  CHECK(c.stake.size() == 2);
  CHECK(c.params.kappa == 4);
  const auto again = parse_scenario(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("config errors name the offending fields") {
  auto j = minimal();
  j["stake"][1]["satoshis"] = "six";
  CHECK(fields_of(j).count("stake[1].satoshis"));
  j = minimal();
  j["stake"][1]["satoshis"] = 7;
  CHECK(fields_of(j).count("stake"));  // no longer sums to 2^kappa
  j = minimal();
  j["params"]["t0"] = 3;
  CHECK(fields_of(j).count("params.t0"));
  j = minimal();
  j["params"]["kappa"] = 4294967300ULL;
  CHECK(fields_of(j).count("params.kappa"));
  j = minimal();
  j["params"]["t0"] = -4;
  CHECK(fields_of(j).count("params.t0"));
  j = minimal();
  j["bogus"] = 1;
  CHECK(fields_of(j).count("bogus"));
  j = minimal();
  j["behaviors"] = json::array({{{"node", 9}, {"strategy", "nope"}}});
  const auto f = fields_of(j);
  CHECK(f.count("behaviors[0].node"));
  CHECK(f.count("behaviors[0].strategy"));
  j = minimal();
  j["delays"] = {{"min", 1}, {"mean", 5}, {"max", 2}};
  CHECK(fields_of(j).count("delays.mean"));
  j = minimal();
  j.erase("protocol");
  CHECK(fields_of(j).count("protocol"));
}

TEST_CASE("builtin strategies") {
  const auto& reg = StrategyRegistry::builtin();
  for (const char* id : {"honest", "honest-tip-only", "offline", "withhold", "intermittent", "ppcoin-multifork",
                         "bribe-acceptor"}) {
    CHECK(reg.contains(id));
  }
  json st = json::object();
  const auto honest = reg.create("honest", json::object());
  CHECK(honest.produce(SlotView{}, st));
  CHECK_FALSE(reg.create("offline", json::object()).produce(SlotView{}, st));
  CHECK_THROWS(reg.create("intermittent", json{{"online", 1.5}}));
  CHECK_THROWS(reg.create("missing", json::object()));
  // Helping one block behind only once the tip is overdue.
  CommitteeView v{0, 4, 5, 0, 0.5, false};
  CHECK_FALSE(honest_participation(v));
  v.tip_overdue = true;
  CHECK(honest_participation(v));
  v.parent_height = 3;
  CHECK_FALSE(honest_participation(v));
  const auto tip_only = reg.create("honest-tip-only", json::object());
  v.parent_height = 4;
  CHECK_FALSE(tip_only.participate(v, st));
  CHECK(reg.create("ppcoin-multifork", json{{"tips", 3}}).tips_to_extend(ForkView{0, 10, 4}, st) == 3);
}

TEST_CASE("honest CoA network converges and conserves stake") {
  const auto t = run_scenario(*find_builtin("coa-honest"));
  CHECK(t.metric_number("honest_tips_agree") == 1);
  CHECK(t.metric_number("rejected_events") == 0);
  CHECK(t.metric_number("conservation_violations") == 0);
  CHECK(t.metric_number("height") > 60);
  CHECK(t.metric_number("solidified_height") > 0);
}

TEST_CASE("an offline stakeholder is struck out") {
  const auto t = run_scenario(*find_builtin("coa-offline"));
  CHECK(t.metric_number("strikes") > 0);
  CHECK(t.metric_number("blacklists") > 0);
  CHECK(t.metric_number("blocks_by.3") == 0);
  CHECK(t.metric_number("honest_tips_agree") == 1);
}

TEST_CASE("dense and PPCoin networks run") {
  const auto d = run_scenario(*find_builtin("dense-honest"));
  CHECK(d.metric_number("honest_tips_agree") == 1);
  CHECK(d.metric_number("fork_blocks") == 0);
  const auto p = run_scenario(*find_builtin("ppcoin-honest"));
  CHECK(p.metric_number("height") > 10);
  const auto m = run_scenario(*find_builtin("ppcoin-multifork"));
  CHECK(m.metric_number("divergence") > p.metric_number("divergence"));
  // Uncapped coin age lets the oldest output dominate the weight.
  const auto v2 = run_scenario(*find_builtin("ppcoin-v02"));
  CHECK(v2.digest() != p.digest());
  CHECK(v2.metric_number("mean_max_weight_share") > p.metric_number("mean_max_weight_share"));
}

TEST_CASE("trace lines follow the documented JSON shape") {
  Trace t;
  t.event(1.5, "produce", 3, {{"index", std::uint64_t{7}}, {"status", std::string("ok")}, {"x", 0.25}});
  REQUIRE(t.lines().size() == 1);
  CHECK(t.lines()[0] == R"({"t":1.500000,"kind":"produce","node":3,"index":7,"status":"ok","x":0.25})");
  CHECK(json::parse(t.lines()[0])["kind"] == "produce");
  t.metric("height", 12);
  t.metric("ratio", 0.5);
  CHECK(t.metrics_csv("demo") == "scenario,metric,value\ndemo,height,12\ndemo,ratio,0.5\n");
  CHECK(t.metric_number("ratio") == 0.5);
  CHECK_THROWS(t.metric_value("absent"));
}

TEST_CASE("trace digest covers events and metrics, not retention") {
  Trace kept(true), dropped(false);
  for (auto* t : {&kept, &dropped}) {
    t->event(1, "a", 0);
    t->metric("m", 1);
  }
  CHECK(kept.digest() == dropped.digest());
  Trace other(true);
  other.event(1, "a", 1);
  other.metric("m", 1);
  CHECK(other.digest() != kept.digest());
}

TEST_CASE("same seed, same trace; different seed, different trace") {
  auto c = *find_builtin("coa-intermittent");
  const auto a = run_scenario(c, false).digest();
  CHECK(run_scenario(c, false).digest() == a);
  c.seed += 1;
  CHECK(run_scenario(c, false).digest() != a);
}

TEST_CASE("builtin scenarios all validate") {
  CHECK(builtin_scenarios().size() >= 20);
  std::set<std::string> names;
  for (const auto& c : builtin_scenarios()) {
    CHECK(validate_scenario(c).empty());
    CHECK(names.insert(c.name).second);
  }
  CHECK_FALSE(find_builtin("nope"));
}
