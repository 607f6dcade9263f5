#include "coalab/scenario.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "coalab/strategy.hpp"

namespace coalab {

using nlohmann::json;

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::CoA:
      return "coa";
    case Protocol::DenseCoA:
      return "dense_coa";
    case Protocol::PPCoin:
      return "ppcoin";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "coa") return Protocol::CoA;
  if (s == "dense_coa") return Protocol::DenseCoA;
  if (s == "ppcoin") return Protocol::PPCoin;
  throw std::invalid_argument("unknown protocol '" + s + "'");
}

const Behavior* ScenarioConfig::behavior_of(StakeholderId node) const {
  for (const auto& b : behaviors) {
    if (b.node == node) return &b;
  }
  return nullptr;
}

namespace {

std::string join_errors(const std::vector<FieldError>& errors) {
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& e : errors) os << "\n  " << e.field << ": " << e.message;
  return os.str();
}

// Collects errors instead of stopping at the first one.
class Reader {
 public:
  std::vector<FieldError> errors;

  template <class T>
  void get(const json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("must be a boolean");
      } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
        // Literals built in C++ arrive as signed integers; accept those when >= 0.
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
          throw std::invalid_argument("must be a non-negative integer");
        }
        if (v.get<std::uint64_t>() > std::numeric_limits<T>::max()) throw std::invalid_argument("out of range");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("must be an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("must be a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("must be a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      errors.push_back({path + key, e.what()});
    }
  }

  void fail(std::string field, std::string msg) { errors.push_back({std::move(field), std::move(msg)}); }
};

}  // namespace

ConfigError::ConfigError(std::vector<FieldError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

ScenarioConfig parse_scenario(const json& j) {
  Reader r;
  ScenarioConfig c;
  if (!j.is_object()) throw ConfigError(std::vector<FieldError>{{"<root>", "scenario must be a JSON object"}});
  static const std::set<std::string> known = {"name",   "protocol",    "params",   "stake",
                                               "behaviors", "delays", "clock_drift", "duration",
                                               "seed",   "analysis"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) r.fail(k, "unknown key");
  }
  r.get(j, "name", "", c.name);
  if (!j.contains("protocol")) {
    r.fail("protocol", "missing");
  } else {
    std::string p;
    r.get(j, "protocol", "", p);
    try {
      if (!p.empty()) c.protocol = protocol_from_string(p);
    } catch (const std::exception& e) {
      r.fail("protocol", e.what());
    }
  }

  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) {
      r.fail("params", "must be an object");
    } else {
      static const std::set<std::string> pk = {"kappa", "w", "comb", "g0_seconds", "c0", "c1", "t0",
                                               "leniency", "strikes_to_blacklist", "committee",
                                               "checkpoints", "ppcoin_version"};
      for (const auto& [k, v] : p.items()) {
        if (!pk.count(k)) r.fail("params." + k, "unknown key");
      }
      auto& pp = c.params;
      r.get(p, "kappa", "params.", pp.kappa);
      r.get(p, "w", "params.", pp.w);
      std::string comb;
      r.get(p, "comb", "params.", comb);
      if (!comb.empty()) {
        try {
          pp.comb = comb_kind_from_string(comb);
        } catch (const std::exception& e) {
          r.fail("params.comb", e.what());
        }
      }
      r.get(p, "g0_seconds", "params.", pp.g0_seconds);
      r.get(p, "c0", "params.", pp.c0);
      r.get(p, "c1", "params.", pp.c1);
      r.get(p, "t0", "params.", pp.t0);
      r.get(p, "leniency", "params.", pp.leniency);
      r.get(p, "strikes_to_blacklist", "params.", pp.strikes_to_blacklist);
      r.get(p, "committee", "params.", pp.committee);
      r.get(p, "checkpoints", "params.", pp.checkpoints);
      r.get(p, "ppcoin_version", "params.", pp.ppcoin_version);
    }
  }

  if (!j.contains("stake")) {
    r.fail("stake", "missing");
  } else if (!j.at("stake").is_array()) {
    r.fail("stake", "must be an array");
  } else {
    const json& st = j.at("stake");
    for (std::size_t i = 0; i < st.size(); ++i) {
      const std::string path = "stake[" + std::to_string(i) + "].";
      const json& e = st[i];
      if (!e.is_object()) {
        r.fail("stake[" + std::to_string(i) + "]", "must be an object");
        continue;
      }
      Allocation a;
      if (!e.contains("stakeholder")) r.fail(path + "stakeholder", "missing");
      if (!e.contains("satoshis")) r.fail(path + "satoshis", "missing");
      r.get(e, "stakeholder", path, a.owner);
      r.get(e, "satoshis", path, a.amount);
      r.get(e, "outputs", path, a.outputs);
      c.stake.push_back(a);
    }
  }

  if (j.contains("behaviors")) {
    const json& bs = j.at("behaviors");
    if (!bs.is_array()) {
      r.fail("behaviors", "must be an array");
    } else {
      for (std::size_t i = 0; i < bs.size(); ++i) {
        const std::string path = "behaviors[" + std::to_string(i) + "].";
        if (!bs[i].is_object()) {
          r.fail("behaviors[" + std::to_string(i) + "]", "must be an object");
          continue;
        }
        Behavior b;
        if (!bs[i].contains("node")) r.fail(path + "node", "missing");
        r.get(bs[i], "node", path, b.node);
        r.get(bs[i], "strategy", path, b.strategy);
        if (bs[i].contains("params")) b.params = bs[i].at("params");
        c.behaviors.push_back(std::move(b));
      }
    }
  }

  if (j.contains("delays")) {
    const json& d = j.at("delays");
    if (!d.is_object()) {
      r.fail("delays", "must be an object");
    } else {
      r.get(d, "min", "delays.", c.delays.min);
      r.get(d, "mean", "delays.", c.delays.mean);
      r.get(d, "max", "delays.", c.delays.max);
      r.get(d, "distribution", "delays.", c.delays.distribution);
    }
  }
  r.get(j, "clock_drift", "", c.clock_drift);
  if (j.contains("duration")) {
    const json& d = j.at("duration");
    if (!d.is_object()) {
      r.fail("duration", "must be an object");
    } else {
      r.get(d, "slots", "duration.", c.duration_slots);
      r.get(d, "seconds", "duration.", c.duration_seconds);
    }
  }
  r.get(j, "seed", "", c.seed);
  if (j.contains("analysis")) {
    if (!j.at("analysis").is_object() || !j.at("analysis").contains("type")) {
      r.fail("analysis", "must be an object with a 'type'");
    } else {
      c.analysis = j.at("analysis");
    }
  }

  if (r.errors.empty()) {
    auto more = validate_scenario(c);
    r.errors.insert(r.errors.end(), more.begin(), more.end());
  }
  if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
  return c;
}

std::vector<FieldError> validate_scenario(const ScenarioConfig& c) {
  std::vector<FieldError> errs;
  const auto& p = c.params;
  if (p.kappa == 0 || p.kappa > 62) errs.push_back({"params.kappa", "must be in [1, 62]"});
  try {
    CombSpec{p.comb, p.kappa, p.w}.validate();
  } catch (const std::exception& e) {
    errs.push_back({"params.w", e.what()});
  }
  if (p.g0_seconds <= 0) errs.push_back({"params.g0_seconds", "must be positive"});
  if (p.c0 == 0) errs.push_back({"params.c0", "must be positive"});
  if (2 * p.c1 > p.c0) errs.push_back({"params.c1", "must not exceed c0/2"});
  if (p.t0 < 2 || p.t0 % 2) errs.push_back({"params.t0", "must be even and at least 2"});
  if (p.leniency < 0) errs.push_back({"params.leniency", "must be non-negative"});
  if (p.strikes_to_blacklist == 0 || p.strikes_to_blacklist > 3) {
    errs.push_back({"params.strikes_to_blacklist", "must be in [1, 3]"});
  }
  if (p.committee == 0) errs.push_back({"params.committee", "must be positive"});
  if (p.ppcoin_version != "v0.2" && p.ppcoin_version != "v0.3") {
    errs.push_back({"params.ppcoin_version", "must be v0.2 or v0.3"});
  }

  if (c.stake.empty()) errs.push_back({"stake", "needs at least one entry"});
  std::set<StakeholderId> owners;
  Amount total = 0;
  bool overflow = false;
  for (std::size_t i = 0; i < c.stake.size(); ++i) {
    const auto& a = c.stake[i];
    const std::string path = "stake[" + std::to_string(i) + "]";
    if (a.amount == 0) errs.push_back({path + ".satoshis", "must be positive"});
    if (a.outputs == 0) errs.push_back({path + ".outputs", "must be positive"});
    if (a.outputs > a.amount && a.amount > 0) {
      errs.push_back({path + ".outputs", "more outputs than satoshis"});
    }
    if (!owners.insert(a.owner).second) {
      errs.push_back({path + ".stakeholder", "duplicate stakeholder " + std::to_string(a.owner)});
    }
    if (total + a.amount < total) overflow = true;
    total += a.amount;
  }
  if (p.kappa > 0 && p.kappa <= 62 && !c.stake.empty()) {
    const Amount want = Amount{1} << p.kappa;
    if (overflow || total != want) {
      errs.push_back({"stake", "satoshis sum to " + std::to_string(total) + ", expected 2^" +
                                   std::to_string(p.kappa) + " = " + std::to_string(want)});
    }
  }

  const auto& reg = StrategyRegistry::builtin();
  std::set<StakeholderId> seen;
  for (std::size_t i = 0; i < c.behaviors.size(); ++i) {
    const auto& b = c.behaviors[i];
    const std::string path = "behaviors[" + std::to_string(i) + "]";
    if (!owners.count(b.node)) errs.push_back({path + ".node", "no stake entry for node " + std::to_string(b.node)});
    if (!seen.insert(b.node).second) errs.push_back({path + ".node", "node listed twice"});
    if (!reg.contains(b.strategy)) {
      errs.push_back({path + ".strategy", "unknown strategy '" + b.strategy + "'"});
    } else {
      try {
        reg.create(b.strategy, b.params);
      } catch (const std::exception& e) {
        errs.push_back({path + ".params", e.what()});
      }
    }
  }

  const auto& d = c.delays;
  if (d.distribution != "uniform") errs.push_back({"delays.distribution", "only 'uniform' is supported"});
  if (!(d.min >= 0)) errs.push_back({"delays.min", "must be non-negative"});
  if (!(d.max >= d.min)) errs.push_back({"delays.max", "must be at least delays.min"});
  if (!(d.mean >= d.min && d.mean <= d.max)) errs.push_back({"delays.mean", "must lie in [min, max]"});
  if (d.distribution == "uniform" && std::abs(d.mean - (d.min + d.max) / 2) > 1e-9) {
    errs.push_back({"delays.mean", "uniform delays need mean = (min + max) / 2"});
  }
  if (!(c.clock_drift >= 0)) errs.push_back({"clock_drift", "must be non-negative"});
  if (c.clock_drift > static_cast<double>(p.leniency) / 2) {
    errs.push_back({"clock_drift", "must not exceed half the leniency"});
  }
  if (c.duration_slots > 0 && c.duration_seconds > 0) {
    errs.push_back({"duration", "give either slots or seconds, not both"});
  }
  if (c.protocol == Protocol::PPCoin && c.duration_slots > 0) {
    errs.push_back({"duration.slots", "PPCoin runs are measured in seconds"});
  }
  if (c.protocol != Protocol::PPCoin && c.duration_seconds > 0) {
    errs.push_back({"duration.seconds", "slot-based protocols are measured in slots"});
  }
  if (c.duration_slots == 0 && c.duration_seconds == 0 && !c.analysis) {
    errs.push_back({"duration", "needs slots or seconds (or an analysis block)"});
  }
  return errs;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<FieldError>{{"<file>", "cannot open " + path}});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::vector<FieldError>{{"<file>", std::string("malformed JSON: ") + e.what()}});
  }
  return parse_scenario(j);
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["protocol"] = to_string(c.protocol);
  const auto& p = c.params;
  j["params"] = {{"kappa", p.kappa},     {"w", p.w},
                 {"comb", to_string(p.comb)}, {"g0_seconds", p.g0_seconds},
                 {"c0", p.c0},           {"c1", p.c1},
                 {"t0", p.t0},           {"leniency", p.leniency},
                 {"strikes_to_blacklist", p.strikes_to_blacklist},
                 {"committee", p.committee}, {"checkpoints", p.checkpoints},
                 {"ppcoin_version", p.ppcoin_version}};
  j["stake"] = json::array();
  for (const auto& a : c.stake) {
    j["stake"].push_back({{"stakeholder", a.owner}, {"satoshis", a.amount}, {"outputs", a.outputs}});
  }
  j["behaviors"] = json::array();
  for (const auto& b : c.behaviors) {
    j["behaviors"].push_back({{"node", b.node}, {"strategy", b.strategy}, {"params", b.params}});
  }
  j["delays"] = {{"min", c.delays.min}, {"mean", c.delays.mean}, {"max", c.delays.max},
                 {"distribution", c.delays.distribution}};
  j["clock_drift"] = c.clock_drift;
  if (c.duration_slots) j["duration"] = {{"slots", c.duration_slots}};
  if (c.duration_seconds) j["duration"] = {{"seconds", c.duration_seconds}};
  j["seed"] = c.seed;
  if (c.analysis) j["analysis"] = *c.analysis;
  return j;
}

}  // namespace coalab
