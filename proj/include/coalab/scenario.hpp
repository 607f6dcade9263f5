#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalab/comb.hpp"
#include "coalab/ledger.hpp"

namespace coalab {

enum class Protocol { CoA, DenseCoA, PPCoin };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct ProtocolParams {
  unsigned kappa = 16;
  unsigned w = 1;
  CombKind comb = CombKind::Concat;
  std::int64_t g0_seconds = 300;
  Amount c0 = 1;
  Amount c1 = 0;
  Height t0 = 100;
  std::int64_t leniency = 120;
  unsigned strikes_to_blacklist = 3;
  unsigned committee = 23;
  bool checkpoints = true;
  /// PPCoin only.
  std::string ppcoin_version = "v0.3";
};

struct Behavior {
  StakeholderId node = 0;
  std::string strategy = "honest";
  nlohmann::json params = nlohmann::json::object();
};

struct DelayModel {
  double min = 0.2;
  double mean = 1.1;
  double max = 2.0;
  std::string distribution = "uniform";
};

struct ScenarioConfig {
  std::string name = "unnamed";
  Protocol protocol = Protocol::CoA;
  ProtocolParams params;
  std::vector<Allocation> stake;
  std::vector<Behavior> behaviors;
  DelayModel delays;
  double clock_drift = 2.0;
  std::uint64_t duration_slots = 0;
  std::uint64_t duration_seconds = 0;
  std::uint64_t seed = 1;
  /// Optional analytic or attack study run alongside the simulation.
  std::optional<nlohmann::json> analysis;

  /// Strategy of `node`, "honest" unless a behavior names it.
  const Behavior* behavior_of(StakeholderId node) const;
};

struct FieldError {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

/// Parses and validates; throws ConfigError listing every offending field.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

/// Field-level problems of an already-built config (empty when valid).
std::vector<FieldError> validate_scenario(const ScenarioConfig& c);

nlohmann::json to_json(const ScenarioConfig& c);

}  // namespace coalab
