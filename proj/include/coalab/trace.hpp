#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "coalab/hash.hpp"

namespace coalab {

/// Ordered event log plus metrics. Every event line folds into a running
/// digest, so two runs agree on the digest iff they agree on every line.
class Trace {
 public:
  using Value = std::variant<std::int64_t, std::uint64_t, double, std::string>;
  struct Field {
    const char* key;
    Value value;
  };

  explicit Trace(bool keep_lines = true) : keep_(keep_lines) {}

  void event(double time, const char* kind, std::uint64_t node, std::initializer_list<Field> fields = {});

  void metric(const std::string& name, double value);
  void metric(const std::string& name, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& metrics() const { return metrics_; }
  /// Value of a recorded metric; throws if absent.
  const std::string& metric_value(const std::string& name) const;
  double metric_number(const std::string& name) const;

  const std::vector<std::string>& lines() const { return lines_; }
  std::uint64_t event_count() const { return count_; }
  /// Digest over all event lines and metrics.
  Digest digest() const;

  std::string jsonl() const;
  /// "scenario,metric,value" rows under a header.
  std::string metrics_csv(const std::string& scenario) const;

 private:
  bool keep_;
  std::vector<std::string> lines_;
  std::uint64_t count_ = 0;
  Digest running_{};
  std::vector<std::pair<std::string, std::string>> metrics_;
};

/// Fixed-format decimal used everywhere in traces, so output is stable.
std::string format_number(double v);

inline constexpr const char* kMetricsCsvHeader = "scenario,metric,value";

}  // namespace coalab
