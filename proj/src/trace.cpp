#include "coalab/trace.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace coalab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.10g", v);
  }
  return buf;
}

void Trace::event(double time, const char* kind, std::uint64_t node, std::initializer_list<Field> fields) {
  std::string line;
  line.reserve(96);
  char buf[64];
  std::snprintf(buf, sizeof buf, "{\"t\":%.6f,\"kind\":\"", time);
  line += buf;
  line += kind;
  line += "\",\"node\":";
  line += std::to_string(node);
  for (const auto& f : fields) {
    line += ",\"";
    line += f.key;
    line += "\":";
    std::visit(
        [&line](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            line += nlohmann::json(v).dump();
          } else if constexpr (std::is_same_v<T, double>) {
            const std::string s = format_number(v);
            line += std::isfinite(v) ? s : "\"" + s + "\"";
          } else {
            line += std::to_string(v);
          }
        },
        f.value);
  }
  line += '}';

  ByteWriter w;
  w.digest(running_).tag(line);
  running_ = w.hash();
  ++count_;
  if (keep_) lines_.push_back(std::move(line));
}

void Trace::metric(const std::string& name, double value) { metric(name, format_number(value)); }

void Trace::metric(const std::string& name, const std::string& value) {
  for (auto& [k, v] : metrics_) {
    if (k == name) {
      v = value;
      return;
    }
  }
  metrics_.emplace_back(name, value);
}

const std::string& Trace::metric_value(const std::string& name) const {
  for (const auto& [k, v] : metrics_) {
    if (k == name) return v;
  }
  throw std::out_of_range("no metric '" + name + "'");
}

double Trace::metric_number(const std::string& name) const { return std::stod(metric_value(name)); }

Digest Trace::digest() const {
  ByteWriter w;
  w.tag("coalab-trace").digest(running_).u64(count_).u64(metrics_.size());
  for (const auto& [k, v] : metrics_) w.tag(k).tag(v);
  return w.hash();
}

std::string Trace::jsonl() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string Trace::metrics_csv(const std::string& scenario) const {
  std::string out = kMetricsCsvHeader;
  out += '\n';
  for (const auto& [k, v] : metrics_) out += scenario + "," + k + "," + v + "\n";
  return out;
}

}  // namespace coalab
