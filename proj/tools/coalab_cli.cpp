// coalab: batch front end for scenario runs and reference reproductions.
//
// Exit codes: 0 ok, 1 reproduction failure, 2 config or usage error.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "coalab/builtin_scenarios.hpp"
#include "coalab/netsim.hpp"
#include "coalab/reproduce.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coalab;

namespace {

constexpr int kOk = 0;
constexpr int kReproFailure = 1;
constexpr int kConfigError = 2;

// Write to a sibling temp file, then rename over the target.
void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void print_config_error(const std::string& source, const ConfigError& e) {
  std::cerr << "config error in " << source << ":\n";
  for (const auto& f : e.errors()) std::cerr << "  " << f.field << ": " << f.message << "\n";
}

// A path on disk, else a bundled scenario name.
ScenarioConfig resolve_config(const std::string& ref) {
  if (fs::exists(ref)) return load_scenario(ref);
  if (auto c = find_builtin(ref)) return *c;
  throw ConfigError(std::vector<FieldError>{{"config", "no file or bundled scenario named '" + ref + "'"}});
}

std::string metrics_json(const Trace& t, const std::string& scenario) {
  json m = json::object();
  for (const auto& [k, v] : t.metrics()) m[k] = v;
  return json{{"scenario", scenario}, {"metrics", m}}.dump(2) + "\n";
}

struct RunJob {
  std::string ref;
  ScenarioConfig config;
  fs::path out;
};

json run_one(const RunJob& job, const std::string& format) {
  const Trace trace = run_scenario(job.config, true);
  std::vector<std::string> artifacts;
  write_atomic(job.out / "trace.jsonl", trace.jsonl());
  artifacts.push_back("trace.jsonl");
  if (format == "json") {
    write_atomic(job.out / "metrics.json", metrics_json(trace, job.config.name));
    artifacts.push_back("metrics.json");
  } else {
    write_atomic(job.out / "metrics.csv", trace.metrics_csv(job.config.name));
    artifacts.push_back("metrics.csv");
  }
  artifacts.push_back("manifest.json");
  json manifest = {{"command", "run"},
                   {"config_path", job.ref},
                   {"config", to_json(job.config)},
                   {"seed", job.config.seed},
                   {"format", format},
                   {"output_dir", job.out.string()},
                   {"artifacts", artifacts},
                   {"trace_digest", to_hex(trace.digest())}};
  write_atomic(job.out / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; each index is isolated.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

int cmd_run(const std::vector<std::string>& configs, const std::string& manifest_path,
            std::optional<std::uint64_t> seed, const std::string& out, unsigned jobs,
            const std::string& format) {
  std::vector<RunJob> work;
  try {
    if (!manifest_path.empty()) {
      std::ifstream in(manifest_path);
      if (!in) throw ConfigError(std::vector<FieldError>{{"manifest", "cannot open " + manifest_path}});
      const json m = json::parse(in);
      RunJob j{m.at("config_path").get<std::string>(), parse_scenario(m.at("config")), {}};
      j.out = out.empty() ? fs::path(m.at("output_dir").get<std::string>()) : fs::path(out);
      work.push_back(std::move(j));
    }
    for (const auto& ref : configs) work.push_back({ref, resolve_config(ref), {}});
  } catch (const ConfigError& e) {
    print_config_error(configs.empty() ? manifest_path : "run", e);
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (work.empty()) {
    std::cerr << "run: need --config or --manifest\n";
    return kConfigError;
  }
  const fs::path base = out.empty() ? fs::path("out") : fs::path(out);
  for (auto& j : work) {
    if (seed) j.config.seed = *seed;
    if (j.out.empty()) j.out = work.size() == 1 ? base : base / j.config.name;
    if (auto errs = validate_scenario(j.config); !errs.empty()) {
      print_config_error(j.ref, ConfigError(std::move(errs)));
      return kConfigError;
    }
  }

  std::vector<json> manifests(work.size());
  std::vector<std::string> failures(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    try {
      manifests[i] = run_one(work[i], format);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  int rc = kOk;
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (!failures[i].empty()) {
      std::cerr << work[i].config.name << ": " << failures[i] << "\n";
      rc = kConfigError;
      continue;
    }
    std::cout << "# " << work[i].config.name << " -> " << work[i].out.string()
              << " digest " << manifests[i]["trace_digest"].get<std::string>() << "\n";
    std::ifstream metrics(work[i].out / (format == "json" ? "metrics.json" : "metrics.csv"));
    std::cout << metrics.rdbuf();
  }
  return rc;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_reproduce(std::vector<std::string> ids, std::uint64_t seed, const std::string& out, unsigned jobs,
                  const std::string& format) {
  if (ids.empty() || (ids.size() == 1 && ids[0] == "all")) ids = reproduce_ids();
  for (const auto& id : ids) {
    if (std::find(reproduce_ids().begin(), reproduce_ids().end(), id) == reproduce_ids().end()) {
      std::cerr << "unknown reproduce id '" << id << "'; known:";
      for (const auto& k : reproduce_ids()) std::cerr << " " << k;
      std::cerr << "\n";
      return kConfigError;
    }
  }
  std::vector<ReproReport> reports(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) { reports[i] = reproduce(ids[i], seed); });

  std::ostringstream body;
  bool all_pass = true;
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : reports) {
      json rows = json::array();
      for (const auto& row : r.rows) {
        rows.push_back({{"quantity", row.quantity}, {"expected", row.expected}, {"computed", row.computed},
                        {"tolerance", row.tolerance}, {"pass", row.pass}});
      }
      arr.push_back({{"id", r.id}, {"title", r.title}, {"criterion", r.criterion}, {"pass", r.pass()},
                     {"seconds", r.seconds}, {"rows", rows}});
      all_pass = all_pass && r.pass();
    }
    body << arr.dump(2) << "\n";
  } else {
    body << "id,quantity,expected,computed,tolerance,pass\n";
    for (const auto& r : reports) {
      for (const auto& row : r.rows) {
        body << r.id << "," << csv_field(row.quantity) << "," << csv_field(row.expected) << ","
             << format_number(row.computed) << "," << csv_field(row.tolerance) << ","
             << (row.pass ? "PASS" : "FAIL") << "\n";
      }
      all_pass = all_pass && r.pass();
    }
  }
  std::cout << body.str();
  if (!out.empty()) write_atomic(fs::path(out) / (format == "json" ? "reproduce.json" : "reproduce.csv"), body.str());
  for (const auto& r : reports) {
    std::cerr << (r.pass() ? "PASS " : "FAIL ") << r.id << " (" << r.title << ")\n";
  }
  return all_pass ? kOk : kReproFailure;
}

int cmd_list(const std::string& export_dir) {
  for (const auto& c : builtin_scenarios()) {
    std::cout << c.name << "\t" << to_string(c.protocol)
              << (c.analysis ? "\tanalysis:" + c.analysis->at("type").get<std::string>() : std::string("\tsimulation"))
              << "\n";
    if (!export_dir.empty()) write_atomic(fs::path(export_dir) / (c.name + ".json"), to_json(c).dump(2) + "\n");
  }
  return kOk;
}

int cmd_validate(const std::vector<std::string>& configs) {
  int rc = kOk;
  for (const auto& ref : configs) {
    try {
      const auto c = resolve_config(ref);
      if (auto errs = validate_scenario(c); !errs.empty()) throw ConfigError(std::move(errs));
      std::cout << ref << ": ok (" << c.name << ")\n";
    } catch (const ConfigError& e) {
      print_config_error(ref, e);
      rc = kConfigError;
    } catch (const json::exception& e) {
      std::cerr << "config error in " << ref << ": " << e.what() << "\n";
      rc = kConfigError;
    }
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coalab: proof-of-stake consensus simulation laboratory"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string manifest, out, format = "csv", export_dir;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::vector<std::string> ids;

  auto* run = app.add_subcommand("run", "Run scenarios and write trace, metrics and manifest");
  run->add_option("--config", configs, "Scenario JSON path or bundled scenario name (repeatable)");
  run->add_option("--manifest", manifest, "Re-run the config recorded in a manifest");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Output directory (default ./out)");
  run->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  run->add_option("--format", format, "Metrics format")->check(CLI::IsMember({"csv", "json"}));

  std::uint64_t repro_seed = 1;
  auto* repro = app.add_subcommand("reproduce", "Recompute reference values and compare");
  repro->add_option("ids", ids, "Ids to reproduce, or 'all' (default)");
  repro->add_option("--seed", repro_seed, "Seed for the Monte-Carlo parts");
  repro->add_option("--out", out, "Also write the report into this directory");
  repro->add_option("--jobs", jobs, "Ids run in parallel")->check(CLI::PositiveNumber);
  repro->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");
  list->add_option("--export", export_dir, "Write each bundled scenario as JSON into this directory");

  auto* validate = app.add_subcommand("validate-config", "Check scenario files without running them");
  validate->add_option("--config", configs, "Scenario JSON path or bundled name (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(configs, manifest, seed, out, jobs, format);
    if (*repro) return cmd_reproduce(ids, repro_seed, out, jobs, format);
    if (*list) return cmd_list(export_dir);
    if (*validate) return cmd_validate(configs);
  } catch (const ConfigError& e) {
    print_config_error("input", e);
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kReproFailure;
  }
  return kOk;
}
