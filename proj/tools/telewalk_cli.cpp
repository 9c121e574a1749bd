// telewalk: run scenarios, batch suites, recompute metrics, serve live sessions.
//
// Exit codes: 0 ok, 1 suite failure, 2 usage/config error, 3 fall, 4 divergence.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include "telewalk/scenario.hpp"
#include "telewalk/session.hpp"
#include "telewalk/sim.hpp"
#include "telewalk/suite.hpp"
#include "telewalk/trace.hpp"
#include "telewalk/ws_server.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace telewalk;

namespace {

enum Exit { kOk = 0, kSuiteFailed = 1, kUsage = 2, kFell = 3, kDiverged = 4 };

std::string default_out() {
  const char* env = std::getenv("TELEWALK_OUT");
  return env && *env ? env : "out";
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

void write_run(const fs::path& dir, const SimTrace& trace, const RunSummary& summary) {
  fs::create_directories(dir);
  write_trace_csv(dir / "trace.csv", trace.rows);
  write_events_jsonl(dir / "events.jsonl", trace.events);
  write_json(dir / "summary.json", to_json(summary));
}

int exit_for(RunStatus s) {
  switch (s) {
    case RunStatus::Fell: return kFell;
    case RunStatus::Diverged: return kDiverged;
    default: return kOk;
  }
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = default_out();
  bool verbose = false;
};

int cmd_run(const Common& o) {
  const ScenarioConfig cfg = load_scenario(o.config, o.overrides);
  const RunResult r = run_scenario(cfg);
  write_run(o.out, r.trace, r.summary);
  const RunSummary& s = r.summary;
  std::printf("%s: %s, %d steps, distance %.3f m, rms dcm error %.4f%s -> %s\n", s.name.c_str(),
              std::string(to_string(s.status)).c_str(), s.step_count, s.distance, s.rms_dcm_error,
              s.degraded_tracking ? " (degraded tracking)" : "", o.out.c_str());
  if (o.verbose) std::cout << to_json(s).dump(2) << '\n';
  return exit_for(s.status);
}

int cmd_suite(const std::string& dir, const std::string& out, bool verbose) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: not a directory: " << dir << '\n';
    return kUsage;
  }
  const auto files = scenario_files(dir);
  if (files.empty()) {
    std::cerr << "error: no scenario files in " << dir << '\n';
    return kUsage;
  }
  std::vector<SuiteEntry> entries;
  for (const auto& f : files) {
    SuiteEntry e = run_suite_entry(f);
    std::printf("%-24s %s\n", e.config.name.c_str(), e.pass() ? "PASS" : "FAIL");
    for (const auto& c : e.checks) {
      if (verbose || !c.pass) std::printf("    %-22s %s  %s\n", c.name.c_str(), c.pass ? "ok  " : "FAIL", c.detail.c_str());
    }
    write_run(fs::path(out) / e.config.name, e.run.trace, e.run.summary);
    entries.push_back(std::move(e));
  }
  const json report = suite_report(entries);
  write_json(fs::path(out) / "report.json", report);
  return report.at("pass").get<bool>() ? kOk : kSuiteFailed;
}

int cmd_metrics(const std::string& trace_path, const Common& o) {
  MetricsConfig mc;
  if (!o.config.empty()) mc = load_scenario(o.config, o.overrides).metrics;
  const auto rows = read_trace_csv(trace_path);
  if (rows.empty()) throw ConfigError("trace has no rows: " + trace_path);
  RunSummary s = compute_metrics(rows, mc);
  s.name = fs::path(trace_path).parent_path().filename().string();
  std::cout << to_json(s).dump(2) << '\n';
  return kOk;
}

ScenarioConfig serve_template(const Common& o, const std::string& headless) {
  json merged = o.config.empty() ? merge_with_defaults(json{{"name", "live"}, {"duration", 120.0}})
                                 : load_scenario_json(o.config);
  for (const auto& s : o.overrides) apply_override(merged, s);
  merged["pilot"]["type"] = headless.empty() ? "external" : headless;
  merged["pilot"]["commands"] = json::array();
  return scenario_from_json(merged);
}

void write_record(const fs::path& root, const SessionRecord& rec) {
  char name[32];
  std::snprintf(name, sizeof name, "session-%03d", rec.index);
  const fs::path dir = root / name;
  write_run(dir, rec.trace, rec.summary);
  std::ofstream cmds(dir / "commands.jsonl");
  for (const auto& c : rec.commands) cmds << to_json(c).dump() << '\n';
  write_json(dir / "replay.json", scenario_to_json(replay_config(rec)));
  std::printf("recorded %s (%zu ticks, %s)\n", dir.string().c_str(), rec.trace.rows.size(),
              std::string(to_string(rec.summary.status)).c_str());
  std::fflush(stdout);
}

int cmd_serve(const Common& o, int port, const std::string& headless, double rate, const std::string& address) {
  if (port <= 0 || port > 65535) {
    std::cerr << "error: port must be in 1..65535\n";
    return kUsage;
  }
  const ScenarioConfig tmpl = serve_template(o, headless);
  ServerOptions opts;
  opts.address = address;
  opts.port = static_cast<unsigned short>(port);
  opts.snapshot_rate = rate;
  opts.autostart = !headless.empty();
  opts.handle_signals = true;
  const fs::path root = o.out;
  SessionServer server(tmpl, opts, [root](SessionRecord rec) { write_record(root, rec); });
  try {
    server.open();
  } catch (const std::exception& e) {
    std::cerr << "error: cannot listen on " << address << ':' << port << ": " << e.what() << '\n';
    return kUsage;
  }
  std::printf("listening on ws://%s:%u/session (%s pilot, records in %s)\n", address.c_str(), server.port(),
              std::string(to_string(tmpl.pilot.kind)).c_str(), root.string().c_str());
  std::fflush(stdout);
  server.run();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Telelocomotion simulator: pilot-driven LIP walking reference coupled to a small biped"};
  app.require_subcommand(1);
  Common o;

  auto add_common = [&o](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("-c,--config", o.config, "scenario JSON");
    if (config_required) c->required();
    sub->add_option("-s,--set", o.overrides, "override a config key, e.g. dbft.K_x=0 (repeatable)");
    sub->add_option("-o,--out", o.out, "output directory (default $TELEWALK_OUT or ./out)");
    sub->add_flag("-v,--verbose", o.verbose, "print more detail");
  };

  auto* run = app.add_subcommand("run", "run one scenario; writes trace.csv, events.jsonl, summary.json");
  add_common(run, true);

  std::string suite_dir;
  auto* suite = app.add_subcommand("suite", "run every scenario in a directory against its acceptance block");
  suite->add_option("dir", suite_dir, "scenario directory")->required();
  suite->add_option("-o,--out", o.out, "output directory (default $TELEWALK_OUT or ./out)");
  suite->add_flag("-v,--verbose", o.verbose, "list every check");

  std::string trace_path;
  auto* metrics = app.add_subcommand("metrics", "recompute the summary of an existing trace.csv");
  metrics->add_option("trace", trace_path, "trace.csv")->required();
  metrics->add_option("-c,--config", o.config, "scenario whose metrics block to use");
  metrics->add_option("-s,--set", o.overrides, "override a config key");

  int port = 8765;
  std::string headless;
  double rate = 60.0;
  std::string address = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "serve a live session on ws://ADDRESS:PORT/session");
  add_common(serve, false);
  serve->add_option("-p,--port", port, "TCP port")->capture_default_str();
  serve->add_option("--address", address, "bind address")->capture_default_str();
  serve->add_option("--rate", rate, "snapshot rate in Hz")->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--headless-pilot", headless, "drive the session with a synthetic pilot and start it")
      ->check(CLI::IsMember({"periodic", "lean_walk", "reactive"}));

  auto* defaults = app.add_subcommand("defaults", "print the full default scenario document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*suite) return cmd_suite(suite_dir, o.out, o.verbose);
    if (*metrics) return cmd_metrics(trace_path, o);
    if (*serve) return cmd_serve(o, port, headless, rate, address);
    if (*defaults) {
      std::cout << default_scenario_json().dump(2) << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
