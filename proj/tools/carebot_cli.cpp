// carebot: scenario runner, log replay, catalog dump and the HTTP service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "carebot/context_store.hpp"
#include "carebot/errors.hpp"
#include "carebot/gateway.hpp"
#include "carebot/http_service.hpp"
#include "carebot/scenario.hpp"
#include "carebot/scripted_backend.hpp"
#include "carebot/setup.hpp"
#include "carebot/task_runtime.hpp"
#include "carebot/world_sim.hpp"

namespace fs = std::filesystem;
using namespace carebot;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct EngineFlags {
  std::string catalog;
  std::string seed_catalog;
  std::string world;
  std::string rules;
  std::string tasks;
  std::string backend;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--catalog", f.catalog, "Catalog file to use and update (created from the seed if missing)");
  cmd->add_option("--seed-catalog", f.seed_catalog, "Start from a private copy of this catalog file");
  cmd->add_option("--world", f.world, "World config (default: shipped carehome.json)");
  cmd->add_option("--rules", f.rules, "Rule table for the scripted backend");
  cmd->add_option("--tasks", f.tasks, "Extra task definitions (JSON)");
  cmd->add_option("--backend", f.backend, "Completion backend: scripted or remote");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path private_copy(const fs::path& seed) {
  std::random_device rd;
  const auto dir = fs::temp_directory_path() / ("carebot-" + std::to_string(rd()) + std::to_string(rd()));
  fs::create_directories(dir);
  const auto target = dir / "catalog.json";
  if (seed.empty()) {
    builtin_seed_catalog().save(target);
  } else {
    // Validate before copying so a corrupt seed fails here.
    Catalog::from_document(read_file(seed));
    fs::copy_file(seed, target);
  }
  return target;
}

struct Engine {
  std::unique_ptr<CatalogStore> catalog;
  std::unique_ptr<Gateway> gateway;
  fs::path catalog_path;
};

Engine make_engine(const EngineFlags& f, const std::optional<fs::path>& script_catalog = std::nullopt,
                   const std::optional<fs::path>& script_world = std::nullopt) {
  const auto data = default_data_dir();
  Engine e;
  if (!f.catalog.empty()) {
    Catalog seed = f.seed_catalog.empty() ? builtin_seed_catalog() : Catalog::from_document(read_file(f.seed_catalog));
    e.catalog_path = f.catalog;
    e.catalog = open_catalog_store(e.catalog_path, seed);
  } else {
    fs::path seed;
    if (!f.seed_catalog.empty()) {
      seed = f.seed_catalog;
    } else if (script_catalog) {
      seed = *script_catalog;
    } else if (fs::exists(data / "seed_catalog.json")) {
      seed = data / "seed_catalog.json";
    }
    e.catalog_path = private_copy(seed);
    e.catalog = open_catalog_store(e.catalog_path, builtin_seed_catalog());
  }

  fs::path world_path = !f.world.empty() ? fs::path(f.world) : script_world.value_or(data / "carehome.json");
  e.gateway = std::make_unique<Gateway>(*e.catalog, load_world_config(world_path));

  const fs::path rules_path = f.rules.empty() ? data / "scripted_rules.json" : fs::path(f.rules);
  register_standard_backends(*e.gateway,
                             std::make_shared<const ScriptedBackend>(ScriptedBackend::from_file(rules_path)));
  if (!f.tasks.empty()) {
    for (auto& def : load_task_defs(f.tasks)) e.gateway->register_task(std::move(def));
  }
  return e;
}

void write_log(const fs::path& path, const std::vector<ContextEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_ndjson(events);
}

int cmd_run(const std::string& script_path, const EngineFlags& flags, const std::string& connect,
            const std::string& log_path) {
  auto script = ScenarioScript::load(script_path);
  if (!flags.backend.empty()) script.backend = flags.backend;
  if (!flags.world.empty()) script.world = fs::path(flags.world);

  ScenarioReport report;
  std::vector<ContextEvent> full_log;
  if (!connect.empty()) {
    HttpTarget target(connect);
    report = run_scenario(script, target);
    full_log = report.events;
  } else {
    auto engine = make_engine(flags, script.catalog, script.world);
    GatewayTarget target(*engine.gateway);
    report = run_scenario(script, target);
    full_log = engine.gateway->events(target.session());
    std::cerr << "catalog: " << engine.catalog_path.string() << "\n";
  }
  if (!log_path.empty()) write_log(log_path, full_log);
  std::cout << report.render();
  return report.passed() ? kExitPass : kExitFail;
}

int cmd_replay(const std::string& log_path, std::size_t max_lines) {
  const auto events = parse_ndjson(read_file(log_path));
  std::cout << render_transcript(events, max_lines);
  return kExitPass;
}

int cmd_dump(const std::string& file, const std::string& connect) {
  if (file.empty() == connect.empty()) {
    std::cerr << "dump-catalog needs exactly one of --file or --connect\n";
    return kExitConfig;
  }
  const auto text = connect.empty() ? read_file(file) : fetch_catalog_document(connect);
  std::cout << Catalog::from_document(text).to_document();
  return kExitPass;
}

HttpService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const EngineFlags& flags, const std::string& host, int port) {
  auto engine = make_engine(flags);
  HttpService service(*engine.gateway);
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return kExitConfig;
  }
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << host << ":" << bound << "\n"
            << "catalog: " << engine.catalog_path.string() << std::endl;
  service.serve();
  g_service = nullptr;
  engine.catalog->flush();
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carebot: a care-home errand robot you talk to in text"};
  app.require_subcommand(1);

  EngineFlags run_flags;
  std::string script;
  std::string connect;
  std::string log_path;
  auto* run = app.add_subcommand("run", "Play a scenario script and check its expectations");
  run->add_option("script", script, "Scenario file")->required();
  run->add_option("--connect", connect, "Play against a running service at this URL");
  run->add_option("--log", log_path, "Write the session's event log (NDJSON) here");
  add_engine_flags(run, run_flags);

  std::string replay_log;
  std::size_t max_lines = kDefaultTranscriptLines;
  auto* replay = app.add_subcommand("replay", "Print the transcript of an exported event log");
  replay->add_option("log", replay_log, "NDJSON event log")->required();
  replay->add_option("--max-lines", max_lines, "Keep only the newest N lines")->capture_default_str();

  std::string dump_file;
  std::string dump_connect;
  auto* dump = app.add_subcommand("dump-catalog", "Print a catalog in canonical form");
  dump->add_option("--file", dump_file, "Catalog file");
  dump->add_option("--connect", dump_connect, "Running service URL");

  EngineFlags serve_flags;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  add_engine_flags(serve, serve_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*run) return cmd_run(script, run_flags, connect, log_path);
    if (*replay) return cmd_replay(replay_log, max_lines);
    if (*dump) return cmd_dump(dump_file, dump_connect);
    if (*serve) return cmd_serve(serve_flags, host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
