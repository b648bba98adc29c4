#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "carebot/gateway.hpp"
#include "carebot/intent_catalog.hpp"
#include "carebot/scripted_backend.hpp"
#include "carebot/setup.hpp"
#include "carebot/world_sim.hpp"

namespace carebot::testing {

inline std::filesystem::path data_dir() { return CAREBOT_TEST_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return CAREBOT_TEST_FIXTURE_DIR; }
inline std::filesystem::path scenario_dir() { return CAREBOT_TEST_SCENARIO_DIR; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// A directory that disappears with the object.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("carebot-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::shared_ptr<const ScriptedBackend> shipped_rules() {
  static const auto rules =
      std::make_shared<const ScriptedBackend>(ScriptedBackend::from_file(data_dir() / "scripted_rules.json"));
  return rules;
}

inline WorldConfig shipped_world() { return load_world_config(data_dir() / "carehome.json"); }

inline bool always_task(std::string_view) { return true; }

/// Catalog store plus gateway with the shipped rules, world and seed.
struct Engine {
  explicit Engine(Catalog seed = builtin_seed_catalog(),
                  std::optional<std::filesystem::path> persist = std::nullopt,
                  WorldConfig world = shipped_world())
      : store(std::move(seed), std::move(persist)), gateway(store, std::move(world)) {
    register_standard_backends(gateway, shipped_rules());
  }

  CatalogStore store;
  Gateway gateway;
};

}  // namespace carebot::testing
