#include "carebot/setup.hpp"

#include <cstdlib>

#include "carebot/remote_backend.hpp"
#include "carebot/task_runtime.hpp"

#ifndef CAREBOT_DATA_DIR
#define CAREBOT_DATA_DIR "data"
#endif

namespace carebot {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("CAREBOT_DATA_DIR"); env && *env) return env;
  return CAREBOT_DATA_DIR;
}

Catalog builtin_seed_catalog() {
  Catalog catalog;
  IntentSpec bring{"bring_goods",
                   "Bring an item from the kitchen to the senior",
                   {SlotSpec::make("item", "The item to bring")},
                   Origin::seeded,
                   0};
  catalog.register_intent(std::move(bring), kBringGoodsTask,
                          [](std::string_view name) { return name == kBringGoodsTask; });
  return catalog;
}

std::unique_ptr<CatalogStore> open_catalog_store(const std::filesystem::path& path, const Catalog& seed) {
  if (!std::filesystem::exists(path)) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    seed.save(path);
  }
  return std::make_unique<CatalogStore>(Catalog::load(path), path);
}

void register_standard_backends(Gateway& gateway, std::shared_ptr<const ScriptedBackend> rules) {
  gateway.register_backend("scripted", [rules]() -> std::unique_ptr<CompletionBackend> {
    return std::make_unique<ScriptedBackend>(*rules);
  });
  gateway.register_backend("remote", []() -> std::unique_ptr<CompletionBackend> {
    auto config = RemoteConfig::from_env();
    if (!config) return nullptr;
    return std::make_unique<RemoteBackend>(*config);
  });
}

}  // namespace carebot
