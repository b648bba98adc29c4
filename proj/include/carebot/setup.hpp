#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "carebot/gateway.hpp"
#include "carebot/intent_catalog.hpp"
#include "carebot/scripted_backend.hpp"

namespace carebot {

/// Directory holding the shipped world, seed catalog and rule table.
std::filesystem::path default_data_dir();

/// The built-in starting catalog: a generic bring_goods(item) intent.
Catalog builtin_seed_catalog();

/// Loads `path`, or creates it from `seed` when it does not exist yet.
/// The returned store persists every flushed mutation to `path`.
std::unique_ptr<CatalogStore> open_catalog_store(const std::filesystem::path& path, const Catalog& seed);

/// Registers "scripted" (sharing `rules`) and "remote" (from LLM_* variables;
/// unavailable when they are unset).
void register_standard_backends(Gateway& gateway, std::shared_ptr<const ScriptedBackend> rules);

}  // namespace carebot
