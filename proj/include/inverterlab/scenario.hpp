#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "inverterlab/sim.hpp"

namespace inverterlab::scenario {

using Json = nlohmann::json;

/// Every recognised key with its default value.
const Json& default_document();

/// Overlay a user document on the defaults. Throws ConfigError on an unknown
/// key or a value of the wrong type.
Json merge_with_defaults(const Json& user);

/// Set a numeric entry addressed by a dotted key ("controller.beta",
/// "load.segments.1.resistance_ohm"). Throws ConfigError if the key does not
/// name an existing numeric entry.
void set_number(Json& doc, std::string_view dotted_key, double value);

/// Set a string entry (used for --controller and --model overrides).
void set_string(Json& doc, std::string_view dotted_key, std::string_view value);

/// Build and validate a configuration. Relative rule-file paths resolve
/// against `base_dir`.
sim::SimConfig to_config(const Json& merged, const std::filesystem::path& base_dir = {});

/// Read a scenario file and merge it with the defaults. An empty path yields
/// the defaults.
Json read_document(const std::filesystem::path& path);

sim::SimConfig load(const std::filesystem::path& path);

Json summary_json(const sim::ScenarioSummary& summary);

}  // namespace inverterlab::scenario
