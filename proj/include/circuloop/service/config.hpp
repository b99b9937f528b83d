#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "circuloop/materials/catalogue.hpp"

namespace circuloop::service {

inline constexpr int kSchemaVersion = 1;

/// Flat key=value configuration. Keys:
///
///     data_dir, listen, permissions, factors, users, high_value_threshold,
///     token_ttl_minutes, snapshot_interval, schema_version,
///     scoring.term, scoring.constraint, scoring.recyclable_bonus,
///     scoring.certified_bonus, scoring.low_carbon_bonus,
///     scoring.low_carbon_threshold
///
/// Sources in increasing precedence: file, CIRCULOOP_<KEY> environment
/// variables (dots become underscores, upper case), explicit overrides.
struct ServiceConfig {
    std::filesystem::path data_dir = "data/run";
    std::string listen = "127.0.0.1:8080";
    std::optional<std::filesystem::path> permissions;  // default matrix when absent
    std::optional<std::filesystem::path> factors;      // empty table when absent
    std::optional<std::filesystem::path> users;
    int high_value_threshold = 3;
    std::int64_t token_ttl_minutes = 480;
    std::int64_t snapshot_interval = 1000;  // events between snapshot files; 0 disables
    int schema_version = kSchemaVersion;
    materials::ScoringWeights scoring;

    std::string host() const;
    int port() const;

    /// First violation, or nothing when the config is usable.
    std::optional<std::string> first_violation() const;
};

using Settings = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are InvalidConfig.
Settings parse_settings(std::string_view text);

/// CIRCULOOP_* variables mapped back to config keys.
Settings settings_from_environment(char** envp);

/// Merges sources (later wins) and converts. InvalidConfig on unknown keys or
/// malformed values; call `first_violation` for semantic checks.
ServiceConfig resolve_config(const std::optional<std::filesystem::path>& file, const Settings& environment,
                             const Settings& overrides);

ServiceConfig config_from_settings(const Settings& settings);

}  // namespace circuloop::service
