#include "circuloop/service/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "circuloop/core/error.hpp"

namespace circuloop::service {

namespace {

constexpr std::array<std::string_view, 15> kKeys = {
    "data_dir",           "listen",
    "permissions",        "factors",
    "users",              "high_value_threshold",
    "token_ttl_minutes",  "snapshot_interval",
    "schema_version",     "scoring.term",
    "scoring.constraint", "scoring.recyclable_bonus",
    "scoring.certified_bonus", "scoring.low_carbon_bonus",
    "scoring.low_carbon_threshold",
};

bool known_key(std::string_view key) {
    return std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end();
}

std::string env_name(std::string_view key) {
    std::string out = "CIRCULOOP_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::int64_t to_int(const std::string& key, const std::string& value) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(ErrorCode::InvalidConfig, key + " is not an integer: '" + value + "'");
    }
    return v;
}

double to_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::logic_error&) {
    }
    fail(ErrorCode::InvalidConfig, key + " is not a number: '" + value + "'");
}

}  // namespace

std::string ServiceConfig::host() const {
    auto colon = listen.rfind(':');
    return colon == std::string::npos ? listen : listen.substr(0, colon);
}

int ServiceConfig::port() const {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) return -1;
    int p = -1;
    auto tail = std::string_view(listen).substr(colon + 1);
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
    return ec == std::errc{} && ptr == tail.data() + tail.size() ? p : -1;
}

std::optional<std::string> ServiceConfig::first_violation() const {
    if (schema_version != kSchemaVersion) {
        return "schema_version " + std::to_string(schema_version) + " is not supported (expected " +
               std::to_string(kSchemaVersion) + ")";
    }
    if (data_dir.empty()) return "data_dir is empty";
    if (host().empty() || port() < 0 || port() > 65535) return "listen must be host:port, got '" + listen + "'";
    for (const auto& [key, path] : {std::pair{"permissions", permissions}, std::pair{"factors", factors},
                                    std::pair{"users", users}}) {
        if (path && !std::filesystem::is_regular_file(*path)) {
            return std::string(key) + " file not found: " + path->string();
        }
    }
    if (high_value_threshold < 0) return "high_value_threshold must not be negative";
    if (token_ttl_minutes <= 0) return "token_ttl_minutes must be positive";
    if (snapshot_interval < 0) return "snapshot_interval must not be negative";
    for (auto [key, v] : {std::pair{"scoring.term", scoring.term}, std::pair{"scoring.constraint", scoring.constraint},
                          std::pair{"scoring.recyclable_bonus", scoring.recyclable_bonus},
                          std::pair{"scoring.certified_bonus", scoring.certified_bonus},
                          std::pair{"scoring.low_carbon_bonus", scoring.low_carbon_bonus},
                          std::pair{"scoring.low_carbon_threshold", scoring.low_carbon_threshold}}) {
        if (!(v >= 0.0)) return std::string(key) + " must not be negative";
    }
    return std::nullopt;
}

Settings parse_settings(std::string_view text) {
    Settings out;
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto body = trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::InvalidConfig, "line " + std::to_string(n) + ": expected key = value");
        }
        auto key = trim(std::string_view(body).substr(0, eq));
        if (!known_key(key)) fail(ErrorCode::InvalidConfig, "line " + std::to_string(n) + ": unknown key '" + key + "'");
        out[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return out;
}

Settings settings_from_environment(char** envp) {
    Settings out;
    if (!envp) return out;
    for (char** e = envp; *e; ++e) {
        std::string_view entry(*e);
        auto eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        auto name = entry.substr(0, eq);
        for (auto key : kKeys) {
            if (env_name(key) == name) out[std::string(key)] = std::string(entry.substr(eq + 1));
        }
    }
    return out;
}

ServiceConfig config_from_settings(const Settings& settings) {
    ServiceConfig c;
    for (const auto& [key, value] : settings) {
        if (key == "data_dir") c.data_dir = value;
        else if (key == "listen") c.listen = value;
        else if (key == "permissions") c.permissions = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
        else if (key == "factors") c.factors = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
        else if (key == "users") c.users = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
        else if (key == "high_value_threshold") c.high_value_threshold = static_cast<int>(to_int(key, value));
        else if (key == "token_ttl_minutes") c.token_ttl_minutes = to_int(key, value);
        else if (key == "snapshot_interval") c.snapshot_interval = to_int(key, value);
        else if (key == "schema_version") c.schema_version = static_cast<int>(to_int(key, value));
        else if (key == "scoring.term") c.scoring.term = to_real(key, value);
        else if (key == "scoring.constraint") c.scoring.constraint = to_real(key, value);
        else if (key == "scoring.recyclable_bonus") c.scoring.recyclable_bonus = to_real(key, value);
        else if (key == "scoring.certified_bonus") c.scoring.certified_bonus = to_real(key, value);
        else if (key == "scoring.low_carbon_bonus") c.scoring.low_carbon_bonus = to_real(key, value);
        else if (key == "scoring.low_carbon_threshold") c.scoring.low_carbon_threshold = to_real(key, value);
        else fail(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    }
    return c;
}

ServiceConfig resolve_config(const std::optional<std::filesystem::path>& file, const Settings& environment,
                             const Settings& overrides) {
    Settings merged;
    if (file) {
        std::ifstream in(*file);
        if (!in) fail(ErrorCode::InvalidConfig, "config file not found: " + file->string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        merged = parse_settings(buffer.str());
    }
    for (const auto& [k, v] : environment) merged[k] = v;
    for (const auto& [k, v] : overrides) {
        if (!known_key(k)) fail(ErrorCode::InvalidConfig, "unknown key '" + k + "'");
        merged[k] = v;
    }
    return config_from_settings(merged);
}

}  // namespace circuloop::service
