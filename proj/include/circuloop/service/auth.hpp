#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "circuloop/core/role.hpp"
#include "circuloop/core/time.hpp"

namespace circuloop::service {

struct Session {
    std::string token;
    std::string actor_id;
    Role role = Role::ProjectLead;
    Timestamp expires;
};

struct UserRecord {
    std::string actor_id;
    Role role = Role::ProjectLead;
    std::string salt;
    std::string password_sha256;  // hex of sha256(salt + password)
};

std::string sha256_hex(std::string_view data);
std::string random_hex(std::size_t bytes);

/// Users file: CSV `actor_id,role,salt,password_sha256`, one role per user.
std::map<std::string, UserRecord, std::less<>> parse_users(std::string_view text);
std::string user_line(std::string_view actor_id, Role role, std::string_view password);

/// Token sessions. Thread-safe.
class Authenticator {
public:
    Authenticator(std::map<std::string, UserRecord, std::less<>> users, std::int64_t ttl_minutes, Clock clock)
        : users_(std::move(users)), ttl_ms_(ttl_minutes * 60'000), clock_(std::move(clock)) {}

    /// Unauthenticated on unknown user or wrong password.
    Session login(std::string_view actor_id, std::string_view password);

    /// Unauthenticated on unknown or expired tokens.
    Session authenticate(std::string_view token);

    void logout(std::string_view token);

private:
    std::map<std::string, UserRecord, std::less<>> users_;
    std::int64_t ttl_ms_;
    Clock clock_;
    std::mutex mutex_;
    std::map<std::string, Session, std::less<>> sessions_;
};

}  // namespace circuloop::service
