#include "circuloop/service/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"

namespace circuloop::service {

namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out += digits[data[i] >> 4];
        out += digits[data[i] & 0xf];
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    return to_hex(digest, sizeof digest);
}

std::string random_hex(std::size_t bytes) {
    std::string buffer(bytes, '\0');
    if (RAND_bytes(reinterpret_cast<unsigned char*>(buffer.data()), static_cast<int>(bytes)) != 1) {
        throw std::runtime_error("RAND_bytes failed");
    }
    return to_hex(reinterpret_cast<const unsigned char*>(buffer.data()), bytes);
}

std::map<std::string, UserRecord, std::less<>> parse_users(std::string_view text) {
    auto rows = csv::read_all(text);
    if (rows.empty()) fail(ErrorCode::InvalidConfig, "users file is empty");
    csv::Header header(rows.front(), {"actor_id", "role", "salt", "password_sha256"});
    std::map<std::string, UserRecord, std::less<>> users;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        UserRecord u;
        u.actor_id = header.get(row, "actor_id");
        auto role = parse_role(header.get(row, "role"));
        if (u.actor_id.empty() || !role) {
            fail(ErrorCode::InvalidConfig, "users line " + std::to_string(row.line) + ": bad actor or role");
        }
        u.role = *role;
        u.salt = header.get(row, "salt");
        u.password_sha256 = header.get(row, "password_sha256");
        if (!users.emplace(u.actor_id, u).second) {
            fail(ErrorCode::InvalidConfig, "users line " + std::to_string(row.line) + ": duplicate " + u.actor_id);
        }
    }
    return users;
}

std::string user_line(std::string_view actor_id, Role role, std::string_view password) {
    auto salt = random_hex(8);
    return csv::escape(actor_id) + "," + std::string(to_string(role)) + "," + salt + "," +
           sha256_hex(salt + std::string(password));
}

Session Authenticator::login(std::string_view actor_id, std::string_view password) {
    auto it = users_.find(actor_id);
    bool ok = false;
    if (it != users_.end()) {
        auto digest = sha256_hex(it->second.salt + std::string(password));
        ok = digest.size() == it->second.password_sha256.size() &&
             CRYPTO_memcmp(digest.data(), it->second.password_sha256.data(), digest.size()) == 0;
    }
    if (!ok) fail(ErrorCode::Unauthenticated, "invalid credentials");
    Session s{random_hex(24), it->second.actor_id, it->second.role, Timestamp{clock_().millis + ttl_ms_}};
    std::lock_guard lock(mutex_);
    sessions_[s.token] = s;
    return s;
}

Session Authenticator::authenticate(std::string_view token) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) fail(ErrorCode::Unauthenticated, "unknown token");
    if (clock_() >= it->second.expires) {
        sessions_.erase(it);
        fail(ErrorCode::Unauthenticated, "token expired");
    }
    return it->second;
}

void Authenticator::logout(std::string_view token) {
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(token); it != sessions_.end()) sessions_.erase(it);
}

}  // namespace circuloop::service
