#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "circuloop/core/append_file.hpp"

namespace circuloop::service {

struct StoredResponse {
    std::string fingerprint;  // sha256 of method, path and body
    int status = 200;
    std::string content_type;
    std::string body;
};

/// Responses to mutating requests keyed by (actor, Idempotency-Key),
/// optionally persisted as JSON lines.
class IdempotencyStore {
public:
    IdempotencyStore() = default;
    explicit IdempotencyStore(const std::filesystem::path& path);

    std::optional<StoredResponse> find(std::string_view scope_key) const;
    void put(const std::string& scope_key, StoredResponse response);

    /// Held for the whole lookup-execute-store sequence of one request.
    std::mutex& request_mutex() { return request_mutex_; }

private:
    mutable std::mutex mutex_;
    std::mutex request_mutex_;
    std::map<std::string, StoredResponse, std::less<>> responses_;
    std::unique_ptr<AppendOnlyFile> file_;
};

}  // namespace circuloop::service
