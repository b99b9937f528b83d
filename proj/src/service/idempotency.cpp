#include "circuloop/service/idempotency.hpp"

#include <nlohmann/json.hpp>

#include "circuloop/core/error.hpp"

namespace circuloop::service {

IdempotencyStore::IdempotencyStore(const std::filesystem::path& path)
    : file_(std::make_unique<AppendOnlyFile>(path)) {
    for (const auto& line : AppendOnlyFile::read_lines(path)) {
        try {
            auto j = nlohmann::json::parse(line);
            responses_[j.at("key").get<std::string>()] =
                StoredResponse{j.at("fingerprint").get<std::string>(), j.at("status").get<int>(),
                               j.at("content_type").get<std::string>(), j.at("body").get<std::string>()};
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::CorruptLog, std::string("idempotency store: ") + e.what());
        }
    }
}

std::optional<StoredResponse> IdempotencyStore::find(std::string_view scope_key) const {
    std::lock_guard lock(mutex_);
    auto it = responses_.find(scope_key);
    if (it == responses_.end()) return std::nullopt;
    return it->second;
}

void IdempotencyStore::put(const std::string& scope_key, StoredResponse response) {
    std::lock_guard lock(mutex_);
    if (file_) {
        nlohmann::json j{{"key", scope_key},
                         {"fingerprint", response.fingerprint},
                         {"status", response.status},
                         {"content_type", response.content_type},
                         {"body", response.body}};
        file_->append(j.dump());
    }
    responses_[scope_key] = std::move(response);
}

}  // namespace circuloop::service
