#pragma once

#include <string>

#include "circuloop/service/auth.hpp"
#include "circuloop/service/idempotency.hpp"
#include "circuloop/service/platform.hpp"

namespace httplib {
class Server;
}

namespace circuloop::service {

/// The /v1 JSON API. Everything except /v1/health and /v1/login needs a
/// bearer token; mutations need an Idempotency-Key header and replay the
/// stored response when the key is reused.
///
/// Errors are `{"error": {"code", "message", "current_version"?}}` with the
/// status from `http_status(code)`.
class HttpApi {
public:
    HttpApi(Platform& platform, Authenticator& auth, IdempotencyStore& idempotency)
        : platform_(platform), auth_(auth), idempotency_(idempotency) {}

    void mount(httplib::Server& server);

private:
    Platform& platform_;
    Authenticator& auth_;
    IdempotencyStore& idempotency_;
};

}  // namespace circuloop::service
