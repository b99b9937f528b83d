#include "circuloop/service/http_api.hpp"

#include <httplib.h>

#include <charconv>
#include <functional>

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/service/json_io.hpp"
#include "circuloop/workflow/codec.hpp"

namespace circuloop::service {

namespace {

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";

    static Reply json(const Json& j, int status = 200) { return Reply{status, j.dump(), "application/json"}; }
};

Json error_body(ErrorCode code, const std::string& message) {
    return Json{{"error", {{"code", error_code_name(code)}, {"message", message}}}};
}

Json body_json(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::Validation, std::string("request body is not JSON: ") + e.what());
    }
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

std::int64_t int_param(const httplib::Request& req, const char* name, std::int64_t fallback) {
    auto v = param(req, name);
    if (!v) return fallback;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        fail(ErrorCode::Validation, std::string(name) + " must be an integer");
    }
    return out;
}

bool bool_param(const std::string& v, const char* name) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(ErrorCode::Validation, std::string(name) + " must be true or false");
}

double real_param(const std::string& v, const char* name) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    fail(ErrorCode::Validation, std::string(name) + " must be a number");
}

std::optional<std::string> bearer(const httplib::Request& req) {
    auto h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    return h.substr(prefix.size());
}

Json list_array(const std::vector<workflow::ProjectList>& lists) {
    Json out = Json::array();
    for (const auto& l : lists) out.push_back(workflow::export_list(l));
    return out;
}

Reply report_reply(const httplib::Request& req, const indicators::IndicatorReport& report) {
    if (param(req, "format").value_or("json") == "csv") return Reply{200, indicators::to_csv(report), "text/csv"};
    return Reply::json(indicators::to_json(report));
}

}  // namespace

void HttpApi::mount(httplib::Server& server) {
    using Handler = std::function<Reply(const httplib::Request&, const Session&)>;

    // Wraps a handler with authentication, idempotency and error mapping.
    auto route = [this](bool authenticated, bool mutation, Handler handler) {
        return [this, authenticated, mutation, handler](const httplib::Request& req, httplib::Response& res) {
            auto send = [&res](const Reply& r) {
                res.status = r.status;
                res.set_content(r.body, r.content_type);
            };
            auto send_error = [&](ErrorCode code, const std::string& message, std::optional<long long> version) {
                auto body = error_body(code, message);
                if (version) body["error"]["current_version"] = *version;
                send(Reply::json(body, http_status(code)));
            };

            Session session;
            if (authenticated) {
                try {
                    auto token = bearer(req);
                    if (!token) fail(ErrorCode::Unauthenticated, "missing bearer token");
                    session = auth_.authenticate(*token);
                } catch (const DomainError& e) {
                    send_error(e.code(), e.what(), std::nullopt);
                    return;
                }
            }

            std::unique_lock<std::mutex> serial;
            std::string scope_key;
            std::string fingerprint;
            if (mutation) {
                auto key = req.get_header_value("Idempotency-Key");
                if (key.empty()) {
                    send_error(ErrorCode::Validation, "Idempotency-Key header is required", std::nullopt);
                    return;
                }
                serial = std::unique_lock(idempotency_.request_mutex());
                scope_key = session.actor_id + "\n" + key;
                fingerprint = sha256_hex(req.method + " " + req.path + "\n" + req.body);
                if (auto stored = idempotency_.find(scope_key)) {
                    if (stored->fingerprint != fingerprint) {
                        send_error(ErrorCode::Validation, "Idempotency-Key was already used for a different request",
                                   std::nullopt);
                        return;
                    }
                    res.set_header("Idempotent-Replay", "true");
                    send(Reply{stored->status, stored->body, stored->content_type});
                    return;
                }
            }

            Reply reply;
            try {
                reply = handler(req, session);
            } catch (const StaleVersionError& e) {
                reply = Reply::json(Json{{"error",
                                          {{"code", error_code_name(e.code())},
                                           {"message", e.what()},
                                           {"current_version", e.current_version()}}}},
                                    409);
            } catch (const DomainError& e) {
                auto body = error_body(e.code(), e.what());
                if (e.code() == ErrorCode::IllegalTransition && !req.matches.empty() && req.matches.size() > 1 &&
                    req.path.rfind("/v1/lists/", 0) == 0) {
                    try {
                        body["error"]["current_version"] = platform_.list(req.matches[1].str()).version;
                    } catch (const DomainError&) {
                    }
                }
                reply = Reply::json(body, http_status(e.code()));
            } catch (const Json::exception& e) {
                reply = Reply::json(error_body(ErrorCode::Validation, e.what()), 400);
            } catch (const std::exception& e) {
                send(Reply::json(Json{{"error", {{"code", "INTERNAL"}, {"message", e.what()}}}}, 500));
                return;
            }
            if (mutation) idempotency_.put(scope_key, StoredResponse{fingerprint, reply.status, reply.content_type, reply.body});
            send(reply);
        };
    };
    auto actor = [](const Session& s) { return Actor{s.role, s.actor_id}; };

    server.Get("/v1/health", route(false, false, [this](const httplib::Request&, const Session&) {
                   return Reply::json(Json{{"status", "ok"},
                                           {"schema", kSchemaVersion},
                                           {"ledger_offset", platform_.ledger_offset()},
                                           {"journal_seq", platform_.journal_seq()}});
               }));

    server.Post("/v1/login", route(false, false, [this](const httplib::Request& req, const Session&) {
                    auto body = body_json(req);
                    auto session = auth_.login(body.value("actor_id", std::string{}), body.value("password", std::string{}));
                    return Reply::json(Json{{"token", session.token},
                                            {"actor_id", session.actor_id},
                                            {"role", std::string(to_string(session.role))},
                                            {"expires", session.expires.to_iso8601()}});
                }));

    server.Get("/v1/permissions", route(true, false, [this](const httplib::Request&, const Session& s) {
                   return Reply::json(Json{{"role", std::string(to_string(s.role))},
                                           {"matrix", platform_.options().matrix.to_text()}});
               }));

    // ---- items and ledger ----

    server.Get("/v1/items", route(true, false, [this](const httplib::Request& req, const Session&) {
                   inventory::ItemFilter filter;
                   filter.text = param(req, "text").value_or("");
                   if (auto c = param(req, "category")) filter.category = Json(*c).get<inventory::Category>();
                   if (auto s = param(req, "status")) {
                       auto status = inventory::parse_status(*s);
                       if (!status) fail(ErrorCode::Validation, "unknown status '" + *s + "'");
                       filter.status = *status;
                   }
                   if (auto g = param(req, "condition")) filter.condition = Json(*g).get<inventory::ConditionGrade>();
                   if (auto a = param(req, "available_only")) filter.available_only = bool_param(*a, "available_only");
                   inventory::Page page;
                   page.offset = static_cast<std::size_t>(std::max<std::int64_t>(0, int_param(req, "offset", 0)));
                   page.limit = static_cast<std::size_t>(std::max<std::int64_t>(0, int_param(req, "limit", 100)));
                   Json items = Json::array();
                   for (const auto& r : platform_.items(filter, page)) items.push_back(to_json(r));
                   return Reply::json(Json{{"items", std::move(items)}});
               }));

    server.Get(R"(/v1/items/([^/]+))", route(true, false, [this](const httplib::Request& req, const Session&) {
                   return Reply::json(to_json(platform_.item(req.matches[1].str())));
               }));

    server.Post("/v1/items", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto draft = body_json(req).get<inventory::ItemDraft>();
                    return Reply::json(to_json(platform_.register_item(draft, actor(s))), 201);
                }));

    server.Patch(R"(/v1/items/([^/]+))", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                     auto body = body_json(req);
                     std::optional<std::int64_t> version;
                     if (body.contains("version")) {
                         version = body.at("version").get<std::int64_t>();
                         body.erase("version");
                     }
                     auto patch = body.get<inventory::MetadataPatch>();
                     return Reply::json(to_json(platform_.update_metadata(req.matches[1].str(), patch, actor(s), version)));
                 }));

    server.Get("/v1/events", route(true, false, [this](const httplib::Request& req, const Session&) {
                   auto limit = static_cast<std::size_t>(std::max<std::int64_t>(0, int_param(req, "limit", 500)));
                   Json events = Json::array();
                   for (const auto& e : platform_.events(int_param(req, "after", 0), limit)) events.push_back(e);
                   return Reply::json(Json{{"events", std::move(events)}});
               }));

    server.Post("/v1/events", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto body = body_json(req);
                    std::vector<inventory::EventDraft> drafts;
                    if (body.contains("events")) {
                        for (const auto& e : body.at("events")) drafts.push_back(parse_event_draft(e, actor(s)));
                    } else {
                        drafts.push_back(parse_event_draft(body, actor(s)));
                    }
                    Json out = Json::array();
                    for (const auto& e : platform_.record_events(drafts)) out.push_back(e);
                    return Reply::json(Json{{"events", std::move(out)}}, 201);
                }));

    server.Post("/v1/audits", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto record = platform_.record_audit(parse_audit_csv(req.body), actor(s));
                    return Reply::json(to_json(record), 201);
                }));

    // ---- lists ----

    server.Get("/v1/lists", route(true, false, [this](const httplib::Request& req, const Session&) {
                   auto lists = platform_.lists();
                   if (auto state = param(req, "state")) {
                       auto st = workflow::parse_list_state(*state);
                       if (!st) fail(ErrorCode::Validation, "unknown state '" + *state + "'");
                       std::erase_if(lists, [&](const workflow::ProjectList& l) { return l.state != *st; });
                   }
                   return Reply::json(Json{{"lists", list_array(lists)}});
               }));

    server.Post("/v1/lists", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto list = platform_.create_list(parse_outbound_request(body_json(req)), actor(s));
                    return Reply::json(platform_.export_list(list.list_id), 201);
                }));

    server.Get(R"(/v1/lists/([^/]+))", route(true, false, [this](const httplib::Request& req, const Session&) {
                   return Reply::json(platform_.export_list(req.matches[1].str()));
               }));

    server.Post(R"(/v1/lists/([^/]+)/lines)", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto id = req.matches[1].str();
                    platform_.add_line(id, parse_line_request(body_json(req)), actor(s));
                    return Reply::json(platform_.export_list(id));
                }));

    server.Post(R"(/v1/lists/([^/]+)/substitutions)",
                route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto id = req.matches[1].str();
                    auto body = body_json(req);
                    platform_.substitute_line(id, body.at("purchase_label").get<std::string>(),
                                              body.at("stock_label").get<std::string>(), actor(s));
                    return Reply::json(platform_.export_list(id));
                }));

    server.Post(R"(/v1/lists/([^/]+)/transition)",
                route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto id = req.matches[1].str();
                    auto body = body_json(req);
                    auto target = body.at("to").get<workflow::ListState>();
                    platform_.transition(id, target, actor(s), parse_transition_options(body));
                    return Reply::json(platform_.export_list(id));
                }));

    server.Post(R"(/v1/lists/([^/]+)/dispositions)",
                route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto id = req.matches[1].str();
                    auto body = body_json(req);
                    auto record = [&](const Json& d) {
                        platform_.record_disposition(id, d.at("item_label").get<std::string>(),
                                                     d.at("disposition").get<workflow::Disposition>(),
                                                     d.at("quantity").get<std::int64_t>(), actor(s));
                    };
                    if (body.contains("dispositions")) {
                        for (const auto& d : body.at("dispositions")) record(d);
                    } else {
                        record(body);
                    }
                    return Reply::json(platform_.export_list(id));
                }));

    server.Post(R"(/v1/lists/([^/]+)/reconcile)",
                route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto id = req.matches[1].str();
                    auto body = body_json(req);
                    std::optional<std::int64_t> version;
                    if (body.contains("version") && !body.at("version").is_null()) version = body.at("version").get<std::int64_t>();
                    platform_.reconcile(id, actor(s), version);
                    return Reply::json(platform_.export_list(id));
                }));

    server.Get(R"(/v1/lists/([^/]+)/report)", route(true, false, [this](const httplib::Request& req, const Session&) {
                   return report_reply(req, platform_.project_report(req.matches[1].str()));
               }));

    server.Post(R"(/v1/lists/([^/]+)/materials)",
                route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    auto id = req.matches[1].str();
                    auto body = body_json(req);
                    platform_.link_material(id, body.at("material_id").get<std::string>(),
                                            body.value("note", std::string{}), actor(s));
                    return Reply::json(platform_.export_list(id), 201);
                }));

    server.Get("/v1/reports/period", route(true, false, [this](const httplib::Request& req, const Session&) {
                   auto from = param(req, "from");
                   auto to = param(req, "to");
                   if (!from || !to) fail(ErrorCode::Validation, "from and to are required");
                   return report_reply(req, platform_.period_report(parse_period_bound(*from, false),
                                                                    parse_period_bound(*to, true)));
               }));

    server.Get("/v1/notifications", route(true, false, [this](const httplib::Request&, const Session& s) {
                   Json out = Json::array();
                   for (const auto& n : platform_.notifications(s.role)) out.push_back(n);
                   return Reply::json(Json{{"notifications", std::move(out)}});
               }));

    server.Post(R"(/v1/notifications/([^/]+)/ack)",
                route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    platform_.acknowledge(req.matches[1].str(), actor(s));
                    return Reply::json(Json{{"acknowledged", req.matches[1].str()}});
                }));

    // ---- materials ----

    server.Get("/v1/materials", route(true, false, [this](const httplib::Request& req, const Session&) {
                   Json out = Json::array();
                   if (req.params.empty()) {
                       for (const auto& m : platform_.all_materials()) out.push_back(m);
                       return Reply::json(Json{{"materials", std::move(out)}});
                   }
                   materials::MaterialQuery q;
                   for (const auto& [key, value] : req.params) {
                       if (key == "q") {
                           Json j{{"q", value}};
                           auto parsed = j.get<materials::MaterialQuery>();
                           q.terms.insert(q.terms.end(), parsed.terms.begin(), parsed.terms.end());
                       } else if (key == "category") {
                           q.category = value;
                       } else if (key == "recyclable") {
                           q.recyclable = bool_param(value, "recyclable");
                       } else if (key == "certified") {
                           q.certified = bool_param(value, "certified");
                       } else if (key == "max_carbon_per_kg") {
                           q.max_carbon_per_kg = real_param(value, "max_carbon_per_kg");
                       } else if (key == "min_reusable_cycles") {
                           q.min_reusable_cycles = static_cast<std::int64_t>(real_param(value, "min_reusable_cycles"));
                       } else if (key == "fire_rating") {
                           q.fire_rating = value;
                       } else {
                           fail(ErrorCode::Validation, "unknown query parameter '" + key + "'");
                       }
                   }
                   for (const auto& scored : platform_.search_materials(q)) out.push_back(to_json(scored));
                   return Reply::json(Json{{"materials", std::move(out)}});
               }));

    server.Get(R"(/v1/materials/([^/]+))", route(true, false, [this](const httplib::Request& req, const Session&) {
                   return Reply::json(Json(platform_.material(req.matches[1].str())));
               }));

    server.Post("/v1/materials/import", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                    return Reply::json(Json{{"count", platform_.import_materials(req.body, actor(s))}});
                }));

    server.Delete(R"(/v1/materials/([^/]+))", route(true, true, [this, actor](const httplib::Request& req, const Session& s) {
                      platform_.delete_material(req.matches[1].str(), actor(s));
                      return Reply::json(Json{{"deleted", req.matches[1].str()}});
                  }));
}

}  // namespace circuloop::service
