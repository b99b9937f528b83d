#include "circuloop/service/json_io.hpp"

#include <charconv>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/workflow/codec.hpp"

namespace circuloop::service {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        fail(ErrorCode::Validation, std::string("invalid ") + what + ": " + e.what());
    }
}

void require_object(const Json& j, const char* what) {
    if (!j.is_object()) fail(ErrorCode::Validation, std::string(what) + " must be a JSON object");
}

}  // namespace

workflow::LineRequest parse_line_request(const Json& j) {
    require_object(j, "line");
    return guarded("line", [&] {
        workflow::LineRequest line;
        line.item_label = j.at("item_label").get<std::string>();
        line.quantity = j.at("quantity").get<std::int64_t>();
        if (j.contains("origin")) line.origin = j.at("origin").get<workflow::LineOrigin>();
        return line;
    });
}

workflow::OutboundRequest parse_outbound_request(const Json& j) {
    require_object(j, "list");
    return guarded("list", [&] {
        workflow::OutboundRequest r;
        if (j.contains("list_id") && !j.at("list_id").is_null()) r.list_id = j.at("list_id").get<std::string>();
        r.project_name = j.value("project_name", std::string{});
        r.client = j.value("client", std::string{});
        for (const auto& line : j.value("lines", Json::array())) r.lines.push_back(parse_line_request(line));
        return r;
    });
}

inventory::EventDraft parse_event_draft(const Json& j, const Actor& actor) {
    require_object(j, "event");
    return guarded("event", [&] {
        inventory::EventDraft d;
        d.kind = j.at("kind").get<inventory::EventKind>();
        d.item_label = j.at("item_label").get<std::string>();
        d.quantity = j.value("quantity", std::int64_t{0});
        d.actor = actor;
        if (j.contains("list_ref") && !j.at("list_ref").is_null()) d.list_ref = j.at("list_ref").get<std::string>();
        if (j.contains("note") && !j.at("note").is_null()) d.note = j.at("note").get<std::string>();
        if (j.contains("payload")) d.payload = j.at("payload");
        if (j.contains("expected_version") && !j.at("expected_version").is_null()) {
            d.expected_version = j.at("expected_version").get<std::int64_t>();
        }
        if (j.contains("client_time") && !j.at("client_time").is_null()) {
            d.client_time = Timestamp::parse_iso8601(j.at("client_time").get<std::string>());
        }
        return d;
    });
}

workflow::TransitionOptions parse_transition_options(const Json& j) {
    return guarded("transition", [&] {
        workflow::TransitionOptions o;
        if (!j.is_object()) return o;
        if (j.contains("dispatch_quantities")) {
            o.dispatch_quantities = j.at("dispatch_quantities").get<std::map<std::string, std::int64_t>>();
        }
        if (j.contains("version") && !j.at("version").is_null()) o.expected_version = j.at("version").get<std::int64_t>();
        return o;
    });
}

std::vector<indicators::AuditLine> parse_audit_csv(std::string_view text) {
    auto rows = csv::read_all(text);
    if (rows.empty()) fail(ErrorCode::ParseError, "line 1: missing header");
    csv::Header header(rows.front(), {"label", "counted"});
    std::vector<indicators::AuditLine> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        indicators::AuditLine line;
        line.label = header.get(rows[i], "label");
        const auto& counted = header.get(rows[i], "counted");
        auto [ptr, ec] = std::from_chars(counted.data(), counted.data() + counted.size(), line.counted);
        if (counted.empty() || ec != std::errc{} || ptr != counted.data() + counted.size()) {
            fail(ErrorCode::ParseError,
                 "line " + std::to_string(rows[i].line) + ": counted is not an integer: '" + counted + "'");
        }
        out.push_back(std::move(line));
    }
    return out;
}

Timestamp parse_period_bound(std::string_view text, bool end_of_day) {
    auto t = Timestamp::parse_iso8601(text);
    if (end_of_day && text.size() == 10) t.millis += 86'400'000 - 1;
    return t;
}

Json to_json(const inventory::ItemRecord& record) {
    Json j = record;
    return j;
}

Json to_json(const materials::ScoredMaterial& scored) {
    Json j = scored.material;
    j["score"] = scored.score;
    j["matched_terms"] = scored.matched_terms;
    return j;
}

}  // namespace circuloop::service
