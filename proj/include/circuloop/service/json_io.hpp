#pragma once

#include <nlohmann/json.hpp>

#include "circuloop/core/role.hpp"
#include "circuloop/indicators/metrics.hpp"
#include "circuloop/inventory/types.hpp"
#include "circuloop/service/platform.hpp"
#include "circuloop/workflow/types.hpp"

namespace circuloop::service {

/// Request documents shared by the HTTP API, the CLI and the Python module.
/// Malformed documents raise DomainError(Validation).

workflow::LineRequest parse_line_request(const Json& j);
workflow::OutboundRequest parse_outbound_request(const Json& j);
inventory::EventDraft parse_event_draft(const Json& j, const Actor& actor);
workflow::TransitionOptions parse_transition_options(const Json& j);

/// CSV `label,counted`.
std::vector<indicators::AuditLine> parse_audit_csv(std::string_view text);

/// An ISO-8601 instant; a bare date is the start of that day, or its last
/// millisecond when `end_of_day`.
Timestamp parse_period_bound(std::string_view text, bool end_of_day);

Json to_json(const inventory::ItemRecord& record);
Json to_json(const materials::ScoredMaterial& scored);

}  // namespace circuloop::service
