#pragma once

#include <string>
#include <string_view>

#include "circuloop/inventory/types.hpp"

// JSON mapping for inventory types. Field names are the wire names used by
// the event log, snapshots and the HTTP API; objects serialise with keys in
// lexicographic order, which is the canonical field order of the log.
namespace circuloop::inventory {

void to_json(Json& j, Category c);
void from_json(const Json& j, Category& c);
void to_json(Json& j, ConditionGrade g);
void from_json(const Json& j, ConditionGrade& g);
void to_json(Json& j, EventKind k);
void from_json(const Json& j, EventKind& k);

void to_json(Json& j, const StockTallies& t);
void from_json(const Json& j, StockTallies& t);
void to_json(Json& j, const Inflow& f);
void from_json(const Json& j, Inflow& f);
void to_json(Json& j, const ListFlow& f);
void from_json(const Json& j, ListFlow& f);

void to_json(Json& j, const ItemDraft& d);
void from_json(const Json& j, ItemDraft& d);
void to_json(Json& j, const ItemRecord& r);
void from_json(const Json& j, ItemRecord& r);
void to_json(Json& j, const MetadataPatch& p);
void from_json(const Json& j, MetadataPatch& p);
void to_json(Json& j, const MovementEvent& e);
void from_json(const Json& j, MovementEvent& e);
void to_json(Json& j, const StockSnapshot& s);

/// One log line (no trailing newline).
std::string encode_event(const MovementEvent& event);
MovementEvent decode_event(std::string_view line);

}  // namespace circuloop::inventory

namespace circuloop {
void to_json(nlohmann::json& j, Role r);
void from_json(const nlohmann::json& j, Role& r);
}  // namespace circuloop
