#include "circuloop/inventory/codec.hpp"

#include "circuloop/core/error.hpp"

namespace circuloop {

void to_json(nlohmann::json& j, Role r) { j = std::string(to_string(r)); }

void from_json(const nlohmann::json& j, Role& r) {
    auto parsed = parse_role(j.get<std::string>());
    if (!parsed) {
        fail(ErrorCode::Validation, "unknown role '" + j.get<std::string>() + "'");
    }
    r = *parsed;
}

}  // namespace circuloop

namespace circuloop::inventory {

namespace {

template <typename Enum, typename Parser>
Enum enum_from(const Json& j, Parser parse, const char* what) {
    if (!j.is_string()) {
        fail(ErrorCode::Validation, std::string(what) + " must be a string");
    }
    auto v = parse(j.get<std::string>());
    if (!v) {
        fail(ErrorCode::Validation, "unknown " + std::string(what) + " '" + j.get<std::string>() + "'");
    }
    return *v;
}

std::int64_t count_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return 0;
    if (!it->is_number_integer()) {
        fail(ErrorCode::Validation, std::string(key) + " must be an integer");
    }
    return it->get<std::int64_t>();
}

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

std::optional<Date> optional_date(const Json& j, const char* key) {
    auto s = optional_field<std::string>(j, key);
    if (!s || s->empty()) return std::nullopt;
    return Date::parse(*s);
}

}  // namespace

void to_json(Json& j, Category c) { j = std::string(to_string(c)); }
void from_json(const Json& j, Category& c) { c = enum_from<Category>(j, parse_category, "category"); }
void to_json(Json& j, ConditionGrade g) { j = std::string(to_string(g)); }
void from_json(const Json& j, ConditionGrade& g) { g = enum_from<ConditionGrade>(j, parse_condition, "condition"); }
void to_json(Json& j, EventKind k) { j = std::string(to_string(k)); }
void from_json(const Json& j, EventKind& k) { k = enum_from<EventKind>(j, parse_event_kind, "kind"); }

void to_json(Json& j, const StockTallies& t) {
    j = Json{{"on_hand", t.on_hand},
             {"reserved", t.reserved},
             {"dispatched", t.dispatched},
             {"on_site", t.on_site},
             {"temporarily_stored", t.temporarily_stored},
             {"consumed_or_damaged", t.consumed_or_damaged},
             {"recycled", t.recycled},
             {"retired", t.retired}};
}

void from_json(const Json& j, StockTallies& t) {
    t.on_hand = count_field(j, "on_hand");
    t.reserved = count_field(j, "reserved");
    t.dispatched = count_field(j, "dispatched");
    t.on_site = count_field(j, "on_site");
    t.temporarily_stored = count_field(j, "temporarily_stored");
    t.consumed_or_damaged = count_field(j, "consumed_or_damaged");
    t.recycled = count_field(j, "recycled");
    t.retired = count_field(j, "retired");
}

void to_json(Json& j, const Inflow& f) {
    j = Json{{"registered", f.registered}, {"adjusted_in", f.adjusted_in}, {"adjusted_out", f.adjusted_out}};
}

void from_json(const Json& j, Inflow& f) {
    f.registered = count_field(j, "registered");
    f.adjusted_in = count_field(j, "adjusted_in");
    f.adjusted_out = count_field(j, "adjusted_out");
}

void to_json(Json& j, const ListFlow& f) {
    j = Json{{"reserved", f.reserved}, {"picked", f.picked},     {"packed", f.packed},
             {"in_transit", f.in_transit}, {"on_site", f.on_site}, {"returned", f.returned},
             {"consumed", f.consumed},  {"temp_stored", f.temp_stored}};
}

void from_json(const Json& j, ListFlow& f) {
    f.reserved = count_field(j, "reserved");
    f.picked = count_field(j, "picked");
    f.packed = count_field(j, "packed");
    f.in_transit = count_field(j, "in_transit");
    f.on_site = count_field(j, "on_site");
    f.returned = count_field(j, "returned");
    f.consumed = count_field(j, "consumed");
    f.temp_stored = count_field(j, "temp_stored");
}

void to_json(Json& j, const ItemDraft& d) {
    j = Json{{"label", d.label},
             {"name", d.name},
             {"category", d.category},
             {"material", d.material},
             {"quantity", d.quantity},
             {"condition", d.condition},
             {"remaining_lifespan", d.remaining_lifespan},
             {"embodied_carbon_per_unit", d.embodied_carbon_per_unit},
             {"location", d.location},
             {"value_class", d.value_class}};
    if (d.expiry_date) j["expiry_date"] = d.expiry_date->to_string();
}

void from_json(const Json& j, ItemDraft& d) {
    if (!j.is_object()) fail(ErrorCode::Validation, "item must be a JSON object");
    try {
        d.label = j.at("label").get<std::string>();
        d.name = j.value("name", std::string{});
        d.category = j.at("category").get<Category>();
        d.material = j.value("material", std::string{});
        d.quantity = count_field(j, "quantity");
        d.condition = j.contains("condition") ? j.at("condition").get<ConditionGrade>() : ConditionGrade::A;
        d.remaining_lifespan = j.contains("remaining_lifespan") ? count_field(j, "remaining_lifespan") : 1;
        d.expiry_date = optional_date(j, "expiry_date");
        d.embodied_carbon_per_unit = j.value("embodied_carbon_per_unit", 0.0);
        d.location = j.value("location", std::string{});
        d.value_class = j.value("value_class", 0);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Validation, std::string("invalid item: ") + e.what());
    }
}

void to_json(Json& j, const ItemRecord& r) {
    j = Json{{"label", r.label},
             {"name", r.name},
             {"category", r.category},
             {"material", r.material},
             {"quantity_on_hand", r.quantity_on_hand()},
             {"quantity_reserved", r.quantity_reserved()},
             {"available", r.available()},
             {"condition", r.condition},
             {"remaining_lifespan", r.remaining_lifespan},
             {"embodied_carbon_per_unit", r.embodied_carbon_per_unit},
             {"lot_carbon", r.lot_carbon()},
             {"location", r.location},
             {"value_class", r.value_class},
             {"status", std::string(to_string(r.status()))},
             {"retired", r.retired},
             {"version", r.version},
             {"tallies", r.stock},
             {"inflow", r.inflow}};
    if (r.expiry_date) j["expiry_date"] = r.expiry_date->to_string();
}

void from_json(const Json& j, ItemRecord& r) {
    try {
        r.label = j.at("label").get<std::string>();
        r.name = j.value("name", std::string{});
        r.category = j.at("category").get<Category>();
        r.material = j.value("material", std::string{});
        r.condition = j.at("condition").get<ConditionGrade>();
        r.remaining_lifespan = count_field(j, "remaining_lifespan");
        r.expiry_date = optional_date(j, "expiry_date");
        r.embodied_carbon_per_unit = j.value("embodied_carbon_per_unit", 0.0);
        r.location = j.value("location", std::string{});
        r.value_class = j.value("value_class", 0);
        r.stock = j.at("tallies").get<StockTallies>();
        r.inflow = j.at("inflow").get<Inflow>();
        r.retired = j.value("retired", false);
        r.version = count_field(j, "version");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Validation, std::string("invalid item record: ") + e.what());
    }
}

void to_json(Json& j, const MetadataPatch& p) {
    j = Json::object();
    if (p.condition) j["condition"] = *p.condition;
    if (p.remaining_lifespan) j["remaining_lifespan"] = *p.remaining_lifespan;
    if (p.location) j["location"] = *p.location;
    if (p.expiry_date) j["expiry_date"] = p.expiry_date->to_string();
    if (p.embodied_carbon_per_unit) j["embodied_carbon_per_unit"] = *p.embodied_carbon_per_unit;
}

void from_json(const Json& j, MetadataPatch& p) {
    if (!j.is_object()) fail(ErrorCode::Validation, "patch must be a JSON object");
    static const char* kKnown[] = {"condition", "remaining_lifespan", "location", "expiry_date",
                                   "embodied_carbon_per_unit"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (auto k : kKnown) known = known || it.key() == k;
        if (!known) fail(ErrorCode::Validation, "field '" + it.key() + "' cannot be patched");
    }
    try {
        if (j.contains("condition")) p.condition = j.at("condition").get<ConditionGrade>();
        if (j.contains("remaining_lifespan")) p.remaining_lifespan = count_field(j, "remaining_lifespan");
        if (j.contains("location")) p.location = j.at("location").get<std::string>();
        if (j.contains("expiry_date")) p.expiry_date = optional_date(j, "expiry_date");
        if (j.contains("embodied_carbon_per_unit"))
            p.embodied_carbon_per_unit = j.at("embodied_carbon_per_unit").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Validation, std::string("invalid patch: ") + e.what());
    }
}

void to_json(Json& j, const MovementEvent& e) {
    j = Json{{"event_id", e.event_id},
             {"offset", e.offset},
             {"sequence", e.sequence},
             {"timestamp", e.timestamp.to_iso8601()},
             {"actor", e.actor},
             {"actor_id", e.actor_id},
             {"item_label", e.item_label},
             {"kind", e.kind},
             {"quantity", e.quantity}};
    if (e.list_ref) j["list_ref"] = *e.list_ref;
    if (e.note) j["note"] = *e.note;
    if (!e.payload.is_null()) j["payload"] = e.payload;
    if (e.cause) j["cause"] = *e.cause;
    if (e.client_time) j["client_time"] = e.client_time->to_iso8601();
}

void from_json(const Json& j, MovementEvent& e) {
    e.event_id = j.at("event_id").get<std::string>();
    e.offset = j.at("offset").get<std::int64_t>();
    e.sequence = j.at("sequence").get<std::int64_t>();
    e.timestamp = Timestamp::parse_iso8601(j.at("timestamp").get<std::string>());
    e.actor = j.at("actor").get<Role>();
    e.actor_id = j.value("actor_id", std::string{});
    e.item_label = j.at("item_label").get<std::string>();
    e.kind = j.at("kind").get<EventKind>();
    e.quantity = j.at("quantity").get<std::int64_t>();
    e.list_ref = optional_field<std::string>(j, "list_ref");
    e.note = optional_field<std::string>(j, "note");
    e.payload = j.contains("payload") ? j.at("payload") : Json();
    e.cause = optional_field<std::string>(j, "cause");
    if (auto ct = optional_field<std::string>(j, "client_time")) e.client_time = Timestamp::parse_iso8601(*ct);
}

void to_json(Json& j, const StockSnapshot& s) {
    j = Json{{"as_of", s.as_of}, {"items", Json::object()}};
    for (const auto& [label, tallies] : s.items) j["items"][label] = tallies;
}

std::string encode_event(const MovementEvent& event) { return Json(event).dump(); }

MovementEvent decode_event(std::string_view line) {
    try {
        return Json::parse(line).get<MovementEvent>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptLog, std::string("unreadable ledger record: ") + e.what());
    } catch (const DomainError& e) {
        fail(ErrorCode::CorruptLog, std::string("unreadable ledger record: ") + e.what());
    }
}

}  // namespace circuloop::inventory
