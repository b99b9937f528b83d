#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "circuloop/core/role.hpp"
#include "circuloop/core/time.hpp"

namespace circuloop::inventory {

using Json = nlohmann::json;

enum class Category {
    EventProps,
    MedicalSupplies,
    ElectronicsElectrical,
    OfficeSupplies,
    BeveragesFood,
    ApparelFootwear,
    TablewareGlassware,
};

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::EventProps,     Category::MedicalSupplies, Category::ElectronicsElectrical,
    Category::OfficeSupplies, Category::BeveragesFood,   Category::ApparelFootwear,
    Category::TablewareGlassware,
};

/// A like-new, B serviceable, C visible wear, D below the reuse threshold.
enum class ConditionGrade { A, B, C, D };

enum class ItemStatus { InStock, OutOfStock, EndOfLife, Retired };

enum class EventKind {
    Register,
    AdjustQuantity,
    UpdateMetadata,
    Reserve,
    ReleaseReservation,
    Pick,
    Pack,
    Dispatch,
    Receive,
    Inspect,
    ReturnRestock,
    MarkConsumedOrDamaged,
    TempStore,
    RouteRecycle,
    Retire,
};

inline constexpr std::array<EventKind, 15> kAllEventKinds = {
    EventKind::Register,     EventKind::AdjustQuantity,        EventKind::UpdateMetadata,
    EventKind::Reserve,      EventKind::ReleaseReservation,    EventKind::Pick,
    EventKind::Pack,         EventKind::Dispatch,              EventKind::Receive,
    EventKind::Inspect,      EventKind::ReturnRestock,         EventKind::MarkConsumedOrDamaged,
    EventKind::TempStore,    EventKind::RouteRecycle,          EventKind::Retire,
};

std::string_view to_string(Category c);
std::string_view to_string(ConditionGrade g);
std::string_view to_string(ItemStatus s);
std::string_view to_string(EventKind k);
std::optional<Category> parse_category(std::string_view text);
std::optional<ConditionGrade> parse_condition(std::string_view text);
std::optional<ItemStatus> parse_status(std::string_view text);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// Where an item's units physically are. Every unit ever brought in sits in
/// exactly one bucket; `reserved` is a subset of `on_hand`.
struct StockTallies {
    std::int64_t on_hand = 0;
    std::int64_t reserved = 0;
    std::int64_t dispatched = 0;  // left the warehouse, not yet received on site
    std::int64_t on_site = 0;
    std::int64_t temporarily_stored = 0;
    std::int64_t consumed_or_damaged = 0;
    std::int64_t recycled = 0;
    std::int64_t retired = 0;

    bool operator==(const StockTallies&) const = default;

    /// Units accounted for outside the inflow side of the conservation identity.
    std::int64_t accounted() const {
        return on_hand + dispatched + on_site + temporarily_stored + consumed_or_damaged + recycled + retired;
    }
};

/// Units that entered (or were adjusted out of) the warehouse.
struct Inflow {
    std::int64_t registered = 0;
    std::int64_t adjusted_in = 0;
    std::int64_t adjusted_out = 0;

    bool operator==(const Inflow&) const = default;

    std::int64_t net() const { return registered + adjusted_in - adjusted_out; }
};

/// Registration request; everything but identity-assigned fields.
struct ItemDraft {
    std::string label;
    std::string name;
    Category category = Category::EventProps;
    std::string material;
    std::int64_t quantity = 0;
    ConditionGrade condition = ConditionGrade::A;
    std::int64_t remaining_lifespan = 1;
    std::optional<Date> expiry_date;
    double embodied_carbon_per_unit = 0.0;
    std::string location;
    // Ordinal value class compared against the configured high-value threshold.
    int value_class = 0;
};

struct ItemRecord {
    std::string label;
    std::string name;
    Category category = Category::EventProps;
    std::string material;
    ConditionGrade condition = ConditionGrade::A;
    std::int64_t remaining_lifespan = 0;
    std::optional<Date> expiry_date;
    double embodied_carbon_per_unit = 0.0;
    std::string location;
    int value_class = 0;
    StockTallies stock;
    Inflow inflow;
    bool retired = false;
    std::int64_t version = 0;

    bool operator==(const ItemRecord&) const = default;

    std::int64_t quantity_on_hand() const { return stock.on_hand; }
    std::int64_t quantity_reserved() const { return stock.reserved; }
    std::int64_t available() const { return stock.on_hand - stock.reserved; }

    bool end_of_life() const { return condition == ConditionGrade::D || remaining_lifespan == 0; }

    /// Eligible to be reserved for an outbound list at all (ignores quantity).
    bool reservable() const { return !retired && !end_of_life(); }

    /// Units an outbound list may take right now.
    std::int64_t available_for_outbound() const { return reservable() ? available() : 0; }

    ItemStatus status() const;

    /// Indicative lot footprint: per-unit carbon times units on hand.
    double lot_carbon() const { return embodied_carbon_per_unit * static_cast<double>(stock.on_hand); }
};

struct MetadataPatch {
    std::optional<ConditionGrade> condition;
    std::optional<std::int64_t> remaining_lifespan;
    std::optional<std::string> location;
    std::optional<Date> expiry_date;
    std::optional<double> embodied_carbon_per_unit;

    bool empty() const {
        return !condition && !remaining_lifespan && !location && !expiry_date && !embodied_carbon_per_unit;
    }
};

/// Per-(item, list) pipeline. Units move reserved -> picked -> packed ->
/// in_transit -> on_site -> one of the three disposition buckets.
struct ListFlow {
    std::int64_t reserved = 0;
    std::int64_t picked = 0;
    std::int64_t packed = 0;
    std::int64_t in_transit = 0;
    std::int64_t on_site = 0;
    std::int64_t returned = 0;
    std::int64_t consumed = 0;
    std::int64_t temp_stored = 0;

    bool operator==(const ListFlow&) const = default;

    std::int64_t held_in_warehouse() const { return reserved + picked + packed; }
    std::int64_t dispatched_total() const { return in_transit + on_site + returned + consumed + temp_stored; }
    std::int64_t dispositioned() const { return returned + consumed + temp_stored; }
};

/// A requested ledger mutation before the ledger assigns identity and time.
struct EventDraft {
    EventKind kind = EventKind::Register;
    std::string item_label;
    std::int64_t quantity = 0;
    Actor actor;
    std::optional<std::string> list_ref;
    std::optional<std::string> note;
    Json payload;  // kind-specific: item draft, metadata patch, adjust direction, inspected grade
    std::optional<std::string> cause;
    std::optional<std::int64_t> expected_version;
    std::optional<Timestamp> client_time;
};

/// One append-only ledger entry; the only thing that changes stock.
struct MovementEvent {
    std::string event_id;
    std::int64_t offset = 0;    // position in the whole ledger, gapless from 1
    std::int64_t sequence = 0;  // position in this item's stream, gapless from 1
    Timestamp timestamp;
    Role actor = Role::WarehouseAdministrator;
    std::string actor_id;
    std::string item_label;
    EventKind kind = EventKind::Register;
    std::int64_t quantity = 0;
    std::optional<std::string> list_ref;
    std::optional<std::string> note;
    Json payload;
    std::optional<std::string> cause;
    std::optional<Timestamp> client_time;

    bool operator==(const MovementEvent&) const = default;
};

/// Materialised view of the ledger at `as_of`.
struct StockSnapshot {
    std::int64_t as_of = 0;
    std::map<std::string, StockTallies> items;

    bool operator==(const StockSnapshot&) const = default;
};

struct ItemFilter {
    std::string text;
    std::optional<Category> category;
    std::optional<ItemStatus> status;
    std::optional<ConditionGrade> condition;
    bool available_only = false;
};

struct Page {
    std::size_t offset = 0;
    std::size_t limit = static_cast<std::size_t>(-1);
};

}  // namespace circuloop::inventory
