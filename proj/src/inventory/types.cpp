#include "circuloop/inventory/types.hpp"

namespace circuloop::inventory {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const std::array<Enum, N>& all) {
    for (Enum e : all) {
        if (to_string(e) == text) {
            return e;
        }
    }
    return std::nullopt;
}

constexpr std::array<ConditionGrade, 4> kGrades = {ConditionGrade::A, ConditionGrade::B, ConditionGrade::C,
                                                   ConditionGrade::D};
constexpr std::array<ItemStatus, 4> kStatuses = {ItemStatus::InStock, ItemStatus::OutOfStock, ItemStatus::EndOfLife,
                                                 ItemStatus::Retired};

}  // namespace

std::string_view to_string(Category c) {
    switch (c) {
        case Category::EventProps: return "EventProps";
        case Category::MedicalSupplies: return "MedicalSupplies";
        case Category::ElectronicsElectrical: return "ElectronicsElectrical";
        case Category::OfficeSupplies: return "OfficeSupplies";
        case Category::BeveragesFood: return "BeveragesFood";
        case Category::ApparelFootwear: return "ApparelFootwear";
        case Category::TablewareGlassware: return "TablewareGlassware";
    }
    return "?";
}

std::string_view to_string(ConditionGrade g) {
    switch (g) {
        case ConditionGrade::A: return "A";
        case ConditionGrade::B: return "B";
        case ConditionGrade::C: return "C";
        case ConditionGrade::D: return "D";
    }
    return "?";
}

std::string_view to_string(ItemStatus s) {
    switch (s) {
        case ItemStatus::InStock: return "InStock";
        case ItemStatus::OutOfStock: return "OutOfStock";
        case ItemStatus::EndOfLife: return "EndOfLife";
        case ItemStatus::Retired: return "Retired";
    }
    return "?";
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Register: return "Register";
        case EventKind::AdjustQuantity: return "AdjustQuantity";
        case EventKind::UpdateMetadata: return "UpdateMetadata";
        case EventKind::Reserve: return "Reserve";
        case EventKind::ReleaseReservation: return "ReleaseReservation";
        case EventKind::Pick: return "Pick";
        case EventKind::Pack: return "Pack";
        case EventKind::Dispatch: return "Dispatch";
        case EventKind::Receive: return "Receive";
        case EventKind::Inspect: return "Inspect";
        case EventKind::ReturnRestock: return "ReturnRestock";
        case EventKind::MarkConsumedOrDamaged: return "MarkConsumedOrDamaged";
        case EventKind::TempStore: return "TempStore";
        case EventKind::RouteRecycle: return "RouteRecycle";
        case EventKind::Retire: return "Retire";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view text) { return parse_enum(text, kAllCategories); }
std::optional<ConditionGrade> parse_condition(std::string_view text) { return parse_enum(text, kGrades); }
std::optional<ItemStatus> parse_status(std::string_view text) { return parse_enum(text, kStatuses); }
std::optional<EventKind> parse_event_kind(std::string_view text) { return parse_enum(text, kAllEventKinds); }

ItemStatus ItemRecord::status() const {
    if (retired) return ItemStatus::Retired;
    if (end_of_life()) return ItemStatus::EndOfLife;
    if (available() == 0) return ItemStatus::OutOfStock;
    return ItemStatus::InStock;
}

}  // namespace circuloop::inventory
