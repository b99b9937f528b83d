#include "circuloop/workflow/types.hpp"

#include <algorithm>

namespace circuloop::workflow {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const std::array<Enum, N>& all) {
    for (Enum e : all) {
        if (to_string(e) == text) return e;
    }
    return std::nullopt;
}

constexpr std::array<LineOrigin, 3> kOrigins = {LineOrigin::FromStock, LineOrigin::SubstitutedFromStock,
                                                LineOrigin::NewPurchase};

}  // namespace

bool is_declared(Edge edge) {
    return std::find(kDeclaredEdges.begin(), kDeclaredEdges.end(), edge) != kDeclaredEdges.end();
}

std::optional<ListState> next_milestone(ListState state) {
    switch (state) {
        case ListState::Draft: return ListState::Submitted;
        case ListState::Submitted: return ListState::Approved;
        case ListState::Approved: return ListState::Picking;
        case ListState::Picking: return ListState::Packed;
        case ListState::Packed: return ListState::Dispatched;
        case ListState::Dispatched: return ListState::ReceivedOnSite;
        case ListState::ReceivedOnSite: return ListState::EventEnded;
        case ListState::EventEnded: return ListState::InboundOpen;
        case ListState::InboundOpen: return ListState::Reconciled;
        case ListState::Reconciled:
        case ListState::Rejected:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string_view to_string(ListState s) {
    switch (s) {
        case ListState::Draft: return "Draft";
        case ListState::Submitted: return "Submitted";
        case ListState::Approved: return "Approved";
        case ListState::Picking: return "Picking";
        case ListState::Packed: return "Packed";
        case ListState::Dispatched: return "Dispatched";
        case ListState::ReceivedOnSite: return "ReceivedOnSite";
        case ListState::EventEnded: return "EventEnded";
        case ListState::InboundOpen: return "InboundOpen";
        case ListState::Reconciled: return "Reconciled";
        case ListState::Rejected: return "Rejected";
    }
    return "?";
}

std::string_view to_string(Disposition d) {
    switch (d) {
        case Disposition::ReturnedRestocked: return "ReturnedRestocked";
        case Disposition::ConsumedOrDamaged: return "ConsumedOrDamaged";
        case Disposition::TemporarilyStored: return "TemporarilyStored";
    }
    return "?";
}

std::string_view to_string(LineOrigin o) {
    switch (o) {
        case LineOrigin::FromStock: return "FromStock";
        case LineOrigin::SubstitutedFromStock: return "SubstitutedFromStock";
        case LineOrigin::NewPurchase: return "NewPurchase";
    }
    return "?";
}

std::string edge_key(Edge e) { return std::string(to_string(e.from)) + "->" + std::string(to_string(e.to)); }

std::optional<ListState> parse_list_state(std::string_view text) { return parse_enum(text, kAllStates); }
std::optional<Disposition> parse_disposition(std::string_view text) { return parse_enum(text, kAllDispositions); }
std::optional<LineOrigin> parse_line_origin(std::string_view text) { return parse_enum(text, kOrigins); }

const ListLine* ProjectList::line(std::string_view label) const {
    for (const auto& l : lines) {
        if (l.item_label == label) return &l;
    }
    return nullptr;
}

ListLine* ProjectList::line(std::string_view label) {
    for (auto& l : lines) {
        if (l.item_label == label) return &l;
    }
    return nullptr;
}

std::optional<Timestamp> ProjectList::reached_at(ListState s) const {
    for (const auto& m : milestones) {
        if (m.state == s) return m.timestamp;
    }
    return std::nullopt;
}

std::int64_t ProjectList::dispatched_units() const {
    std::int64_t n = 0;
    for (const auto& l : lines) n += l.quantity_dispatched;
    return n;
}

std::int64_t ProjectList::requested_units() const {
    std::int64_t n = 0;
    for (const auto& l : lines) n += l.quantity_requested;
    return n;
}

std::int64_t ProjectList::disposed_units(Disposition d) const {
    std::int64_t n = 0;
    for (const auto& l : lines) n += l.disposed(d);
    return n;
}

std::size_t ProjectList::purchase_lines() const {
    return static_cast<std::size_t>(
        std::count_if(lines.begin(), lines.end(), [](const ListLine& l) { return l.origin == LineOrigin::NewPurchase; }));
}

std::size_t ProjectList::substituted_lines() const {
    return static_cast<std::size_t>(std::count_if(lines.begin(), lines.end(), [](const ListLine& l) {
        return l.origin == LineOrigin::SubstitutedFromStock;
    }));
}

}  // namespace circuloop::workflow
