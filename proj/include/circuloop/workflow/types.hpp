#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "circuloop/core/role.hpp"
#include "circuloop/core/time.hpp"

namespace circuloop::workflow {

using Json = nlohmann::json;

enum class ListState {
    Draft,
    Submitted,
    Approved,
    Picking,
    Packed,
    Dispatched,
    ReceivedOnSite,
    EventEnded,
    InboundOpen,
    Reconciled,
    Rejected,
};

/// The ten states of the main line, in order.
inline constexpr std::array<ListState, 10> kMainLine = {
    ListState::Draft,      ListState::Submitted,      ListState::Approved,   ListState::Picking,
    ListState::Packed,     ListState::Dispatched,     ListState::ReceivedOnSite,
    ListState::EventEnded, ListState::InboundOpen,    ListState::Reconciled,
};

inline constexpr std::array<ListState, 11> kAllStates = {
    ListState::Draft,      ListState::Submitted,  ListState::Approved,    ListState::Picking,
    ListState::Packed,     ListState::Dispatched, ListState::ReceivedOnSite, ListState::EventEnded,
    ListState::InboundOpen, ListState::Reconciled, ListState::Rejected,
};

struct Edge {
    ListState from;
    ListState to;

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

/// Main-line steps plus the Submitted -> Rejected branch.
inline constexpr std::array<Edge, 10> kDeclaredEdges = {{
    {ListState::Draft, ListState::Submitted},
    {ListState::Submitted, ListState::Approved},
    {ListState::Submitted, ListState::Rejected},
    {ListState::Approved, ListState::Picking},
    {ListState::Picking, ListState::Packed},
    {ListState::Packed, ListState::Dispatched},
    {ListState::Dispatched, ListState::ReceivedOnSite},
    {ListState::ReceivedOnSite, ListState::EventEnded},
    {ListState::EventEnded, ListState::InboundOpen},
    {ListState::InboundOpen, ListState::Reconciled},
}};

bool is_declared(Edge edge);

/// The milestone a list in `state` waits for next (nullopt when terminal).
/// For Submitted this is Approved; Rejected is the alternative branch.
std::optional<ListState> next_milestone(ListState state);

/// Lines may still be added or substituted.
inline bool lines_editable(ListState s) { return s == ListState::Draft || s == ListState::Submitted; }

/// Materials may still be linked (state at or before Approved).
inline bool accepts_material_links(ListState s) {
    return s == ListState::Draft || s == ListState::Submitted || s == ListState::Approved;
}

enum class Disposition { ReturnedRestocked, ConsumedOrDamaged, TemporarilyStored };
inline constexpr std::array<Disposition, 3> kAllDispositions = {
    Disposition::ReturnedRestocked, Disposition::ConsumedOrDamaged, Disposition::TemporarilyStored};

enum class LineOrigin { FromStock, SubstitutedFromStock, NewPurchase };

std::string_view to_string(ListState s);
std::string_view to_string(Disposition d);
std::string_view to_string(LineOrigin o);
std::string edge_key(Edge e);  // "Draft->Submitted"
std::optional<ListState> parse_list_state(std::string_view text);
std::optional<Disposition> parse_disposition(std::string_view text);
std::optional<LineOrigin> parse_line_origin(std::string_view text);

struct ListLine {
    std::string item_label;
    std::int64_t quantity_requested = 0;
    std::int64_t quantity_dispatched = 0;
    std::map<Disposition, std::int64_t> dispositions;
    LineOrigin origin = LineOrigin::FromStock;
    std::optional<std::string> replaced_purchase;  // original purchase label after substitution

    bool operator==(const ListLine&) const = default;

    std::int64_t dispositioned() const {
        std::int64_t total = 0;
        for (const auto& [d, q] : dispositions) total += q;
        return total;
    }
    std::int64_t undispositioned() const { return quantity_dispatched - dispositioned(); }
    std::int64_t disposed(Disposition d) const {
        auto it = dispositions.find(d);
        return it == dispositions.end() ? 0 : it->second;
    }
    bool from_stock() const { return origin != LineOrigin::NewPurchase; }
};

struct Milestone {
    ListState state = ListState::Draft;
    Role actor = Role::ProjectLead;
    std::string actor_id;
    Timestamp timestamp;

    bool operator==(const Milestone&) const = default;
};

struct MaterialLink {
    std::string list_id;
    std::string material_id;
    std::string note;
    Role linked_by = Role::Designer;
    std::string actor_id;
    Timestamp timestamp;

    bool operator==(const MaterialLink&) const = default;
};

struct ProjectList {
    std::string list_id;
    std::string project_name;
    std::string client;
    ListState state = ListState::Draft;
    std::vector<ListLine> lines;
    std::vector<Milestone> milestones;
    Actor created_by;
    bool high_value = false;
    std::int64_t version = 0;
    std::vector<MaterialLink> materials;
    std::optional<Json> report;  // frozen at reconciliation

    const ListLine* line(std::string_view label) const;
    ListLine* line(std::string_view label);

    Timestamp created_at() const { return milestones.empty() ? Timestamp{} : milestones.front().timestamp; }
    std::optional<Timestamp> reached_at(ListState s) const;

    std::int64_t dispatched_units() const;
    std::int64_t requested_units() const;
    std::int64_t disposed_units(Disposition d) const;
    std::size_t purchase_lines() const;
    std::size_t substituted_lines() const;
};

struct Notification {
    std::string id;  // "<list_id>:<milestone>"
    Role recipient = Role::ProjectLead;
    std::string list_id;
    ListState required_action = ListState::Submitted;
    Timestamp created;
    bool acknowledged = false;

    bool operator==(const Notification&) const = default;
};

// ---- journal changes -------------------------------------------------------

struct LineRequest {
    std::string item_label;
    std::int64_t quantity = 0;
    LineOrigin origin = LineOrigin::FromStock;
};

struct OutboundRequest {
    std::optional<std::string> list_id;
    std::string project_name;
    std::string client;
    std::vector<LineRequest> lines;
};

struct ListCreated {
    std::string project_name;
    std::string client;
    std::vector<ListLine> lines;
    bool high_value = false;
};

struct LineAdded {
    ListLine line;
    bool high_value = false;
};

struct LineSubstituted {
    std::string purchase_label;
    std::string stock_label;
    bool high_value = false;
};

struct Transitioned {
    ListState from = ListState::Draft;
    ListState to = ListState::Submitted;
    std::map<std::string, std::int64_t> dispatch_quantities;  // Dispatched only
    std::optional<Json> report;                               // Reconciled only
};

struct DispositionRecorded {
    std::string item_label;
    Disposition disposition = Disposition::ReturnedRestocked;
    std::int64_t quantity = 0;
};

struct MaterialLinked {
    std::string material_id;
    std::string note;
};

struct NotificationAcknowledged {
    std::string notification_id;
};

using Change = std::variant<ListCreated, LineAdded, LineSubstituted, Transitioned, DispositionRecorded,
                            MaterialLinked, NotificationAcknowledged>;

/// One record of the workflow journal.
struct WorkflowEvent {
    std::int64_t seq = 0;
    Timestamp timestamp;
    Actor actor;
    std::string list_id;
    Change change;
};

struct TransitionOptions {
    /// Per-line dispatched quantity for Packed -> Dispatched; missing lines ship in full.
    std::map<std::string, std::int64_t> dispatch_quantities;
    std::optional<std::int64_t> expected_version;
};

}  // namespace circuloop::workflow
