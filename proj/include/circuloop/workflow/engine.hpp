#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circuloop/inventory/warehouse.hpp"
#include "circuloop/workflow/permission_matrix.hpp"
#include "circuloop/workflow/types.hpp"

namespace circuloop::workflow {

struct WorkflowSettings {
    /// Lines whose item value class exceeds this make the list high-value.
    int high_value_threshold = 3;
};

/// A validated journal record plus the ledger events it must produce.
struct Decision {
    WorkflowEvent event;
    std::vector<inventory::EventDraft> effects;
};

/// The project logistics state machine.
///
/// Each `decide_*` call validates a command against the current lists and a
/// read-only warehouse view and returns a Decision; nothing changes until the
/// caller `apply`s the event (after committing its effects to the ledger).
/// Replaying the journal through `apply` rebuilds every list exactly.
class WorkflowEngine {
public:
    WorkflowEngine(PermissionMatrix matrix, WorkflowSettings settings = {})
        : matrix_(std::move(matrix)), settings_(settings) {}

    Decision decide_create(const OutboundRequest& request, const Actor& actor,
                           const inventory::Warehouse& warehouse, Timestamp now) const;
    Decision decide_add_line(std::string_view list_id, const LineRequest& line, const Actor& actor,
                             const inventory::Warehouse& warehouse, Timestamp now) const;
    Decision decide_substitute(std::string_view list_id, std::string_view purchase_label,
                               std::string_view stock_label, const Actor& actor,
                               const inventory::Warehouse& warehouse, Timestamp now) const;
    Decision decide_transition(std::string_view list_id, ListState target, const Actor& actor,
                               const inventory::Warehouse& warehouse, Timestamp now,
                               const TransitionOptions& options = {}) const;
    /// EventEnded -> InboundOpen: the outbound list becomes the inbound list.
    Decision decide_open_inbound(std::string_view list_id, const Actor& actor,
                                 const inventory::Warehouse& warehouse, Timestamp now) const;
    Decision decide_disposition(std::string_view list_id, std::string_view item_label, Disposition disposition,
                                std::int64_t quantity, const Actor& actor, Timestamp now) const;
    /// Completeness and permission checks only; the caller attaches the frozen report.
    Decision decide_reconcile(std::string_view list_id, const Actor& actor, Timestamp now,
                              std::optional<std::int64_t> expected_version = std::nullopt) const;
    Decision decide_link(std::string_view list_id, std::string_view material_id, std::string_view note,
                         const Actor& actor, Timestamp now) const;
    Decision decide_acknowledge(std::string_view notification_id, const Actor& actor, Timestamp now) const;

    /// Ledger events a journal record implies, computed against the list
    /// state before the record is applied.
    std::vector<inventory::EventDraft> effects_of(const WorkflowEvent& event) const;

    /// Applies a journal record. Throws CorruptLog when `seq` is out of order.
    void apply(const WorkflowEvent& event);

    /// The list as it will look after `event` (no mutation).
    ProjectList preview(const WorkflowEvent& event) const;

    const ProjectList& get(std::string_view list_id) const;
    const ProjectList* find(std::string_view list_id) const;
    const std::map<std::string, ProjectList, std::less<>>& lists() const { return lists_; }

    /// Open notifications whose next milestone `role` may confirm, oldest first.
    std::vector<Notification> pending_actions(Role role) const;
    std::vector<Notification> open_notifications() const;

    /// Edge permission including the high-value approval gate.
    bool may_confirm(const ProjectList& list, Edge edge, Role role) const;

    const PermissionMatrix& matrix() const { return matrix_; }
    const WorkflowSettings& settings() const { return settings_; }
    std::int64_t last_seq() const { return last_seq_; }

    static std::string cause_for(const WorkflowEvent& event);

private:
    ProjectList& mutable_list(std::string_view list_id);
    void check_lines(const std::vector<LineRequest>& lines, const inventory::Warehouse& warehouse,
                     const ProjectList* existing) const;
    bool line_is_high_value(const ListLine& line, const inventory::Warehouse& warehouse) const;
    WorkflowEvent make_event(std::string_view list_id, const Actor& actor, Timestamp now, Change change) const;
    void refresh_notification(const ProjectList& list, Timestamp at);

    PermissionMatrix matrix_;
    WorkflowSettings settings_;
    std::map<std::string, ProjectList, std::less<>> lists_;
    std::map<std::string, Notification, std::less<>> notifications_;  // open ones, by id
    std::int64_t last_seq_ = 0;
};

}  // namespace circuloop::workflow
