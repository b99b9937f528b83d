#include "circuloop/workflow/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "circuloop/core/error.hpp"

namespace circuloop::workflow {

namespace {

using inventory::EventDraft;
using inventory::EventKind;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool allowed, const Actor& actor, const std::string& what) {
    if (!allowed) {
        fail(ErrorCode::Forbidden, std::string(to_string(actor.role)) + " may not " + what);
    }
}

void check_version(const ProjectList& list, std::optional<std::int64_t> expected) {
    if (expected && *expected != list.version) {
        throw StaleVersionError("list " + list.list_id + " is at version " + std::to_string(list.version) +
                                    ", expected " + std::to_string(*expected),
                                list.version);
    }
}

// Folds one journal change into a list; `list` is empty for ListCreated.
void apply_change(ProjectList& list, const WorkflowEvent& event) {
    std::visit(overloaded{
                   [&](const ListCreated& c) {
                       list = ProjectList{};
                       list.list_id = event.list_id;
                       list.project_name = c.project_name;
                       list.client = c.client;
                       list.state = ListState::Draft;
                       list.lines = c.lines;
                       list.milestones.push_back(
                           {ListState::Draft, event.actor.role, event.actor.actor_id, event.timestamp});
                       list.created_by = event.actor;
                       list.high_value = c.high_value;
                       list.version = 1;
                   },
                   [&](const LineAdded& c) {
                       list.lines.push_back(c.line);
                       list.high_value = c.high_value;
                       ++list.version;
                   },
                   [&](const LineSubstituted& c) {
                       ListLine* line = list.line(c.purchase_label);
                       if (!line) fail(ErrorCode::CorruptLog, "substitution of unknown line " + c.purchase_label);
                       line->replaced_purchase = c.purchase_label;
                       line->item_label = c.stock_label;
                       line->origin = LineOrigin::SubstitutedFromStock;
                       list.high_value = c.high_value;
                       ++list.version;
                   },
                   [&](const Transitioned& c) {
                       if (c.from != list.state) {
                           fail(ErrorCode::CorruptLog, "journal transition from " + std::string(to_string(c.from)) +
                                                           " but list " + list.list_id + " is " +
                                                           std::string(to_string(list.state)));
                       }
                       list.state = c.to;
                       list.milestones.push_back({c.to, event.actor.role, event.actor.actor_id, event.timestamp});
                       if (c.to == ListState::Dispatched) {
                           for (auto& line : list.lines) {
                               auto it = c.dispatch_quantities.find(line.item_label);
                               line.quantity_dispatched =
                                   it == c.dispatch_quantities.end() ? line.quantity_requested : it->second;
                           }
                       }
                       if (c.report) list.report = c.report;
                       ++list.version;
                   },
                   [&](const DispositionRecorded& c) {
                       ListLine* line = list.line(c.item_label);
                       if (!line) fail(ErrorCode::CorruptLog, "disposition for unknown line " + c.item_label);
                       line->dispositions[c.disposition] += c.quantity;
                       ++list.version;
                   },
                   [&](const MaterialLinked& c) {
                       list.materials.push_back({list.list_id, c.material_id, c.note, event.actor.role,
                                                 event.actor.actor_id, event.timestamp});
                       ++list.version;
                   },
                   [&](const NotificationAcknowledged&) {},
               },
               event.change);
}

EventDraft effect(const WorkflowEvent& event, EventKind kind, const std::string& label, std::int64_t quantity,
                  const std::string& note) {
    EventDraft d;
    d.kind = kind;
    d.item_label = label;
    d.quantity = quantity;
    d.actor = event.actor;
    d.list_ref = event.list_id;
    d.note = note;
    d.cause = WorkflowEngine::cause_for(event);
    return d;
}

}  // namespace

std::string WorkflowEngine::cause_for(const WorkflowEvent& event) {
    if (auto* t = std::get_if<Transitioned>(&event.change)) {
        return event.list_id + ":" + std::string(to_string(t->to));
    }
    return event.list_id + ":" + std::to_string(event.seq);
}

WorkflowEvent WorkflowEngine::make_event(std::string_view list_id, const Actor& actor, Timestamp now,
                                         Change change) const {
    WorkflowEvent e;
    e.seq = last_seq_ + 1;
    e.timestamp = now;
    e.actor = actor;
    e.list_id = std::string(list_id);
    e.change = std::move(change);
    return e;
}

const ProjectList* WorkflowEngine::find(std::string_view list_id) const {
    auto it = lists_.find(list_id);
    return it == lists_.end() ? nullptr : &it->second;
}

const ProjectList& WorkflowEngine::get(std::string_view list_id) const {
    const ProjectList* list = find(list_id);
    if (!list) fail(ErrorCode::UnknownList, "unknown list " + std::string(list_id));
    return *list;
}

ProjectList& WorkflowEngine::mutable_list(std::string_view list_id) {
    auto it = lists_.find(list_id);
    if (it == lists_.end()) fail(ErrorCode::CorruptLog, "journal references unknown list " + std::string(list_id));
    return it->second;
}

bool WorkflowEngine::line_is_high_value(const ListLine& line, const inventory::Warehouse& warehouse) const {
    const auto* item = warehouse.find(line.item_label);
    return item && item->value_class > settings_.high_value_threshold;
}

bool WorkflowEngine::may_confirm(const ProjectList& list, Edge edge, Role role) const {
    if (!matrix_.allows(edge, role)) return false;
    if (edge.to == ListState::Approved && list.high_value && role != Role::FinanceReviewer) return false;
    return true;
}

void WorkflowEngine::check_lines(const std::vector<LineRequest>& lines, const inventory::Warehouse& warehouse,
                                 const ProjectList* existing) const {
    std::set<std::string, std::less<>> labels;
    if (existing) {
        for (const auto& l : existing->lines) labels.insert(l.item_label);
    }
    for (const auto& line : lines) {
        if (line.item_label.empty()) fail(ErrorCode::Validation, "line has no item label");
        if (line.quantity <= 0) {
            fail(ErrorCode::InvalidQuantity, "line " + line.item_label + ": requested quantity must be positive");
        }
        if (!labels.insert(line.item_label).second) {
            fail(ErrorCode::Validation, "item " + line.item_label + " appears on more than one line");
        }
        switch (line.origin) {
            case LineOrigin::FromStock: {
                const auto* item = warehouse.find(line.item_label);
                if (!item) fail(ErrorCode::UnknownItem, "line " + line.item_label + ": unknown item");
                if (line.quantity > item->available_for_outbound()) {
                    fail(ErrorCode::InsufficientStock, "line " + line.item_label + ": requests " +
                                                           std::to_string(line.quantity) + " but only " +
                                                           std::to_string(item->available_for_outbound()) +
                                                           " available");
                }
                break;
            }
            case LineOrigin::SubstitutedFromStock:
                fail(ErrorCode::Validation, "line " + line.item_label + ": substitutions go through substitute_line");
            case LineOrigin::NewPurchase:
                break;
        }
    }
}

Decision WorkflowEngine::decide_create(const OutboundRequest& request, const Actor& actor,
                                       const inventory::Warehouse& warehouse, Timestamp now) const {
    require(matrix_.allows(Action::CreateOutbound, actor.role), actor, "create outbound lists");
    if (request.lines.empty()) fail(ErrorCode::EmptyList, "an outbound list needs at least one line");
    check_lines(request.lines, warehouse, nullptr);

    std::string list_id;
    if (request.list_id) {
        list_id = *request.list_id;
        if (list_id.empty()) fail(ErrorCode::Validation, "list id must not be empty");
        if (find(list_id)) fail(ErrorCode::Validation, "list " + list_id + " already exists");
    } else {
        std::size_t n = lists_.size();
        do {
            char buf[24];
            std::snprintf(buf, sizeof buf, "PL-%06zu", ++n);
            list_id = buf;
        } while (find(list_id));
    }

    ListCreated created;
    created.project_name = request.project_name;
    created.client = request.client;
    for (const auto& l : request.lines) {
        ListLine line;
        line.item_label = l.item_label;
        line.quantity_requested = l.quantity;
        line.origin = l.origin;
        created.high_value = created.high_value || line_is_high_value(line, warehouse);
        created.lines.push_back(std::move(line));
    }
    return Decision{make_event(list_id, actor, now, std::move(created)), {}};
}

Decision WorkflowEngine::decide_add_line(std::string_view list_id, const LineRequest& request, const Actor& actor,
                                         const inventory::Warehouse& warehouse, Timestamp now) const {
    const ProjectList& list = get(list_id);
    require(matrix_.allows(Action::AddLine, actor.role), actor, "add lines");
    if (!lines_editable(list.state)) {
        fail(ErrorCode::LinesFrozen, "list " + list.list_id + " is " + std::string(to_string(list.state)) +
                                         "; lines are frozen");
    }
    check_lines({request}, warehouse, &list);
    LineAdded added;
    added.line.item_label = request.item_label;
    added.line.quantity_requested = request.quantity;
    added.line.origin = request.origin;
    added.high_value = list.high_value || line_is_high_value(added.line, warehouse);
    return Decision{make_event(list_id, actor, now, std::move(added)), {}};
}

Decision WorkflowEngine::decide_substitute(std::string_view list_id, std::string_view purchase_label,
                                           std::string_view stock_label, const Actor& actor,
                                           const inventory::Warehouse& warehouse, Timestamp now) const {
    const ProjectList& list = get(list_id);
    require(matrix_.allows(Action::SubstituteLine, actor.role), actor, "substitute lines");
    if (!lines_editable(list.state)) {
        fail(ErrorCode::IllegalState, "list " + list.list_id + " is " + std::string(to_string(list.state)) +
                                          "; substitutions are only possible before approval");
    }
    const ListLine* line = list.line(purchase_label);
    if (!line) fail(ErrorCode::UnknownLine, "list " + list.list_id + " has no line " + std::string(purchase_label));
    if (line->origin != LineOrigin::NewPurchase) {
        fail(ErrorCode::Validation, "line " + std::string(purchase_label) + " is not a purchase line");
    }
    if (stock_label != purchase_label && list.line(stock_label)) {
        fail(ErrorCode::Validation, "item " + std::string(stock_label) + " is already on the list");
    }
    const auto* item = warehouse.find(stock_label);
    if (!item) fail(ErrorCode::UnknownItem, "unknown item " + std::string(stock_label));
    if (item->available_for_outbound() < line->quantity_requested) {
        fail(ErrorCode::InsufficientStock, "item " + std::string(stock_label) + " has " +
                                               std::to_string(item->available_for_outbound()) +
                                               " available, line needs " +
                                               std::to_string(line->quantity_requested));
    }
    LineSubstituted sub{std::string(purchase_label), std::string(stock_label), false};
    for (const auto& l : list.lines) {
        ListLine probe = l;
        if (probe.item_label == purchase_label) probe.item_label = std::string(stock_label);
        sub.high_value = sub.high_value || line_is_high_value(probe, warehouse);
    }
    return Decision{make_event(list_id, actor, now, std::move(sub)), {}};
}

Decision WorkflowEngine::decide_transition(std::string_view list_id, ListState target, const Actor& actor,
                                           const inventory::Warehouse& warehouse, Timestamp now,
                                           const TransitionOptions& options) const {
    if (target == ListState::Reconciled) return decide_reconcile(list_id, actor, now, options.expected_version);

    const ProjectList& list = get(list_id);
    check_version(list, options.expected_version);
    Edge edge{list.state, target};
    if (!is_declared(edge)) {
        fail(ErrorCode::IllegalTransition, "list " + list.list_id + " cannot move " + edge_key(edge));
    }
    require(may_confirm(list, edge, actor.role), actor,
            "confirm " + edge_key(edge) + (target == ListState::Approved && list.high_value
                                               ? " on a high-value list"
                                               : ""));

    Transitioned t{list.state, target, {}, std::nullopt};
    if (target == ListState::Approved) {
        for (const auto& line : list.lines) {
            const auto* item = warehouse.find(line.item_label);
            if (!item) {
                fail(ErrorCode::PreconditionFailed,
                     "line " + line.item_label + ": purchased item has not been registered in the warehouse");
            }
            if (item->available_for_outbound() < line.quantity_requested) {
                fail(ErrorCode::InsufficientStock, "line " + line.item_label + ": requests " +
                                                       std::to_string(line.quantity_requested) + " but only " +
                                                       std::to_string(item->available_for_outbound()) +
                                                       " available");
            }
        }
    }
    if (target == ListState::Dispatched) {
        for (const auto& [label, qty] : options.dispatch_quantities) {
            const ListLine* line = list.line(label);
            if (!line) fail(ErrorCode::UnknownLine, "list " + list.list_id + " has no line " + label);
            if (qty < 0 || qty > line->quantity_requested) {
                fail(ErrorCode::InvalidQuantity, "line " + label + ": dispatch quantity must be within 0.." +
                                                     std::to_string(line->quantity_requested));
            }
        }
        for (const auto& line : list.lines) {
            auto it = options.dispatch_quantities.find(line.item_label);
            t.dispatch_quantities[line.item_label] =
                it == options.dispatch_quantities.end() ? line.quantity_requested : it->second;
        }
    }
    Decision d{make_event(list_id, actor, now, std::move(t)), {}};
    d.effects = effects_of(d.event);
    return d;
}

Decision WorkflowEngine::decide_open_inbound(std::string_view list_id, const Actor& actor,
                                             const inventory::Warehouse& warehouse, Timestamp now) const {
    return decide_transition(list_id, ListState::InboundOpen, actor, warehouse, now);
}

Decision WorkflowEngine::decide_disposition(std::string_view list_id, std::string_view item_label,
                                            Disposition disposition, std::int64_t quantity, const Actor& actor,
                                            Timestamp now) const {
    const ProjectList& list = get(list_id);
    require(matrix_.allows(Action::SetDisposition, actor.role), actor, "record dispositions");
    if (list.state != ListState::InboundOpen) {
        fail(ErrorCode::IllegalState, "list " + list.list_id + " is " + std::string(to_string(list.state)) +
                                          "; dispositions need an open inbound list");
    }
    const ListLine* line = list.line(item_label);
    if (!line) fail(ErrorCode::UnknownLine, "list " + list.list_id + " has no line " + std::string(item_label));
    if (quantity <= 0) fail(ErrorCode::InvalidQuantity, "disposition quantity must be positive");
    if (quantity > line->undispositioned()) {
        fail(ErrorCode::OverDisposition, "line " + line->item_label + ": " + std::to_string(quantity) +
                                             " requested but only " + std::to_string(line->undispositioned()) +
                                             " remain undispositioned");
    }
    Decision d{make_event(list_id, actor, now, DispositionRecorded{line->item_label, disposition, quantity}), {}};
    d.effects = effects_of(d.event);
    return d;
}

Decision WorkflowEngine::decide_reconcile(std::string_view list_id, const Actor& actor, Timestamp now,
                                          std::optional<std::int64_t> expected_version) const {
    const ProjectList& list = get(list_id);
    check_version(list, expected_version);
    Edge edge{list.state, ListState::Reconciled};
    if (!is_declared(edge)) {
        fail(ErrorCode::IllegalTransition, "list " + list.list_id + " cannot move " + edge_key(edge));
    }
    require(may_confirm(list, edge, actor.role), actor, "reconcile lists");
    std::string short_lines;
    for (const auto& line : list.lines) {
        if (line.undispositioned() != 0) {
            if (!short_lines.empty()) short_lines += ", ";
            short_lines += line.item_label + " (" + std::to_string(line.undispositioned()) + " undispositioned)";
        }
    }
    if (!short_lines.empty()) {
        fail(ErrorCode::IncompleteDispositions, "list " + list.list_id + " has open lines: " + short_lines);
    }
    return Decision{make_event(list_id, actor, now, Transitioned{list.state, ListState::Reconciled, {}, std::nullopt}),
                    {}};
}

Decision WorkflowEngine::decide_link(std::string_view list_id, std::string_view material_id, std::string_view note,
                                     const Actor& actor, Timestamp now) const {
    const ProjectList& list = get(list_id);
    require(matrix_.allows(Action::LinkMaterial, actor.role), actor, "link materials");
    if (!accepts_material_links(list.state)) {
        fail(ErrorCode::IllegalState, "list " + list.list_id + " is " + std::string(to_string(list.state)) +
                                          "; materials can only be linked up to approval");
    }
    return Decision{make_event(list_id, actor, now, MaterialLinked{std::string(material_id), std::string(note)}), {}};
}

Decision WorkflowEngine::decide_acknowledge(std::string_view notification_id, const Actor& actor,
                                            Timestamp now) const {
    auto it = notifications_.find(notification_id);
    if (it == notifications_.end()) {
        fail(ErrorCode::Validation, "no open notification " + std::string(notification_id));
    }
    const ProjectList& list = get(it->second.list_id);
    require(may_confirm(list, Edge{list.state, it->second.required_action}, actor.role), actor,
            "acknowledge " + std::string(notification_id));
    return Decision{
        make_event(it->second.list_id, actor, now, NotificationAcknowledged{std::string(notification_id)}), {}};
}

std::vector<EventDraft> WorkflowEngine::effects_of(const WorkflowEvent& event) const {
    std::vector<EventDraft> out;
    if (auto* t = std::get_if<Transitioned>(&event.change)) {
        const ProjectList& list = get(event.list_id);
        const std::string note = "milestone " + std::string(to_string(t->to));
        for (const auto& line : list.lines) {
            switch (t->to) {
                case ListState::Approved:
                    out.push_back(effect(event, EventKind::Reserve, line.item_label, line.quantity_requested, note));
                    break;
                case ListState::Picking:
                    out.push_back(effect(event, EventKind::Pick, line.item_label, line.quantity_requested, note));
                    break;
                case ListState::Packed:
                    out.push_back(effect(event, EventKind::Pack, line.item_label, line.quantity_requested, note));
                    break;
                case ListState::Dispatched: {
                    auto it = t->dispatch_quantities.find(line.item_label);
                    std::int64_t shipped =
                        it == t->dispatch_quantities.end() ? line.quantity_requested : it->second;
                    if (shipped > 0) {
                        out.push_back(effect(event, EventKind::Dispatch, line.item_label, shipped, note));
                    }
                    if (line.quantity_requested > shipped) {
                        out.push_back(effect(event, EventKind::ReleaseReservation, line.item_label,
                                             line.quantity_requested - shipped, "not dispatched"));
                    }
                    break;
                }
                case ListState::ReceivedOnSite:
                    if (line.quantity_dispatched > 0) {
                        out.push_back(
                            effect(event, EventKind::Receive, line.item_label, line.quantity_dispatched, note));
                    }
                    break;
                default:
                    break;
            }
        }
    } else if (auto* d = std::get_if<DispositionRecorded>(&event.change)) {
        EventKind kind = EventKind::ReturnRestock;
        switch (d->disposition) {
            case Disposition::ReturnedRestocked: kind = EventKind::ReturnRestock; break;
            case Disposition::ConsumedOrDamaged: kind = EventKind::MarkConsumedOrDamaged; break;
            case Disposition::TemporarilyStored: kind = EventKind::TempStore; break;
        }
        out.push_back(effect(event, kind, d->item_label, d->quantity,
                             "disposition " + std::string(to_string(d->disposition))));
    }
    return out;
}

ProjectList WorkflowEngine::preview(const WorkflowEvent& event) const {
    ProjectList copy;
    if (!std::holds_alternative<ListCreated>(event.change)) copy = get(event.list_id);
    apply_change(copy, event);
    return copy;
}

void WorkflowEngine::apply(const WorkflowEvent& event) {
    if (event.seq != last_seq_ + 1) {
        fail(ErrorCode::CorruptLog, "workflow journal gap: expected seq " + std::to_string(last_seq_ + 1) +
                                        ", found " + std::to_string(event.seq));
    }
    if (auto* ack = std::get_if<NotificationAcknowledged>(&event.change)) {
        if (auto it = notifications_.find(ack->notification_id); it != notifications_.end()) {
            it->second.acknowledged = true;
        }
        last_seq_ = event.seq;
        return;
    }
    if (std::holds_alternative<ListCreated>(event.change)) {
        if (find(event.list_id)) fail(ErrorCode::CorruptLog, "list " + event.list_id + " created twice");
        ProjectList list;
        apply_change(list, event);
        auto [it, _] = lists_.emplace(event.list_id, std::move(list));
        refresh_notification(it->second, event.timestamp);
    } else {
        ProjectList& list = mutable_list(event.list_id);
        apply_change(list, event);
        if (std::holds_alternative<Transitioned>(event.change)) refresh_notification(list, event.timestamp);
    }
    last_seq_ = event.seq;
}

void WorkflowEngine::refresh_notification(const ProjectList& list, Timestamp at) {
    std::erase_if(notifications_, [&](const auto& kv) { return kv.second.list_id == list.list_id; });
    auto next = next_milestone(list.state);
    if (!next) return;
    Edge edge{list.state, *next};
    for (Role role : kAllRoles) {
        if (!may_confirm(list, edge, role)) continue;
        Notification n;
        n.id = list.list_id + ":" + std::string(to_string(*next));
        n.recipient = role;
        n.list_id = list.list_id;
        n.required_action = *next;
        n.created = at;
        notifications_.emplace(n.id, std::move(n));
        return;
    }
}

std::vector<Notification> WorkflowEngine::open_notifications() const {
    std::vector<Notification> out;
    for (const auto& [id, n] : notifications_) out.push_back(n);
    std::sort(out.begin(), out.end(), [](const Notification& a, const Notification& b) {
        return a.created != b.created ? a.created < b.created : a.id < b.id;
    });
    return out;
}

std::vector<Notification> WorkflowEngine::pending_actions(Role role) const {
    std::vector<Notification> out;
    for (const auto& n : open_notifications()) {
        const ProjectList& list = get(n.list_id);
        if (may_confirm(list, Edge{list.state, n.required_action}, role)) out.push_back(n);
    }
    return out;
}

}  // namespace circuloop::workflow
