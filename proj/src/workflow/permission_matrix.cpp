#include "circuloop/workflow/permission_matrix.hpp"

#include <sstream>

#include "circuloop/core/error.hpp"

namespace circuloop::workflow {

namespace {

constexpr std::string_view kDefaultMatrix = R"(# Role grants for list milestones, direct ledger events and other actions.
# Anything not listed is denied.

Draft->Submitted = ProjectLead
Submitted->Approved = ProjectLead, FinanceReviewer
Submitted->Rejected = ProjectLead, FinanceReviewer
Approved->Picking = WarehouseAdministrator
Picking->Packed = WarehouseAdministrator
Packed->Dispatched = WarehouseAdministrator
Dispatched->ReceivedOnSite = ProjectLead, WarehouseAdministrator
ReceivedOnSite->EventEnded = ProjectLead, WarehouseAdministrator
EventEnded->InboundOpen = ProjectLead, WarehouseAdministrator
InboundOpen->Reconciled = WarehouseAdministrator

event:Register = WarehouseAdministrator
event:AdjustQuantity = WarehouseAdministrator
event:UpdateMetadata = WarehouseAdministrator
event:Inspect = WarehouseAdministrator
event:ReturnRestock = WarehouseAdministrator
event:MarkConsumedOrDamaged = WarehouseAdministrator
event:RouteRecycle = WarehouseAdministrator
event:Retire = WarehouseAdministrator

action:create_outbound = ProjectLead
action:add_line = ProjectLead
action:substitute_line = ProjectLead, Designer, Procurement
action:set_disposition = ProjectLead, WarehouseAdministrator
action:link_material = ProjectLead, Designer
action:record_audit = WarehouseAdministrator
action:import_materials = WarehouseAdministrator, SustainabilityLead
)";

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
    fail(ErrorCode::InvalidConfig, "permission matrix line " + std::to_string(line) + ": " + what);
}

std::set<Role> parse_roles(std::string_view value, std::size_t line) {
    std::set<Role> roles;
    std::string item;
    std::istringstream in{std::string(value)};
    while (std::getline(in, item, ',')) {
        auto name = trim(item);
        if (name.empty()) continue;
        auto role = parse_role(name);
        if (!role) config_error(line, "unknown role '" + name + "'");
        roles.insert(*role);
    }
    return roles;
}

void append_grant(std::ostringstream& out, const std::string& key, const std::set<Role>& roles) {
    out << key << " =";
    bool first = true;
    for (Role r : kAllRoles) {
        if (!roles.count(r)) continue;
        out << (first ? " " : ", ") << to_string(r);
        first = false;
    }
    out << '\n';
}

}  // namespace

std::string_view to_string(Action a) {
    switch (a) {
        case Action::CreateOutbound: return "create_outbound";
        case Action::AddLine: return "add_line";
        case Action::SubstituteLine: return "substitute_line";
        case Action::SetDisposition: return "set_disposition";
        case Action::LinkMaterial: return "link_material";
        case Action::RecordAudit: return "record_audit";
        case Action::ImportMaterials: return "import_materials";
    }
    return "?";
}

PermissionMatrix PermissionMatrix::parse(std::string_view text) {
    PermissionMatrix m;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        auto line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) config_error(line_no, "expected 'key = roles'");
        auto key = trim(std::string_view(line).substr(0, eq));
        auto roles = parse_roles(std::string_view(line).substr(eq + 1), line_no);

        if (key.rfind("event:", 0) == 0) {
            auto kind = inventory::parse_event_kind(key.substr(6));
            if (!kind) config_error(line_no, "unknown event kind '" + key.substr(6) + "'");
            m.events_[*kind].insert(roles.begin(), roles.end());
        } else if (key.rfind("action:", 0) == 0) {
            std::optional<Action> action;
            for (Action a : kAllActions) {
                if (to_string(a) == key.substr(7)) action = a;
            }
            if (!action) config_error(line_no, "unknown action '" + key.substr(7) + "'");
            m.actions_[*action].insert(roles.begin(), roles.end());
        } else {
            auto arrow = key.find("->");
            if (arrow == std::string::npos) config_error(line_no, "unknown key '" + key + "'");
            auto from_name = trim(std::string_view(key).substr(0, arrow));
            auto to_name = trim(std::string_view(key).substr(arrow + 2));
            auto from = parse_list_state(from_name);
            auto to = parse_list_state(to_name);
            if (!from) config_error(line_no, "unknown state '" + from_name + "'");
            if (!to) config_error(line_no, "unknown state '" + to_name + "'");
            Edge edge{*from, *to};
            if (!is_declared(edge)) config_error(line_no, "no such transition " + edge_key(edge));
            m.edges_[edge].insert(roles.begin(), roles.end());
        }
    }
    return m;
}

std::string_view PermissionMatrix::default_text() { return kDefaultMatrix; }

PermissionMatrix PermissionMatrix::defaults() { return parse(kDefaultMatrix); }

bool PermissionMatrix::allows(Edge edge, Role role) const {
    auto it = edges_.find(edge);
    return it != edges_.end() && it->second.count(role) > 0;
}

bool PermissionMatrix::allows(inventory::EventKind kind, Role role) const {
    auto it = events_.find(kind);
    return it != events_.end() && it->second.count(role) > 0;
}

bool PermissionMatrix::allows(Action action, Role role) const {
    auto it = actions_.find(action);
    return it != actions_.end() && it->second.count(role) > 0;
}

std::set<Role> PermissionMatrix::roles_for(Edge edge) const {
    auto it = edges_.find(edge);
    return it == edges_.end() ? std::set<Role>{} : it->second;
}

std::string PermissionMatrix::to_text() const {
    std::ostringstream out;
    for (const Edge& e : kDeclaredEdges) {
        if (auto it = edges_.find(e); it != edges_.end() && !it->second.empty()) {
            append_grant(out, edge_key(e), it->second);
        }
    }
    for (auto kind : inventory::kAllEventKinds) {
        if (auto it = events_.find(kind); it != events_.end() && !it->second.empty()) {
            append_grant(out, "event:" + std::string(inventory::to_string(kind)), it->second);
        }
    }
    for (Action a : kAllActions) {
        if (auto it = actions_.find(a); it != actions_.end() && !it->second.empty()) {
            append_grant(out, "action:" + std::string(to_string(a)), it->second);
        }
    }
    return out.str();
}

}  // namespace circuloop::workflow
