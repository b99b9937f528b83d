#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "circuloop/core/role.hpp"
#include "circuloop/inventory/types.hpp"
#include "circuloop/workflow/types.hpp"

namespace circuloop::workflow {

/// Non-transition operations that are role-gated.
enum class Action {
    CreateOutbound,
    AddLine,
    SubstituteLine,
    SetDisposition,
    LinkMaterial,
    RecordAudit,
    ImportMaterials,
};

inline constexpr std::array<Action, 7> kAllActions = {
    Action::CreateOutbound, Action::AddLine,     Action::SubstituteLine,  Action::SetDisposition,
    Action::LinkMaterial,   Action::RecordAudit, Action::ImportMaterials,
};

std::string_view to_string(Action a);

/// Who may confirm what. Anything not granted is denied.
///
/// File format, one grant per line, `#` comments:
///
///     Draft->Submitted = ProjectLead
///     event:Register = WarehouseAdministrator
///     action:set_disposition = WarehouseAdministrator, ProjectLead
///
/// Unknown roles, states, event kinds, actions, and undeclared edges are
/// configuration errors.
class PermissionMatrix {
public:
    static PermissionMatrix parse(std::string_view text);
    static PermissionMatrix defaults();
    static std::string_view default_text();

    bool allows(Edge edge, Role role) const;
    bool allows(inventory::EventKind kind, Role role) const;
    bool allows(Action action, Role role) const;

    std::set<Role> roles_for(Edge edge) const;

    /// Canonical text form (declared order, roles in enum order).
    std::string to_text() const;

    bool operator==(const PermissionMatrix&) const = default;

private:
    std::map<Edge, std::set<Role>> edges_;
    std::map<inventory::EventKind, std::set<Role>> events_;
    std::map<Action, std::set<Role>> actions_;
};

}  // namespace circuloop::workflow
