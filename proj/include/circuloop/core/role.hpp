#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace circuloop {

enum class Role {
    ProjectLead,
    WarehouseAdministrator,
    Designer,
    Procurement,
    FinanceReviewer,
    SustainabilityLead,
};

inline constexpr std::array<Role, 6> kAllRoles = {
    Role::ProjectLead,  Role::WarehouseAdministrator, Role::Designer,
    Role::Procurement,  Role::FinanceReviewer,        Role::SustainabilityLead,
};

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

/// The authenticated party behind a request: one role per session.
struct Actor {
    Role role = Role::ProjectLead;
    std::string actor_id;
};

}  // namespace circuloop
