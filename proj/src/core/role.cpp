#include "circuloop/core/role.hpp"

namespace circuloop {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::ProjectLead: return "ProjectLead";
        case Role::WarehouseAdministrator: return "WarehouseAdministrator";
        case Role::Designer: return "Designer";
        case Role::Procurement: return "Procurement";
        case Role::FinanceReviewer: return "FinanceReviewer";
        case Role::SustainabilityLead: return "SustainabilityLead";
    }
    return "?";
}

std::optional<Role> parse_role(std::string_view text) {
    for (Role r : kAllRoles) {
        if (to_string(r) == text) {
            return r;
        }
    }
    return std::nullopt;
}

}  // namespace circuloop
