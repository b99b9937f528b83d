#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "circuloop/inventory/types.hpp"

namespace circuloop::inventory {

/// Parses the bootstrap item CSV:
///   label,name,category,material,quantity,condition,remaining_lifespan,
///   expiry_date,embodied_carbon_per_unit,location[,value_class]
/// Empty fields are absent. Errors name the offending line (ParseError) or
/// the repeated label (DuplicateLabel).
std::vector<ItemDraft> parse_item_csv(std::string_view text);

/// Writes drafts in the same format, value_class column included.
std::string to_item_csv(const std::vector<ItemDraft>& drafts);

}  // namespace circuloop::inventory
