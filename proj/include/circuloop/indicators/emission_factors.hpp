#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "circuloop/inventory/types.hpp"

namespace circuloop::indicators {

/// kg CO2e per unit by (category, material class). A row with material `*`
/// is the category default used when no exact material row exists.
///
/// CSV form:
///
///     # source = demo factors
///     # version = demo-2025.1
///     category,material,kg_co2e_per_unit
///     EventProps,wood-based,18
///     EventProps,*,10
class EmissionFactorTable {
public:
    static EmissionFactorTable parse_csv(std::string_view text);

    void set(inventory::Category category, std::string material, double kg_per_unit);

    /// Exact row, else the category default; MissingFactor when neither exists.
    double factor(inventory::Category category, std::string_view material) const;
    std::optional<double> find(inventory::Category category, std::string_view material) const;

    const std::string& source() const { return source_; }
    const std::string& version() const { return version_; }
    void set_metadata(std::string source, std::string version) {
        source_ = std::move(source);
        version_ = std::move(version);
    }
    std::size_t size() const { return factors_.size(); }

private:
    std::map<std::pair<inventory::Category, std::string>, double, std::less<>> factors_;
    std::string source_ = "unspecified";
    std::string version_ = "unversioned";
};

}  // namespace circuloop::indicators
