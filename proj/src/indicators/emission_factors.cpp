#include "circuloop/indicators/emission_factors.hpp"

#include <cmath>
#include <sstream>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"

namespace circuloop::indicators {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

EmissionFactorTable EmissionFactorTable::parse_csv(std::string_view text) {
    EmissionFactorTable table;

    // Leading "# key = value" lines carry metadata; strip all comment lines
    // but keep line numbering intact for error messages.
    std::string body;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty() && t.front() == '#') {
            auto eq = t.find('=');
            if (eq != std::string::npos) {
                auto key = trim(std::string_view(t).substr(1, eq - 1));
                auto value = trim(std::string_view(t).substr(eq + 1));
                if (key == "source") table.source_ = value;
                if (key == "version") table.version_ = value;
            }
            body += '\n';
            continue;
        }
        body += line;
        body += '\n';
    }

    auto rows = csv::read_all(body);
    if (rows.empty()) fail(ErrorCode::ParseError, "factor table has no header");
    csv::Header header(rows.front(), {"category", "material", "kg_co2e_per_unit"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto where = "line " + std::to_string(row.line) + ": ";
        auto category = inventory::parse_category(trim(header.get(row, "category")));
        if (!category) fail(ErrorCode::ParseError, where + "unknown category '" + header.get(row, "category") + "'");
        auto material = trim(header.get(row, "material"));
        if (material.empty()) fail(ErrorCode::ParseError, where + "material is empty (use * for the default)");
        double value = 0.0;
        try {
            std::size_t used = 0;
            auto raw = trim(header.get(row, "kg_co2e_per_unit"));
            value = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
        } catch (const std::logic_error&) {
            fail(ErrorCode::ParseError, where + "kg_co2e_per_unit is not a number");
        }
        if (!std::isfinite(value) || value < 0.0) {
            fail(ErrorCode::ParseError, where + "kg_co2e_per_unit must be a non-negative number");
        }
        if (table.factors_.count({*category, material})) {
            fail(ErrorCode::DuplicateInFile, where + "duplicate factor for " +
                                                 std::string(inventory::to_string(*category)) + "/" + material);
        }
        table.factors_[{*category, material}] = value;
    }
    return table;
}

void EmissionFactorTable::set(inventory::Category category, std::string material, double kg_per_unit) {
    if (!std::isfinite(kg_per_unit) || kg_per_unit < 0.0) {
        fail(ErrorCode::Validation, "emission factors must be non-negative");
    }
    factors_[{category, std::move(material)}] = kg_per_unit;
}

std::optional<double> EmissionFactorTable::find(inventory::Category category, std::string_view material) const {
    if (auto it = factors_.find(std::pair{category, std::string(material)}); it != factors_.end()) {
        return it->second;
    }
    if (auto it = factors_.find(std::pair{category, std::string("*")}); it != factors_.end()) {
        return it->second;
    }
    return std::nullopt;
}

double EmissionFactorTable::factor(inventory::Category category, std::string_view material) const {
    auto f = find(category, material);
    if (!f) {
        fail(ErrorCode::MissingFactor, "no emission factor for " + std::string(inventory::to_string(category)) + "/" +
                                           std::string(material) + " and no category default");
    }
    return *f;
}

}  // namespace circuloop::indicators
