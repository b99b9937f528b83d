#include "circuloop/inventory/bootstrap.hpp"

#include <charconv>
#include <set>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"

namespace circuloop::inventory {

namespace {

[[noreturn]] void row_error(const csv::Row& row, const std::string& what) {
    fail(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": " + what);
}

std::int64_t parse_count(const csv::Row& row, const std::string& text, const char* column, std::int64_t fallback) {
    if (text.empty()) return fallback;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        row_error(row, std::string(column) + " is not an integer: '" + text + "'");
    }
    if (v < 0) row_error(row, std::string(column) + " must not be negative");
    return v;
}

double parse_real(const csv::Row& row, const std::string& text, const char* column) {
    if (text.empty()) return 0.0;
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        if (v < 0.0) row_error(row, std::string(column) + " must not be negative");
        return v;
    } catch (const std::logic_error&) {
        row_error(row, std::string(column) + " is not a number: '" + text + "'");
    }
}

}  // namespace

std::vector<ItemDraft> parse_item_csv(std::string_view text) {
    auto rows = csv::read_all(text);
    if (rows.empty()) fail(ErrorCode::ParseError, "line 1: missing header");
    csv::Header header(rows.front(), {"label", "name", "category", "material", "quantity", "condition",
                                      "remaining_lifespan", "expiry_date", "embodied_carbon_per_unit", "location"});
    bool has_value_class = header.find("value_class").has_value();

    std::vector<ItemDraft> drafts;
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        ItemDraft d;
        d.label = header.get(row, "label");
        if (d.label.empty()) row_error(row, "label is empty");
        d.name = header.get(row, "name");
        auto category = parse_category(header.get(row, "category"));
        if (!category) row_error(row, "unknown category '" + header.get(row, "category") + "'");
        d.category = *category;
        d.material = header.get(row, "material");
        d.quantity = parse_count(row, header.get(row, "quantity"), "quantity", 0);
        const auto& grade = header.get(row, "condition");
        if (!grade.empty()) {
            auto g = parse_condition(grade);
            if (!g) row_error(row, "unknown condition grade '" + grade + "'");
            d.condition = *g;
        }
        d.remaining_lifespan = parse_count(row, header.get(row, "remaining_lifespan"), "remaining_lifespan", 1);
        const auto& expiry = header.get(row, "expiry_date");
        if (!expiry.empty()) {
            try {
                d.expiry_date = Date::parse(expiry);
            } catch (const DomainError& e) {
                row_error(row, e.what());
            }
        }
        d.embodied_carbon_per_unit =
            parse_real(row, header.get(row, "embodied_carbon_per_unit"), "embodied_carbon_per_unit");
        d.location = header.get(row, "location");
        if (has_value_class) {
            d.value_class = static_cast<int>(parse_count(row, header.get(row, "value_class"), "value_class", 0));
        }
        if (!seen.insert(d.label).second) {
            fail(ErrorCode::DuplicateLabel, "line " + std::to_string(row.line) + ": label " + d.label +
                                                " appears more than once");
        }
        drafts.push_back(std::move(d));
    }
    return drafts;
}

std::string to_item_csv(const std::vector<ItemDraft>& drafts) {
    std::string out =
        "label,name,category,material,quantity,condition,remaining_lifespan,expiry_date,embodied_carbon_per_unit,"
        "location,value_class\n";
    for (const auto& d : drafts) {
        out += csv::escape(d.label) + ',' + csv::escape(d.name) + ',' + std::string(to_string(d.category)) + ',' +
               csv::escape(d.material) + ',' + std::to_string(d.quantity) + ',' + std::string(to_string(d.condition)) +
               ',' + std::to_string(d.remaining_lifespan) + ',' + (d.expiry_date ? d.expiry_date->to_string() : "") +
               ',' + nlohmann::json(d.embodied_carbon_per_unit).dump() + ',' + csv::escape(d.location) + ',' +
               std::to_string(d.value_class) + '\n';
    }
    return out;
}

}  // namespace circuloop::inventory
