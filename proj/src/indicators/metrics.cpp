#include "circuloop/indicators/metrics.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"

namespace circuloop::indicators {

Ratio recovery_rate(std::int64_t returned, std::int64_t intended_for_reuse) {
    if (returned < 0 || intended_for_reuse < 0) {
        fail(ErrorCode::InvalidCounts, "recovery counts must not be negative");
    }
    if (intended_for_reuse == 0) {
        fail(ErrorCode::UndefinedRate, "no units were intended for reuse");
    }
    if (returned > intended_for_reuse) {
        fail(ErrorCode::InvalidCounts, "returned units exceed units intended for reuse");
    }
    return Ratio{returned, intended_for_reuse};
}

Ratio improvement_ratio(const SurveyBatch& batch) {
    if (batch.ratings.empty()) fail(ErrorCode::EmptyBatch, "survey batch '" + batch.indicator + "' has no ratings");
    std::int64_t sum = 0;
    for (int r : batch.ratings) {
        if (r < 1 || r > 5) {
            fail(ErrorCode::OutOfRangeRating, "rating " + std::to_string(r) + " is outside 1..5");
        }
        sum += r;
    }
    return Ratio{sum, 5 * static_cast<std::int64_t>(batch.ratings.size())};
}

std::vector<SurveyBatch> parse_survey_csv(std::string_view text) {
    auto rows = csv::read_all(text);
    if (rows.empty()) fail(ErrorCode::ParseError, "survey file has no header");
    csv::Header header(rows.front(), {"indicator", "ratings"});
    std::vector<SurveyBatch> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto where = "line " + std::to_string(row.line) + ": ";
        SurveyBatch b;
        b.indicator = header.get(row, "indicator");
        if (b.indicator.empty()) fail(ErrorCode::ParseError, where + "indicator is empty");
        std::istringstream ratings(header.get(row, "ratings"));
        for (std::string token; ratings >> token;) {
            std::size_t used = 0;
            int r = 0;
            try {
                r = std::stoi(token, &used);
            } catch (const std::logic_error&) {
                used = 0;
            }
            if (used != token.size()) fail(ErrorCode::ParseError, where + "rating '" + token + "' is not an integer");
            b.ratings.push_back(r);
        }
        if (header.find("absolute_score")) {
            const auto& raw = header.get(row, "absolute_score");
            if (!raw.empty()) {
                std::size_t used = 0;
                double v = 0;
                try {
                    v = std::stod(raw, &used);
                } catch (const std::logic_error&) {
                    used = 0;
                }
                if (used != raw.size() || !std::isfinite(v)) {
                    fail(ErrorCode::ParseError, where + "absolute_score '" + raw + "' is not a number");
                }
                b.absolute_score = v;
            }
        }
        improvement_ratio(b);
        out.push_back(std::move(b));
    }
    return out;
}

double selection_share(std::int64_t selected, std::int64_t n) {
    if (n <= 0 || selected < 0 || selected > n) {
        fail(ErrorCode::InvalidCounts, "selection counts must satisfy 0 <= selected <= n, n > 0");
    }
    return Ratio{selected * 100, n}.rounded(1);
}

double cycle_time_hours(const workflow::ProjectList& list) {
    auto reconciled = list.reached_at(workflow::ListState::Reconciled);
    if (list.state != workflow::ListState::Reconciled || !reconciled) {
        fail(ErrorCode::NotReconciled, "list " + list.list_id + " is not reconciled");
    }
    std::int64_t ms = reconciled->millis - list.created_at().millis;
    return Ratio{ms, 3'600'000}.rounded(1);
}

AuditResult inventory_accuracy(std::span<const AuditLine> audit, const inventory::Warehouse& warehouse) {
    if (audit.empty()) fail(ErrorCode::Validation, "audit has no lines");
    AuditResult result;
    std::int64_t matching = 0;
    for (const auto& line : audit) {
        if (line.counted < 0) fail(ErrorCode::InvalidQuantity, "audit count for " + line.label + " is negative");
        const auto& item = warehouse.get(line.label);
        if (line.counted == item.quantity_on_hand()) {
            ++matching;
        } else {
            result.discrepancies.push_back({line.label, line.counted, item.quantity_on_hand()});
        }
    }
    result.accuracy = Ratio{matching, static_cast<std::int64_t>(audit.size())};
    return result;
}

CarbonBreakdown carbon_avoided(std::span<const ReturnedLine> lines, const EmissionFactorTable& factors) {
    CarbonBreakdown out;
    out.factor_source = factors.source();
    out.factor_version = factors.version();
    for (const auto& line : lines) {
        if (line.quantity < 0) fail(ErrorCode::InvalidQuantity, "returned quantity must not be negative");
        double kg = static_cast<double>(line.quantity) * factors.factor(line.category, line.material);
        out.per_category_kg[line.category] += kg;
    }
    // Summing per category in enum order keeps the total independent of line order.
    for (const auto& [category, kg] : out.per_category_kg) out.total_kg += kg;
    return out;
}

std::vector<ReturnedLine> returned_lines(const workflow::ProjectList& list, const inventory::Warehouse& warehouse) {
    std::vector<ReturnedLine> out;
    for (const auto& line : list.lines) {
        auto q = line.disposed(workflow::Disposition::ReturnedRestocked);
        if (q == 0) continue;
        const auto& item = warehouse.get(line.item_label);
        out.push_back({item.category, item.material, q});
    }
    return out;
}

std::int64_t redeployment_count(std::span<const workflow::ProjectList* const> scope,
                                std::span<const workflow::ProjectList* const> reconciled) {
    std::map<std::string, std::set<std::string>> lists_by_label;
    for (const auto* list : reconciled) {
        for (const auto& line : list->lines) {
            if (line.quantity_dispatched > 0) lists_by_label[line.item_label].insert(list->list_id);
        }
    }
    std::set<std::string> counted;
    for (const auto* list : scope) {
        for (const auto& line : list->lines) {
            if (line.quantity_dispatched == 0) continue;
            auto it = lists_by_label.find(line.item_label);
            if (it != lists_by_label.end() && it->second.size() >= 2) counted.insert(line.item_label);
        }
    }
    return static_cast<std::int64_t>(counted.size());
}

}  // namespace circuloop::indicators
