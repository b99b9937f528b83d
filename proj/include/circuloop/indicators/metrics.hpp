#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circuloop/core/ratio.hpp"
#include "circuloop/indicators/emission_factors.hpp"
#include "circuloop/inventory/warehouse.hpp"
#include "circuloop/workflow/types.hpp"

namespace circuloop::indicators {

/// Returned units over units intended for reuse (dispatched minus consumed).
/// UndefinedRate when nothing was intended for reuse.
Ratio recovery_rate(std::int64_t returned, std::int64_t intended_for_reuse);

struct SurveyBatch {
    std::string indicator;
    std::vector<int> ratings;  // each 1..5
    std::optional<double> absolute_score{};  // reported as given, never derived

    std::size_t n() const { return ratings.size(); }
};

/// Mean rating divided by five; report with `.rounded(2)`.
Ratio improvement_ratio(const SurveyBatch& batch);

/// Reads `indicator,ratings[,absolute_score]` rows; ratings are space separated.
std::vector<SurveyBatch> parse_survey_csv(std::string_view text);

/// selected / n as a percentage rounded to one decimal.
double selection_share(std::int64_t selected, std::int64_t n);

/// Creation to reconciliation, in hours rounded to one decimal.
double cycle_time_hours(const workflow::ProjectList& list);

struct AuditLine {
    std::string label;
    std::int64_t counted = 0;
};

struct Discrepancy {
    std::string label;
    std::int64_t counted = 0;
    std::int64_t on_hand = 0;

    bool operator==(const Discrepancy&) const = default;
};

struct AuditResult {
    Ratio accuracy;
    std::vector<Discrepancy> discrepancies;  // audit order; never corrected automatically
};

AuditResult inventory_accuracy(std::span<const AuditLine> audit, const inventory::Warehouse& warehouse);

struct ReturnedLine {
    inventory::Category category = inventory::Category::EventProps;
    std::string material;
    std::int64_t quantity = 0;
};

struct CarbonBreakdown {
    double total_kg = 0.0;
    std::map<inventory::Category, double> per_category_kg;
    std::string factor_source;
    std::string factor_version;
};

/// Sum over returned lines of quantity x factor(category, material).
CarbonBreakdown carbon_avoided(std::span<const ReturnedLine> lines, const EmissionFactorTable& factors);

/// Returned-and-restocked lines of a list, resolved against the warehouse.
std::vector<ReturnedLine> returned_lines(const workflow::ProjectList& list, const inventory::Warehouse& warehouse);

/// Item labels dispatched by `scope` lists that went out on at least two
/// distinct reconciled lists.
std::int64_t redeployment_count(std::span<const workflow::ProjectList* const> scope,
                                std::span<const workflow::ProjectList* const> reconciled);

}  // namespace circuloop::indicators
