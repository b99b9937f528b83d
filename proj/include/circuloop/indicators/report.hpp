#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "circuloop/core/ratio.hpp"
#include "circuloop/core/time.hpp"
#include "circuloop/indicators/metrics.hpp"

namespace circuloop::indicators {

inline constexpr int kReportSchema = 1;

struct FourRReport {
    struct Refuse {
        std::int64_t substitutions = 0;
        std::int64_t purchase_lines = 0;
        std::int64_t requested_units = 0;
        std::int64_t purchase_units = 0;
        std::optional<Ratio> purchase_lines_avoided;  // substitutions / (substitutions + purchase lines)
    } refuse;
    struct Reduce {
        std::optional<Ratio> loss_damage_rate;  // lower is better
        std::int64_t consumed_units = 0;
    } reduce;
    struct Reuse {
        std::optional<Ratio> recovery_rate;
        std::optional<Ratio> reuse_sourcing_rate;
        std::int64_t redeployment_count = 0;
    } reuse;
    struct Recycle {
        std::optional<Ratio> recycle_rate;
        std::int64_t recycled_units = 0;
        std::int64_t end_of_use_units = 0;
    } recycle;
};

struct IndicatorReport {
    std::string scope_kind;  // "project" or "period"
    std::string scope_id;    // list id, or "<from>/<to>"
    std::vector<std::string> list_ids;

    std::int64_t dispatched_units = 0;
    std::int64_t consumed_units = 0;
    std::int64_t returned_units = 0;
    std::int64_t temp_stored_units = 0;
    std::int64_t intended_for_reuse = 0;

    std::optional<Ratio> recovery_rate;
    std::optional<Ratio> reuse_sourcing_rate;
    std::int64_t refuse_count = 0;
    std::int64_t purchase_lines = 0;
    std::optional<Ratio> loss_damage_rate;
    std::optional<Ratio> recycle_rate;
    std::optional<double> cycle_time_hours;
    std::optional<Ratio> inventory_accuracy;
    CarbonBreakdown carbon;
    FourRReport four_r;
};

/// Everything the report needs besides the lists in scope.
struct ReportContext {
    const inventory::Warehouse& warehouse;
    const EmissionFactorTable& factors;
    /// All reconciled lists known at evaluation time (for redeployment).
    std::span<const workflow::ProjectList* const> reconciled;
    std::optional<Ratio> latest_audit_accuracy;
};

/// Report for one reconciled list. NotReconciled otherwise.
IndicatorReport project_report(const workflow::ProjectList& list, const ReportContext& ctx);

/// Aggregate over lists reconciled within [from, to]. EmptyScope when none.
IndicatorReport period_report(Timestamp from, Timestamp to, const ReportContext& ctx);

/// The four-R breakdown for a set of reconciled lists. EmptyScope when empty.
FourRReport four_r_report(std::span<const workflow::ProjectList* const> scope, const ReportContext& ctx);

nlohmann::json to_json(const IndicatorReport& report);
nlohmann::json to_json(const FourRReport& report);

/// Flat CSV: header row plus one data row, stable column order.
std::string to_csv(const IndicatorReport& report);

}  // namespace circuloop::indicators
