#include "circuloop/indicators/report.hpp"

#include <set>
#include <sstream>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"

namespace circuloop::indicators {

namespace {

using workflow::Disposition;
using workflow::ListState;
using workflow::ProjectList;
using Json = nlohmann::json;

std::optional<Ratio> rate(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return Ratio{num, den};
}

struct EndOfUse {
    std::int64_t recycled = 0;
    std::int64_t retired = 0;
};

// RouteRecycle / Retire events within [from, to], optionally restricted to labels.
EndOfUse end_of_use(const inventory::Warehouse& warehouse, Timestamp from, Timestamp to,
                    const std::set<std::string>* labels) {
    EndOfUse out;
    for (const auto& e : warehouse.ledger()) {
        if (e.timestamp < from || e.timestamp > to) continue;
        if (labels && !labels->count(e.item_label)) continue;
        if (e.kind == inventory::EventKind::RouteRecycle) out.recycled += e.quantity;
        if (e.kind == inventory::EventKind::Retire) out.retired += e.quantity;
    }
    return out;
}

void require_reconciled(const ProjectList& list) {
    if (list.state != ListState::Reconciled) {
        fail(ErrorCode::NotReconciled, "list " + list.list_id + " is not reconciled");
    }
}

// Shared aggregation over the scope; recycle counts are supplied by the caller.
IndicatorReport aggregate(std::span<const ProjectList* const> scope, const ReportContext& ctx, EndOfUse eou) {
    IndicatorReport r;
    std::int64_t requested = 0;
    std::int64_t stock_sourced = 0;
    std::int64_t purchase_units = 0;
    std::vector<ReturnedLine> returned;
    for (const auto* list : scope) {
        r.list_ids.push_back(list->list_id);
        r.dispatched_units += list->dispatched_units();
        r.consumed_units += list->disposed_units(Disposition::ConsumedOrDamaged);
        r.returned_units += list->disposed_units(Disposition::ReturnedRestocked);
        r.temp_stored_units += list->disposed_units(Disposition::TemporarilyStored);
        r.refuse_count += static_cast<std::int64_t>(list->substituted_lines());
        r.purchase_lines += static_cast<std::int64_t>(list->purchase_lines());
        for (const auto& line : list->lines) {
            requested += line.quantity_requested;
            if (line.from_stock()) {
                stock_sourced += line.quantity_requested;
            } else {
                purchase_units += line.quantity_requested;
            }
        }
        auto lines = returned_lines(*list, ctx.warehouse);
        returned.insert(returned.end(), lines.begin(), lines.end());
    }
    r.intended_for_reuse = r.dispatched_units - r.consumed_units;
    r.recovery_rate = rate(r.returned_units, r.intended_for_reuse);
    r.reuse_sourcing_rate = rate(stock_sourced, requested);
    r.loss_damage_rate = rate(r.consumed_units, r.dispatched_units);
    r.recycle_rate = rate(eou.recycled, eou.recycled + eou.retired);
    r.inventory_accuracy = ctx.latest_audit_accuracy;
    r.carbon = carbon_avoided(returned, ctx.factors);

    auto& f = r.four_r;
    f.refuse.substitutions = r.refuse_count;
    f.refuse.purchase_lines = r.purchase_lines;
    f.refuse.requested_units = requested;
    f.refuse.purchase_units = purchase_units;
    f.refuse.purchase_lines_avoided = rate(r.refuse_count, r.refuse_count + r.purchase_lines);
    f.reduce.loss_damage_rate = r.loss_damage_rate;
    f.reduce.consumed_units = r.consumed_units;
    f.reuse.recovery_rate = r.recovery_rate;
    f.reuse.reuse_sourcing_rate = r.reuse_sourcing_rate;
    f.reuse.redeployment_count = redeployment_count(scope, ctx.reconciled);
    f.recycle.recycle_rate = r.recycle_rate;
    f.recycle.recycled_units = eou.recycled;
    f.recycle.end_of_use_units = eou.recycled + eou.retired;
    return r;
}

std::set<std::string> labels_of(const ProjectList& list) {
    std::set<std::string> labels;
    for (const auto& line : list.lines) labels.insert(line.item_label);
    return labels;
}

Json ratio_json(const std::optional<Ratio>& r) { return r ? Json(r->rounded(4)) : Json(); }

Json exact_json(const std::optional<Ratio>& r) {
    return r ? Json{{"numerator", r->numerator}, {"denominator", r->denominator}} : Json();
}

std::string csv_ratio(const std::optional<Ratio>& r) { return r ? Json(r->rounded(4)).dump() : std::string(); }

}  // namespace

IndicatorReport project_report(const ProjectList& list, const ReportContext& ctx) {
    require_reconciled(list);
    auto labels = labels_of(list);
    auto reconciled_at = *list.reached_at(ListState::Reconciled);
    const ProjectList* scope[] = {&list};
    auto r = aggregate(scope, ctx, end_of_use(ctx.warehouse, list.created_at(), reconciled_at, &labels));
    r.scope_kind = "project";
    r.scope_id = list.list_id;
    r.cycle_time_hours = cycle_time_hours(list);
    return r;
}

IndicatorReport period_report(Timestamp from, Timestamp to, const ReportContext& ctx) {
    std::vector<const ProjectList*> scope;
    for (const auto* list : ctx.reconciled) {
        auto at = list->reached_at(ListState::Reconciled);
        if (at && *at >= from && *at <= to) scope.push_back(list);
    }
    if (scope.empty()) {
        fail(ErrorCode::EmptyScope, "no lists were reconciled between " + from.to_iso8601() + " and " +
                                        to.to_iso8601());
    }
    auto r = aggregate(scope, ctx, end_of_use(ctx.warehouse, from, to, nullptr));
    r.scope_kind = "period";
    r.scope_id = from.to_iso8601() + "/" + to.to_iso8601();
    std::int64_t total_ms = 0;
    for (const auto* list : scope) {
        total_ms += list->reached_at(ListState::Reconciled)->millis - list->created_at().millis;
    }
    r.cycle_time_hours =
        Ratio{total_ms, 3'600'000 * static_cast<std::int64_t>(scope.size())}.rounded(1);
    return r;
}

FourRReport four_r_report(std::span<const ProjectList* const> scope, const ReportContext& ctx) {
    if (scope.empty()) fail(ErrorCode::EmptyScope, "4R report needs at least one reconciled list");
    std::set<std::string> labels;
    Timestamp from = scope.front()->created_at();
    Timestamp to = from;
    for (const auto* list : scope) {
        require_reconciled(*list);
        auto l = labels_of(*list);
        labels.insert(l.begin(), l.end());
        from = std::min(from, list->created_at());
        to = std::max(to, *list->reached_at(ListState::Reconciled));
    }
    return aggregate(scope, ctx, end_of_use(ctx.warehouse, from, to, &labels)).four_r;
}

nlohmann::json to_json(const FourRReport& f) {
    return Json{
        {"refuse",
         {{"substitutions", f.refuse.substitutions},
          {"purchase_lines", f.refuse.purchase_lines},
          {"requested_units", f.refuse.requested_units},
          {"purchase_units", f.refuse.purchase_units},
          {"purchase_lines_avoided_ratio", ratio_json(f.refuse.purchase_lines_avoided)}}},
        {"reduce",
         {{"loss_damage_rate", ratio_json(f.reduce.loss_damage_rate)},
          {"consumed_units", f.reduce.consumed_units},
          {"direction", "lower_is_better"}}},
        {"reuse",
         {{"recovery_rate", ratio_json(f.reuse.recovery_rate)},
          {"reuse_sourcing_rate", ratio_json(f.reuse.reuse_sourcing_rate)},
          {"redeployment_count", f.reuse.redeployment_count}}},
        {"recycle",
         {{"recycle_rate", ratio_json(f.recycle.recycle_rate)},
          {"recycled_units", f.recycle.recycled_units},
          {"end_of_use_units", f.recycle.end_of_use_units}}},
    };
}

nlohmann::json to_json(const IndicatorReport& r) {
    Json per_category = Json::object();
    for (const auto& [category, kg] : r.carbon.per_category_kg) {
        per_category[std::string(inventory::to_string(category))] = kg;
    }
    return Json{
        {"schema", kReportSchema},
        {"scope", {{"kind", r.scope_kind}, {"id", r.scope_id}, {"lists", r.list_ids}}},
        {"dispatched_units", r.dispatched_units},
        {"consumed_units", r.consumed_units},
        {"returned_units", r.returned_units},
        {"temp_stored_units", r.temp_stored_units},
        {"intended_for_reuse", r.intended_for_reuse},
        {"recovery_rate", ratio_json(r.recovery_rate)},
        {"reuse_sourcing_rate", ratio_json(r.reuse_sourcing_rate)},
        {"refuse_count", r.refuse_count},
        {"purchase_lines", r.purchase_lines},
        {"loss_damage_rate", ratio_json(r.loss_damage_rate)},
        {"recycle_rate", ratio_json(r.recycle_rate)},
        {"cycle_time_hours", r.cycle_time_hours ? Json(*r.cycle_time_hours) : Json()},
        {"inventory_accuracy", ratio_json(r.inventory_accuracy)},
        {"carbon_avoided_kg", r.carbon.total_kg},
        {"carbon",
         {{"per_category_kg", std::move(per_category)},
          {"factor_source", r.carbon.factor_source},
          {"factor_version", r.carbon.factor_version}}},
        {"four_r", to_json(r.four_r)},
        {"exact",
         {{"recovery_rate", exact_json(r.recovery_rate)},
          {"reuse_sourcing_rate", exact_json(r.reuse_sourcing_rate)},
          {"loss_damage_rate", exact_json(r.loss_damage_rate)},
          {"recycle_rate", exact_json(r.recycle_rate)},
          {"inventory_accuracy", exact_json(r.inventory_accuracy)}}},
    };
}

std::string to_csv(const IndicatorReport& r) {
    std::ostringstream out;
    out << "schema,scope_kind,scope_id,dispatched_units,consumed_units,returned_units,temp_stored_units,"
           "intended_for_reuse,recovery_rate,reuse_sourcing_rate,refuse_count,purchase_lines,loss_damage_rate,"
           "recycle_rate,cycle_time_hours,inventory_accuracy,carbon_avoided_kg,factor_version\n";
    out << kReportSchema << ',' << csv::escape(r.scope_kind) << ',' << csv::escape(r.scope_id) << ','
        << r.dispatched_units << ',' << r.consumed_units << ',' << r.returned_units << ',' << r.temp_stored_units
        << ',' << r.intended_for_reuse << ',' << csv_ratio(r.recovery_rate) << ','
        << csv_ratio(r.reuse_sourcing_rate) << ',' << r.refuse_count << ',' << r.purchase_lines << ','
        << csv_ratio(r.loss_damage_rate) << ',' << csv_ratio(r.recycle_rate) << ','
        << (r.cycle_time_hours ? Json(*r.cycle_time_hours).dump() : std::string()) << ','
        << csv_ratio(r.inventory_accuracy) << ',' << Json(r.carbon.total_kg).dump() << ','
        << csv::escape(r.carbon.factor_version) << '\n';
    return out.str();
}

}  // namespace circuloop::indicators
