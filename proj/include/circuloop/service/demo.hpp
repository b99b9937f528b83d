#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "circuloop/inventory/types.hpp"
#include "circuloop/materials/catalogue.hpp"
#include "circuloop/service/platform.hpp"

namespace circuloop::service {

/// Demonstration data: a 1,380-item inventory, a 50-row materials catalogue,
/// an illustrative emission-factor table, and the single-project journey
/// (394 units out; 190 consumed, 198 restocked, 6 left on site).

inline constexpr const char* kCaseStudyListId = "demo-4_3";
inline constexpr std::size_t kDemoInventorySize = 1380;

struct CaseStudyLine {
    const char* label;
    const char* name;
    inventory::Category category;
    const char* material;
    std::int64_t consumed;
    std::int64_t returned;
    std::int64_t temp_stored;

    std::int64_t dispatched() const { return consumed + returned + temp_stored; }
};

std::span<const CaseStudyLine> case_study_lines();

/// Stock records for the case-study labels (dispatched quantity plus spare).
std::vector<inventory::ItemDraft> case_study_items();

/// Deterministic inventory across all seven categories, case-study items included.
std::vector<inventory::ItemDraft> demo_inventory(std::uint32_t seed = 2025);

std::vector<materials::Material> demo_materials(std::uint32_t seed = 2025);

/// Illustrative factors only; they are not published values.
std::string demo_factors_csv();

/// Rating vectors (n = 10) whose ratios match the evaluation table, with its absolute scores.
std::string demo_survey_csv();

struct CaseStudyOptions {
    std::string list_id = kCaseStudyListId;
    Actor lead{Role::ProjectLead, "lead"};
    Actor admin{Role::WarehouseAdministrator, "warehouse"};
    /// Called after each milestone, e.g. to advance a manual clock.
    std::function<void(workflow::ListState)> after_step;
};

/// Registers any missing case-study items.
void ensure_case_study_stock(Platform& platform, const Actor& admin);

/// Create, approve, pick, pack, dispatch, receive, close, disposition and
/// reconcile the case-study list. Returns the reconciled list.
workflow::ProjectList run_case_study(Platform& platform, const CaseStudyOptions& options = {});

}  // namespace circuloop::service
