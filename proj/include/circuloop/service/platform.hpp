#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circuloop/core/append_file.hpp"
#include "circuloop/indicators/emission_factors.hpp"
#include "circuloop/indicators/report.hpp"
#include "circuloop/inventory/event_log.hpp"
#include "circuloop/inventory/warehouse.hpp"
#include "circuloop/materials/catalogue.hpp"
#include "circuloop/service/config.hpp"
#include "circuloop/workflow/engine.hpp"

namespace circuloop::service {

using Json = nlohmann::json;

struct PlatformOptions {
    /// Directory holding the ledger, journal, catalogue and snapshots;
    /// nothing is persisted when absent.
    std::optional<std::filesystem::path> data_dir;
    workflow::PermissionMatrix matrix = workflow::PermissionMatrix::defaults();
    workflow::WorkflowSettings workflow;
    indicators::EmissionFactorTable factors;
    materials::ScoringWeights scoring;
    Clock clock = system_clock();
    std::int64_t snapshot_interval = 0;  // 0: snapshots only on `checkpoint`
};

/// Options built from a validated ServiceConfig (reads the referenced files).
PlatformOptions options_from_config(const ServiceConfig& config, Clock clock = system_clock());

struct RecoveryReport {
    std::int64_t events_replayed = 0;
    std::int64_t journal_records = 0;
    std::int64_t repaired_events = 0;  // effects re-appended for the last journal record
    std::size_t truncated_bytes = 0;   // torn tail dropped from either log
};

struct VerifyReport {
    std::int64_t events = 0;
    std::int64_t journal_records = 0;
    std::optional<std::int64_t> snapshot_offset;  // newest snapshot checked
    std::size_t snapshots_checked = 0;
};

struct AuditRecord {
    Timestamp timestamp;
    std::string actor_id;
    Ratio accuracy;
    std::vector<indicators::Discrepancy> discrepancies;
};

/// The whole service state behind one lock: the warehouse fold, the
/// workflow engine, the materials catalogue, and the files they persist to.
///
/// Every mutation validates first, then writes the workflow journal record,
/// then the ledger batch, then makes both visible. Reads take a shared lock.
/// Opening a data directory replays both logs; when the process stopped
/// between the journal write and the ledger write, the missing ledger events
/// are re-derived from the journal and appended.
class Platform {
public:
    explicit Platform(PlatformOptions options);
    ~Platform();

    Platform(const Platform&) = delete;
    Platform& operator=(const Platform&) = delete;

    const RecoveryReport& recovery() const { return recovery_; }

    // ---- inventory -----------------------------------------------------

    /// Direct ledger events, gated by the matrix `event:` grants.
    std::vector<inventory::MovementEvent> record_events(std::span<const inventory::EventDraft> drafts);
    inventory::ItemRecord register_item(const inventory::ItemDraft& draft, const Actor& actor);
    /// All rows or none. Returns the number registered.
    std::size_t import_items(std::string_view csv_text, const Actor& actor);
    inventory::ItemRecord update_metadata(std::string_view label, const inventory::MetadataPatch& patch,
                                          const Actor& actor, std::optional<std::int64_t> expected_version);

    inventory::ItemRecord item(std::string_view label) const;
    std::vector<inventory::ItemRecord> items(const inventory::ItemFilter& filter, inventory::Page page = {}) const;
    std::vector<inventory::MovementEvent> events(std::int64_t after_offset, std::size_t limit) const;
    inventory::StockSnapshot stock_snapshot() const;

    // ---- workflow --------------------------------------------------------

    workflow::ProjectList create_list(const workflow::OutboundRequest& request, const Actor& actor);
    workflow::ProjectList add_line(std::string_view list_id, const workflow::LineRequest& line, const Actor& actor);
    workflow::ProjectList substitute_line(std::string_view list_id, std::string_view purchase_label,
                                          std::string_view stock_label, const Actor& actor);
    workflow::ProjectList transition(std::string_view list_id, workflow::ListState target, const Actor& actor,
                                     const workflow::TransitionOptions& options = {});
    workflow::ProjectList record_disposition(std::string_view list_id, std::string_view item_label,
                                             workflow::Disposition disposition, std::int64_t quantity,
                                             const Actor& actor);
    /// Completeness check, then freezes the project report into the journal.
    workflow::ProjectList reconcile(std::string_view list_id, const Actor& actor,
                                    std::optional<std::int64_t> expected_version = std::nullopt);
    workflow::ProjectList link_material(std::string_view list_id, std::string_view material_id,
                                        std::string_view note, const Actor& actor);
    void acknowledge(std::string_view notification_id, const Actor& actor);

    workflow::ProjectList list(std::string_view list_id) const;
    std::vector<workflow::ProjectList> lists() const;
    Json export_list(std::string_view list_id) const;
    std::vector<workflow::Notification> notifications(Role role) const;

    // ---- indicators --------------------------------------------------------

    indicators::IndicatorReport project_report(std::string_view list_id) const;
    indicators::IndicatorReport period_report(Timestamp from, Timestamp to) const;
    indicators::FourRReport four_r_report(std::span<const std::string> list_ids) const;
    /// Records a cycle count (action `record_audit`); discrepancies are reported, not corrected.
    AuditRecord record_audit(std::span<const indicators::AuditLine> lines, const Actor& actor);
    std::optional<AuditRecord> latest_audit() const;

    // ---- materials ---------------------------------------------------------

    std::vector<materials::ScoredMaterial> search_materials(const materials::MaterialQuery& query) const;
    materials::Material material(std::string_view material_id) const;
    std::vector<materials::Material> all_materials() const;
    /// Action `import_materials`. Returns inserted + updated rows.
    std::size_t import_materials(std::string_view csv_text, const Actor& actor);
    /// ReferencedEntity while any list links the material.
    void delete_material(std::string_view material_id, const Actor& actor);

    // ---- durability ----------------------------------------------------------

    /// Writes a snapshot file for the current ledger position.
    std::optional<std::filesystem::path> checkpoint();

    /// Full-state JSON (warehouse and lists) as written to snapshot files.
    Json state_json() const;

    /// Re-reads the data directory, folds both logs from scratch, compares the
    /// result with every snapshot file and with the live state. Throws
    /// CorruptLogError naming the offending offset and sequence.
    static VerifyReport verify(const std::filesystem::path& data_dir, const PlatformOptions& options,
                               const Platform* live = nullptr);

    const PlatformOptions& options() const { return options_; }
    std::int64_t ledger_offset() const;
    std::int64_t journal_seq() const;

private:
    struct Files;

    Timestamp now() const { return options_.clock(); }
    void recover();
    void commit(workflow::Decision decision);
    std::vector<inventory::MovementEvent> commit_events(std::span<const inventory::EventDraft> drafts);
    indicators::ReportContext report_context(std::vector<const workflow::ProjectList*>& reconciled) const;
    void maybe_snapshot();
    std::optional<std::filesystem::path> write_snapshot();
    void save_materials(const materials::Catalogue& catalogue);
    void require_writable() const;

    PlatformOptions options_;
    mutable std::shared_mutex mutex_;
    inventory::Warehouse warehouse_;
    workflow::WorkflowEngine engine_;
    materials::Catalogue catalogue_;
    std::vector<AuditRecord> audits_;
    std::unique_ptr<Files> files_;
    RecoveryReport recovery_;
    std::int64_t last_snapshot_offset_ = -1;
    std::int64_t last_snapshot_seq_ = -1;
    bool storage_failed_ = false;
};

Json to_json(const AuditRecord& audit);
AuditRecord audit_from_json(const Json& j);

}  // namespace circuloop::service
