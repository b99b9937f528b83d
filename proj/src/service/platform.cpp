#include "circuloop/service/platform.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/bootstrap.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/workflow/codec.hpp"

namespace circuloop::service {

namespace fs = std::filesystem;
using inventory::EventDraft;
using inventory::EventKind;
using inventory::MovementEvent;
using inventory::Warehouse;
using workflow::ListState;
using workflow::ProjectList;
using workflow::WorkflowEngine;
using workflow::WorkflowEvent;

namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kJournalFile = "workflow.jsonl";
constexpr const char* kAuditFile = "audits.jsonl";
constexpr const char* kMaterialsFile = "materials.json";
constexpr const char* kSnapshotDir = "snapshots";

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::InvalidConfig, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string snapshot_name(std::int64_t offset, std::int64_t seq) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot-%012lld-%08lld.json", static_cast<long long>(offset),
                  static_cast<long long>(seq));
    return name;
}

struct SnapshotFile {
    fs::path path;
    std::int64_t offset = 0;
    std::int64_t seq = 0;
};

std::vector<SnapshotFile> list_snapshots(const fs::path& dir) {
    std::vector<SnapshotFile> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        long long offset = 0;
        long long seq = 0;
        auto name = entry.path().filename().string();
        if (std::sscanf(name.c_str(), "snapshot-%lld-%lld.json", &offset, &seq) == 2 &&
            entry.path().extension() == ".json") {
            out.push_back({entry.path(), offset, seq});
        }
    }
    std::sort(out.begin(), out.end(), [](const SnapshotFile& a, const SnapshotFile& b) {
        return std::tie(a.offset, a.seq) < std::tie(b.offset, b.seq);
    });
    return out;
}

Json compose_state(const Warehouse& warehouse, const WorkflowEngine& engine) {
    Json lists = Json::array();
    for (const auto& [id, list] : engine.lists()) lists.push_back(workflow::export_list(list));
    return Json{{"offset", warehouse.offset()},
                {"journal_seq", engine.last_seq()},
                {"warehouse", warehouse.state_json()},
                {"lists", std::move(lists)}};
}

WorkflowEvent decode_journal_line(const std::string& line, std::size_t index) {
    try {
        return workflow::decode_workflow_event(Json::parse(line));
    } catch (const Json::exception& e) {
        throw CorruptLogError("workflow journal line " + std::to_string(index + 1) + ": " + e.what(), 0,
                              static_cast<long long>(index + 1));
    } catch (const DomainError& e) {
        throw CorruptLogError("workflow journal line " + std::to_string(index + 1) + ": " + e.what(), 0,
                              static_cast<long long>(index + 1));
    }
}

void apply_journal(WorkflowEngine& engine, const WorkflowEvent& event, std::int64_t ledger_offset) {
    try {
        engine.apply(event);
    } catch (const CorruptLogError&) {
        throw;
    } catch (const DomainError& e) {
        throw CorruptLogError(std::string("workflow journal: ") + e.what(), ledger_offset, event.seq);
    }
}

std::map<std::string, std::size_t> count_causes(const Warehouse& warehouse) {
    std::map<std::string, std::size_t> out;
    for (const auto& e : warehouse.ledger()) {
        if (e.cause) ++out[*e.cause];
    }
    return out;
}

[[noreturn]] void missing_effects(const WorkflowEvent& event, std::size_t expected, std::size_t found,
                                  std::int64_t ledger_offset) {
    throw CorruptLogError("workflow record " + std::to_string(event.seq) + " (" + WorkflowEngine::cause_for(event) +
                              ") implies " + std::to_string(expected) + " ledger events, found " +
                              std::to_string(found),
                          ledger_offset, event.seq);
}

void require(bool allowed, const Actor& actor, const std::string& what) {
    if (!allowed) {
        fail(ErrorCode::Forbidden, std::string(to_string(actor.role)) + " may not " + what);
    }
}

}  // namespace

struct Platform::Files {
    explicit Files(const fs::path& dir)
        : dir(dir), events(dir / kEventsFile), journal(dir / kJournalFile), audits(dir / kAuditFile) {}

    fs::path dir;
    inventory::EventLog events;
    AppendOnlyFile journal;
    AppendOnlyFile audits;
};

PlatformOptions options_from_config(const ServiceConfig& config, Clock clock) {
    PlatformOptions o;
    o.data_dir = config.data_dir;
    if (config.permissions) o.matrix = workflow::PermissionMatrix::parse(read_text(*config.permissions));
    if (config.factors) o.factors = indicators::EmissionFactorTable::parse_csv(read_text(*config.factors));
    o.workflow.high_value_threshold = config.high_value_threshold;
    o.scoring = config.scoring;
    o.clock = std::move(clock);
    o.snapshot_interval = config.snapshot_interval;
    return o;
}

Platform::Platform(PlatformOptions options)
    : options_(std::move(options)), engine_(options_.matrix, options_.workflow) {
    recover();
}

Platform::~Platform() = default;

void Platform::recover() {
    if (!options_.data_dir) return;
    const fs::path& dir = *options_.data_dir;
    fs::create_directories(dir / kSnapshotDir);
    files_ = std::make_unique<Files>(dir);
    recovery_.truncated_bytes =
        files_->events.truncated_bytes() + files_->journal.truncated_bytes() + files_->audits.truncated_bytes();

    for (const auto& e : inventory::EventLog::read(files_->events.path())) warehouse_.apply_recorded(e);
    recovery_.events_replayed = warehouse_.offset();

    auto causes = count_causes(warehouse_);
    auto lines = AppendOnlyFile::read_lines(files_->journal.path());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto event = decode_journal_line(lines[i], i);
        auto effects = engine_.effects_of(event);
        auto found = causes[WorkflowEngine::cause_for(event)];
        if (found != effects.size()) {
            bool last = i + 1 == lines.size();
            if (!last || found != 0) missing_effects(event, effects.size(), found, warehouse_.offset());
            auto pending = warehouse_.prepare(effects, now());
            files_->events.append(pending.events);
            warehouse_.commit(std::move(pending));
            recovery_.repaired_events = static_cast<std::int64_t>(effects.size());
        }
        apply_journal(engine_, event, warehouse_.offset());
    }
    recovery_.journal_records = static_cast<std::int64_t>(lines.size());

    if (fs::exists(dir / kMaterialsFile)) {
        try {
            catalogue_ = materials::Catalogue::from_json(Json::parse(read_text(dir / kMaterialsFile)));
        } catch (const Json::exception& e) {
            fail(ErrorCode::CorruptLog, std::string("materials catalogue: ") + e.what());
        }
    }
    for (const auto& line : AppendOnlyFile::read_lines(files_->audits.path())) {
        try {
            audits_.push_back(audit_from_json(Json::parse(line)));
        } catch (const Json::exception& e) {
            fail(ErrorCode::CorruptLog, std::string("audit log: ") + e.what());
        }
    }
    auto snapshots = list_snapshots(dir / kSnapshotDir);
    if (!snapshots.empty()) {
        last_snapshot_offset_ = snapshots.back().offset;
        last_snapshot_seq_ = snapshots.back().seq;
    }
}

void Platform::require_writable() const {
    if (storage_failed_) {
        throw std::runtime_error("storage failed during an earlier write; restart the service to recover");
    }
}

void Platform::commit(workflow::Decision decision) {
    require_writable();
    auto pending = warehouse_.prepare(decision.effects, now());
    (void)engine_.preview(decision.event);
    if (files_) {
        files_->journal.append(workflow::encode_workflow_event(decision.event).dump());
        try {
            files_->events.append(pending.events);
        } catch (...) {
            storage_failed_ = true;
            throw;
        }
    }
    warehouse_.commit(std::move(pending));
    engine_.apply(decision.event);
    maybe_snapshot();
}

std::vector<MovementEvent> Platform::commit_events(std::span<const EventDraft> drafts) {
    require_writable();
    auto pending = warehouse_.prepare(drafts, now());
    if (files_) files_->events.append(pending.events);
    auto out = warehouse_.commit(std::move(pending));
    maybe_snapshot();
    return out;
}

// ---- inventory ---------------------------------------------------------------

std::vector<MovementEvent> Platform::record_events(std::span<const EventDraft> drafts) {
    if (drafts.empty()) fail(ErrorCode::Validation, "no events given");
    std::vector<EventDraft> copy(drafts.begin(), drafts.end());
    for (auto& d : copy) {
        require(options_.matrix.allows(d.kind, d.actor.role), d.actor,
                "record " + std::string(inventory::to_string(d.kind)) + " events");
        if (d.list_ref && d.kind != EventKind::Inspect) {
            fail(ErrorCode::Validation, std::string(inventory::to_string(d.kind)) +
                                            " against a list is driven by the project workflow");
        }
        d.cause.reset();
    }
    std::unique_lock lock(mutex_);
    return commit_events(copy);
}

inventory::ItemRecord Platform::register_item(const inventory::ItemDraft& draft, const Actor& actor) {
    EventDraft d;
    d.kind = EventKind::Register;
    d.item_label = draft.label;
    d.quantity = draft.quantity;
    d.actor = actor;
    d.payload = draft;
    record_events(std::span(&d, 1));
    return item(draft.label);
}

std::size_t Platform::import_items(std::string_view csv_text, const Actor& actor) {
    auto drafts = inventory::parse_item_csv(csv_text);
    std::vector<EventDraft> events;
    events.reserve(drafts.size());
    for (const auto& draft : drafts) {
        EventDraft d;
        d.kind = EventKind::Register;
        d.item_label = draft.label;
        d.quantity = draft.quantity;
        d.actor = actor;
        d.payload = draft;
        events.push_back(std::move(d));
    }
    if (events.empty()) return 0;
    record_events(events);
    return events.size();
}

inventory::ItemRecord Platform::update_metadata(std::string_view label, const inventory::MetadataPatch& patch,
                                                const Actor& actor, std::optional<std::int64_t> expected_version) {
    EventDraft d;
    d.kind = EventKind::UpdateMetadata;
    d.item_label = std::string(label);
    d.actor = actor;
    d.payload = patch;
    d.expected_version = expected_version;
    record_events(std::span(&d, 1));
    return item(label);
}

inventory::ItemRecord Platform::item(std::string_view label) const {
    std::shared_lock lock(mutex_);
    return warehouse_.get(label);
}

std::vector<inventory::ItemRecord> Platform::items(const inventory::ItemFilter& filter, inventory::Page page) const {
    std::shared_lock lock(mutex_);
    return warehouse_.query(filter, page);
}

std::vector<MovementEvent> Platform::events(std::int64_t after_offset, std::size_t limit) const {
    std::shared_lock lock(mutex_);
    const auto& ledger = warehouse_.ledger();
    std::vector<MovementEvent> out;
    for (auto i = std::max<std::int64_t>(after_offset, 0);
         i < static_cast<std::int64_t>(ledger.size()) && out.size() < limit; ++i) {
        out.push_back(ledger[static_cast<std::size_t>(i)]);
    }
    return out;
}

inventory::StockSnapshot Platform::stock_snapshot() const {
    std::shared_lock lock(mutex_);
    return warehouse_.snapshot();
}

// ---- workflow ------------------------------------------------------------------

ProjectList Platform::create_list(const workflow::OutboundRequest& request, const Actor& actor) {
    std::unique_lock lock(mutex_);
    auto decision = engine_.decide_create(request, actor, warehouse_, now());
    auto id = decision.event.list_id;
    commit(std::move(decision));
    return engine_.get(id);
}

ProjectList Platform::add_line(std::string_view list_id, const workflow::LineRequest& line, const Actor& actor) {
    std::unique_lock lock(mutex_);
    commit(engine_.decide_add_line(list_id, line, actor, warehouse_, now()));
    return engine_.get(list_id);
}

ProjectList Platform::substitute_line(std::string_view list_id, std::string_view purchase_label,
                                      std::string_view stock_label, const Actor& actor) {
    std::unique_lock lock(mutex_);
    commit(engine_.decide_substitute(list_id, purchase_label, stock_label, actor, warehouse_, now()));
    return engine_.get(list_id);
}

ProjectList Platform::transition(std::string_view list_id, ListState target, const Actor& actor,
                                 const workflow::TransitionOptions& options) {
    if (target == ListState::Reconciled) return reconcile(list_id, actor, options.expected_version);
    std::unique_lock lock(mutex_);
    commit(engine_.decide_transition(list_id, target, actor, warehouse_, now(), options));
    return engine_.get(list_id);
}

ProjectList Platform::record_disposition(std::string_view list_id, std::string_view item_label,
                                         workflow::Disposition disposition, std::int64_t quantity,
                                         const Actor& actor) {
    std::unique_lock lock(mutex_);
    commit(engine_.decide_disposition(list_id, item_label, disposition, quantity, actor, now()));
    return engine_.get(list_id);
}

ProjectList Platform::reconcile(std::string_view list_id, const Actor& actor,
                                std::optional<std::int64_t> expected_version) {
    std::unique_lock lock(mutex_);
    auto decision = engine_.decide_reconcile(list_id, actor, now(), expected_version);
    auto after = engine_.preview(decision.event);
    std::vector<const ProjectList*> reconciled;
    auto ctx = report_context(reconciled);
    reconciled.push_back(&after);
    ctx.reconciled = reconciled;
    auto report = indicators::project_report(after, ctx);
    std::get<workflow::Transitioned>(decision.event.change).report = indicators::to_json(report);
    commit(std::move(decision));
    return engine_.get(list_id);
}

ProjectList Platform::link_material(std::string_view list_id, std::string_view material_id, std::string_view note,
                                    const Actor& actor) {
    std::unique_lock lock(mutex_);
    auto decision = engine_.decide_link(list_id, material_id, note, actor, now());
    catalogue_.get(material_id);
    commit(std::move(decision));
    return engine_.get(list_id);
}

void Platform::acknowledge(std::string_view notification_id, const Actor& actor) {
    std::unique_lock lock(mutex_);
    commit(engine_.decide_acknowledge(notification_id, actor, now()));
}

ProjectList Platform::list(std::string_view list_id) const {
    std::shared_lock lock(mutex_);
    return engine_.get(list_id);
}

std::vector<ProjectList> Platform::lists() const {
    std::shared_lock lock(mutex_);
    std::vector<ProjectList> out;
    for (const auto& [id, l] : engine_.lists()) out.push_back(l);
    return out;
}

Json Platform::export_list(std::string_view list_id) const {
    std::shared_lock lock(mutex_);
    auto doc = workflow::export_list(engine_.get(list_id));
    Json linked = Json::array();
    for (const auto& link : engine_.get(list_id).materials) {
        const auto* m = catalogue_.find(link.material_id);
        linked.push_back(m ? Json(*m) : Json());
    }
    doc["material_details"] = std::move(linked);
    return doc;
}

std::vector<workflow::Notification> Platform::notifications(Role role) const {
    std::shared_lock lock(mutex_);
    return engine_.pending_actions(role);
}

// ---- indicators ------------------------------------------------------------------

indicators::ReportContext Platform::report_context(std::vector<const ProjectList*>& reconciled) const {
    for (const auto& [id, l] : engine_.lists()) {
        if (l.state == ListState::Reconciled) reconciled.push_back(&l);
    }
    std::optional<Ratio> accuracy;
    if (!audits_.empty()) accuracy = audits_.back().accuracy;
    return indicators::ReportContext{warehouse_, options_.factors, reconciled, accuracy};
}

indicators::IndicatorReport Platform::project_report(std::string_view list_id) const {
    std::shared_lock lock(mutex_);
    std::vector<const ProjectList*> reconciled;
    auto ctx = report_context(reconciled);
    return indicators::project_report(engine_.get(list_id), ctx);
}

indicators::IndicatorReport Platform::period_report(Timestamp from, Timestamp to) const {
    if (to < from) fail(ErrorCode::Validation, "period ends before it starts");
    std::shared_lock lock(mutex_);
    std::vector<const ProjectList*> reconciled;
    auto ctx = report_context(reconciled);
    return indicators::period_report(from, to, ctx);
}

indicators::FourRReport Platform::four_r_report(std::span<const std::string> list_ids) const {
    std::shared_lock lock(mutex_);
    std::vector<const ProjectList*> reconciled;
    auto ctx = report_context(reconciled);
    std::vector<const ProjectList*> scope;
    for (const auto& id : list_ids) scope.push_back(&engine_.get(id));
    return indicators::four_r_report(scope, ctx);
}

AuditRecord Platform::record_audit(std::span<const indicators::AuditLine> lines, const Actor& actor) {
    require(options_.matrix.allows(workflow::Action::RecordAudit, actor.role), actor, "record audits");
    std::unique_lock lock(mutex_);
    require_writable();
    auto result = indicators::inventory_accuracy(lines, warehouse_);
    AuditRecord record{now(), actor.actor_id, result.accuracy, std::move(result.discrepancies)};
    if (files_) files_->audits.append(to_json(record).dump());
    audits_.push_back(record);
    return record;
}

std::optional<AuditRecord> Platform::latest_audit() const {
    std::shared_lock lock(mutex_);
    if (audits_.empty()) return std::nullopt;
    return audits_.back();
}

// ---- materials ---------------------------------------------------------------------

std::vector<materials::ScoredMaterial> Platform::search_materials(const materials::MaterialQuery& query) const {
    std::shared_lock lock(mutex_);
    return catalogue_.search(query, options_.scoring);
}

materials::Material Platform::material(std::string_view material_id) const {
    std::shared_lock lock(mutex_);
    return catalogue_.get(material_id);
}

std::vector<materials::Material> Platform::all_materials() const {
    std::shared_lock lock(mutex_);
    std::vector<materials::Material> out;
    for (const auto& [id, m] : catalogue_.all()) out.push_back(m);
    return out;
}

std::size_t Platform::import_materials(std::string_view csv_text, const Actor& actor) {
    require(options_.matrix.allows(workflow::Action::ImportMaterials, actor.role), actor, "import materials");
    auto rows = materials::parse_material_csv(csv_text);
    std::unique_lock lock(mutex_);
    require_writable();
    auto next = catalogue_;
    for (auto& m : rows) next.upsert(std::move(m));
    save_materials(next);
    catalogue_ = std::move(next);
    return rows.size();
}

void Platform::delete_material(std::string_view material_id, const Actor& actor) {
    require(options_.matrix.allows(workflow::Action::ImportMaterials, actor.role), actor, "delete materials");
    std::unique_lock lock(mutex_);
    require_writable();
    auto next = catalogue_;
    next.erase(material_id, [&](std::string_view id) {
        for (const auto& [list_id, l] : engine_.lists()) {
            for (const auto& link : l.materials) {
                if (link.material_id == id) return true;
            }
        }
        return false;
    });
    save_materials(next);
    catalogue_ = std::move(next);
}

void Platform::save_materials(const materials::Catalogue& catalogue) {
    if (files_) write_file_atomically(files_->dir / kMaterialsFile, catalogue.to_json().dump(1) + "\n");
}

// ---- durability ------------------------------------------------------------------------

std::int64_t Platform::ledger_offset() const {
    std::shared_lock lock(mutex_);
    return warehouse_.offset();
}

std::int64_t Platform::journal_seq() const {
    std::shared_lock lock(mutex_);
    return engine_.last_seq();
}

Json Platform::state_json() const {
    std::shared_lock lock(mutex_);
    return compose_state(warehouse_, engine_);
}

void Platform::maybe_snapshot() {
    if (!files_ || options_.snapshot_interval <= 0) return;
    if (warehouse_.offset() - std::max<std::int64_t>(last_snapshot_offset_, 0) >= options_.snapshot_interval) {
        write_snapshot();
    }
}

std::optional<fs::path> Platform::write_snapshot() {
    auto path = files_->dir / kSnapshotDir / snapshot_name(warehouse_.offset(), engine_.last_seq());
    Json doc{{"schema", kSchemaVersion}, {"taken_at", now().to_iso8601()}, {"state", compose_state(warehouse_, engine_)}};
    write_file_atomically(path, doc.dump() + "\n");
    last_snapshot_offset_ = warehouse_.offset();
    last_snapshot_seq_ = engine_.last_seq();
    return path;
}

std::optional<fs::path> Platform::checkpoint() {
    std::unique_lock lock(mutex_);
    if (!files_) return std::nullopt;
    if (last_snapshot_offset_ == warehouse_.offset() && last_snapshot_seq_ == engine_.last_seq()) {
        return std::nullopt;
    }
    return write_snapshot();
}

VerifyReport Platform::verify(const fs::path& data_dir, const PlatformOptions& options, const Platform* live) {
    VerifyReport report;
    auto events = inventory::EventLog::read(data_dir / kEventsFile);
    auto lines = AppendOnlyFile::read_lines(data_dir / kJournalFile);
    auto snapshots = list_snapshots(data_dir / kSnapshotDir);

    // Full fold first: gaps and illegal events surface with their offset.
    Warehouse full;
    for (const auto& e : events) full.apply_recorded(e);
    report.events = full.offset();

    WorkflowEngine engine(options.matrix, options.workflow);
    auto causes = count_causes(full);
    std::vector<WorkflowEvent> journal;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        journal.push_back(decode_journal_line(lines[i], i));
        auto effects = engine.effects_of(journal.back());
        auto found = causes[WorkflowEngine::cause_for(journal.back())];
        if (found != effects.size()) missing_effects(journal.back(), effects.size(), found, full.offset());
        apply_journal(engine, journal.back(), full.offset());
    }
    report.journal_records = static_cast<std::int64_t>(journal.size());

    // Then walk both logs again, stopping at every snapshot position.
    Warehouse warehouse;
    WorkflowEngine prefix(options.matrix, options.workflow);
    std::size_t next_event = 0;
    std::size_t next_record = 0;
    for (const auto& snap : snapshots) {
        if (snap.offset > full.offset() || snap.seq > engine.last_seq()) {
            throw CorruptLogError("ledger ends at offset " + std::to_string(full.offset()) + " (journal seq " +
                                      std::to_string(engine.last_seq()) + ") but " +
                                      snap.path.filename().string() + " covers more",
                                  full.offset() + 1, engine.last_seq() + 1);
        }
        while (warehouse.offset() < snap.offset) warehouse.apply_recorded(events[next_event++]);
        while (prefix.last_seq() < snap.seq) prefix.apply(journal[next_record++]);
        Json doc;
        try {
            doc = Json::parse(read_text(snap.path));
        } catch (const Json::exception& e) {
            throw CorruptLogError(snap.path.filename().string() + ": " + e.what(), snap.offset, 0);
        }
        if (doc.value("state", Json()) != compose_state(warehouse, prefix)) {
            throw CorruptLogError("replayed state differs from " + snap.path.filename().string(), snap.offset,
                                  snap.seq);
        }
        report.snapshot_offset = snap.offset;
        ++report.snapshots_checked;
    }

    if (live && live->state_json() != compose_state(full, engine)) {
        throw CorruptLogError("replayed state differs from the running service", full.offset(), engine.last_seq());
    }
    return report;
}

Json to_json(const AuditRecord& audit) {
    Json discrepancies = Json::array();
    for (const auto& d : audit.discrepancies) {
        discrepancies.push_back({{"label", d.label}, {"counted", d.counted}, {"on_hand", d.on_hand}});
    }
    return Json{{"timestamp", audit.timestamp.to_iso8601()},
                {"actor_id", audit.actor_id},
                {"accuracy", audit.accuracy.rounded(4)},
                {"matched", audit.accuracy.numerator},
                {"counted_lines", audit.accuracy.denominator},
                {"discrepancies", std::move(discrepancies)}};
}

AuditRecord audit_from_json(const Json& j) {
    AuditRecord a;
    a.timestamp = Timestamp::parse_iso8601(j.at("timestamp").get<std::string>());
    a.actor_id = j.at("actor_id").get<std::string>();
    a.accuracy = Ratio{j.at("matched").get<std::int64_t>(), j.at("counted_lines").get<std::int64_t>()};
    for (const auto& d : j.at("discrepancies")) {
        a.discrepancies.push_back({d.at("label").get<std::string>(), d.at("counted").get<std::int64_t>(),
                                   d.at("on_hand").get<std::int64_t>()});
    }
    return a;
}

}  // namespace circuloop::service
