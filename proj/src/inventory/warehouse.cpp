#include "circuloop/inventory/warehouse.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"

namespace circuloop::inventory {

namespace {

using ItemState = Warehouse::ItemState;

std::string describe(const MovementEvent& e) {
    std::string s = std::string(to_string(e.kind)) + " " + std::to_string(e.quantity) + " of " + e.item_label;
    if (e.list_ref) s += " for list " + *e.list_ref;
    return s;
}

[[noreturn]] void illegal(const MovementEvent& e, const std::string& why) {
    fail(ErrorCode::IllegalTransition, describe(e) + ": " + why);
}

[[noreturn]] void overflow(const MovementEvent& e, std::int64_t have, const char* bucket) {
    fail(ErrorCode::QuantityOverflow,
         describe(e) + ": only " + std::to_string(have) + " unit(s) " + bucket);
}

// Moves `q` units out of `from`, distinguishing "nothing there" from "not enough".
void take(const MovementEvent& e, std::int64_t& from, const char* bucket) {
    if (from == 0) illegal(e, std::string("no units ") + bucket);
    if (e.quantity > from) overflow(e, from, bucket);
    from -= e.quantity;
}

void take_available(const MovementEvent& e, ItemRecord& r) {
    if (r.available() == 0) illegal(e, "no available units");
    if (e.quantity > r.available()) overflow(e, r.available(), "available");
    r.stock.on_hand -= e.quantity;
}

bool requires_list(EventKind k) {
    switch (k) {
        case EventKind::Reserve:
        case EventKind::ReleaseReservation:
        case EventKind::Pick:
        case EventKind::Pack:
        case EventKind::Dispatch:
        case EventKind::Receive:
        case EventKind::TempStore:
            return true;
        default:
            return false;
    }
}

bool forbids_list(EventKind k) {
    switch (k) {
        case EventKind::Register:
        case EventKind::AdjustQuantity:
        case EventKind::UpdateMetadata:
        case EventKind::RouteRecycle:
        case EventKind::Retire:
            return true;
        default:
            return false;
    }
}

void check_quantity(const MovementEvent& e) {
    if (e.quantity < 0) {
        fail(ErrorCode::InvalidQuantity, describe(e) + ": quantity must not be negative");
    }
    switch (e.kind) {
        case EventKind::Register:
        case EventKind::Retire:
            return;
        case EventKind::UpdateMetadata:
            if (e.quantity != 0) {
                fail(ErrorCode::InvalidQuantity, "UpdateMetadata moves no units; quantity must be 0");
            }
            return;
        default:
            if (e.quantity == 0) {
                fail(ErrorCode::InvalidQuantity, describe(e) + ": quantity must be positive");
            }
    }
    if (requires_list(e.kind) && !e.list_ref) {
        fail(ErrorCode::Validation, std::string(to_string(e.kind)) + " requires a list reference");
    }
    if (forbids_list(e.kind) && e.list_ref) {
        fail(ErrorCode::Validation, std::string(to_string(e.kind)) + " must not reference a list");
    }
}

void apply_patch(ItemRecord& r, const MetadataPatch& p) {
    if (p.remaining_lifespan && *p.remaining_lifespan < 0) {
        fail(ErrorCode::Validation, "remaining_lifespan must not be negative");
    }
    if (p.embodied_carbon_per_unit && *p.embodied_carbon_per_unit < 0.0) {
        fail(ErrorCode::Validation, "embodied_carbon_per_unit must not be negative");
    }
    if (p.condition) r.condition = *p.condition;
    if (p.remaining_lifespan) r.remaining_lifespan = *p.remaining_lifespan;
    if (p.location) r.location = *p.location;
    if (p.expiry_date) r.expiry_date = *p.expiry_date;
    if (p.embodied_carbon_per_unit) r.embodied_carbon_per_unit = *p.embodied_carbon_per_unit;
}

bool holds_nothing(const StockTallies& s) {
    return s.on_hand == 0 && s.dispatched == 0 && s.on_site == 0 && s.temporarily_stored == 0;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string event_id_for(std::int64_t offset) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "evt-%012lld", static_cast<long long>(offset));
    return buf;
}

}  // namespace

void validate_draft(const ItemDraft& d) {
    if (d.label.empty()) fail(ErrorCode::Validation, "item label must not be empty");
    if (d.quantity < 0) {
        fail(ErrorCode::InvalidQuantity, "item " + d.label + ": quantity must not be negative");
    }
    if (d.remaining_lifespan < 0) {
        fail(ErrorCode::Validation, "item " + d.label + ": remaining_lifespan must not be negative");
    }
    if (d.embodied_carbon_per_unit < 0.0) {
        fail(ErrorCode::Validation, "item " + d.label + ": embodied_carbon_per_unit must not be negative");
    }
}

ItemRecord record_from_draft(const ItemDraft& d) {
    ItemRecord r;
    r.label = d.label;
    r.name = d.name;
    r.category = d.category;
    r.material = d.material;
    r.condition = d.condition;
    r.remaining_lifespan = d.remaining_lifespan;
    r.expiry_date = d.expiry_date;
    r.embodied_carbon_per_unit = d.embodied_carbon_per_unit;
    r.location = d.location;
    r.value_class = d.value_class;
    r.stock.on_hand = d.quantity;
    r.inflow.registered = d.quantity;
    return r;
}

ItemState evolve(const ItemState* current, const MovementEvent& e) {
    check_quantity(e);

    if (e.kind == EventKind::Register) {
        if (current) fail(ErrorCode::DuplicateLabel, "label " + e.item_label + " is already registered");
        auto draft = e.payload.get<ItemDraft>();
        validate_draft(draft);
        if (draft.label != e.item_label || draft.quantity != e.quantity) {
            fail(ErrorCode::Validation, "Register payload disagrees with the event envelope");
        }
        ItemState state;
        state.record = record_from_draft(draft);
        state.record.version = e.sequence;
        return state;
    }

    if (!current) fail(ErrorCode::UnknownItem, "unknown item " + e.item_label);
    if (current->record.retired) illegal(e, "item is retired");

    ItemState next = *current;
    ItemRecord& r = next.record;
    StockTallies& s = r.stock;
    ListFlow* flow = nullptr;
    if (e.list_ref) flow = &next.flows[*e.list_ref];

    switch (e.kind) {
        case EventKind::Register:
            break;
        case EventKind::AdjustQuantity: {
            std::string direction = "in";
            if (e.payload.is_object()) direction = e.payload.value("direction", std::string("in"));
            if (direction == "in") {
                s.on_hand += e.quantity;
                r.inflow.adjusted_in += e.quantity;
            } else if (direction == "out") {
                take_available(e, r);
                r.inflow.adjusted_out += e.quantity;
            } else {
                fail(ErrorCode::Validation, "AdjustQuantity direction must be 'in' or 'out'");
            }
            break;
        }
        case EventKind::UpdateMetadata: {
            auto patch = e.payload.is_null() ? MetadataPatch{} : e.payload.get<MetadataPatch>();
            if (patch.empty()) fail(ErrorCode::Validation, "empty metadata patch");
            apply_patch(r, patch);
            break;
        }
        case EventKind::Reserve:
            if (!r.reservable()) illegal(e, "item is below the reuse threshold or end-of-life");
            if (r.available() == 0) illegal(e, "no available units");
            if (e.quantity > r.available()) overflow(e, r.available(), "available");
            flow->reserved += e.quantity;
            s.reserved += e.quantity;
            break;
        case EventKind::ReleaseReservation: {
            std::int64_t held = flow->held_in_warehouse();
            if (held == 0) illegal(e, "nothing held for this list");
            if (e.quantity > held) overflow(e, held, "held for this list");
            std::int64_t left = e.quantity;
            for (std::int64_t* bucket : {&flow->reserved, &flow->picked, &flow->packed}) {
                std::int64_t n = std::min(left, *bucket);
                *bucket -= n;
                left -= n;
            }
            s.reserved -= e.quantity;
            break;
        }
        case EventKind::Pick:
            take(e, flow->reserved, "reserved for this list");
            flow->picked += e.quantity;
            break;
        case EventKind::Pack:
            take(e, flow->picked, "picked for this list");
            flow->packed += e.quantity;
            break;
        case EventKind::Dispatch:
            take(e, flow->packed, "packed for this list");
            flow->in_transit += e.quantity;
            s.on_hand -= e.quantity;
            s.reserved -= e.quantity;
            s.dispatched += e.quantity;
            break;
        case EventKind::Receive:
            take(e, flow->in_transit, "in transit for this list");
            flow->on_site += e.quantity;
            s.dispatched -= e.quantity;
            s.on_site += e.quantity;
            break;
        case EventKind::Inspect:
            if (flow) {
                if (flow->on_site == 0) illegal(e, "no units on site for this list");
                if (e.quantity > flow->on_site) overflow(e, flow->on_site, "on site for this list");
            } else {
                if (s.on_hand == 0) illegal(e, "no units on hand");
                if (e.quantity > s.on_hand) overflow(e, s.on_hand, "on hand");
            }
            if (e.payload.is_object() && e.payload.contains("condition")) {
                r.condition = e.payload.at("condition").get<ConditionGrade>();
            }
            break;
        case EventKind::ReturnRestock:
            if (flow) {
                take(e, flow->on_site, "on site for this list");
                flow->returned += e.quantity;
                s.on_site -= e.quantity;
            } else {
                take(e, s.temporarily_stored, "temporarily stored");
            }
            s.on_hand += e.quantity;
            break;
        case EventKind::MarkConsumedOrDamaged:
            if (flow) {
                take(e, flow->on_site, "on site for this list");
                flow->consumed += e.quantity;
                s.on_site -= e.quantity;
            } else {
                take_available(e, r);
            }
            s.consumed_or_damaged += e.quantity;
            break;
        case EventKind::TempStore:
            take(e, flow->on_site, "on site for this list");
            flow->temp_stored += e.quantity;
            s.on_site -= e.quantity;
            s.temporarily_stored += e.quantity;
            break;
        case EventKind::RouteRecycle:
            take_available(e, r);
            s.recycled += e.quantity;
            break;
        case EventKind::Retire:
            if (e.quantity == 0) {
                if (!holds_nothing(s)) illegal(e, "item still holds units; retire them first");
            } else {
                take_available(e, r);
                s.retired += e.quantity;
            }
            if (holds_nothing(s)) r.retired = true;
            break;
    }
    r.version = e.sequence;
    return next;
}

Warehouse::Pending Warehouse::prepare(std::span<const EventDraft> drafts, Timestamp now) const {
    Pending pending;
    pending.base_offset = offset();
    Timestamp ts = std::max(now, last_timestamp());
    std::int64_t next_offset = pending.base_offset;

    for (const EventDraft& d : drafts) {
        const ItemState* current = nullptr;
        if (auto t = pending.touched.find(d.item_label); t != pending.touched.end()) {
            current = &t->second;
        } else if (auto it = items_.find(d.item_label); it != items_.end()) {
            current = &it->second;
        }
        std::int64_t version = current ? current->record.version : 0;
        if (d.expected_version && *d.expected_version != version) {
            throw StaleVersionError("item " + d.item_label + " is at version " + std::to_string(version) +
                                        ", expected " + std::to_string(*d.expected_version),
                                    version);
        }

        MovementEvent e;
        e.offset = ++next_offset;
        e.event_id = event_id_for(e.offset);
        e.sequence = version + 1;
        e.timestamp = ts;
        e.actor = d.actor.role;
        e.actor_id = d.actor.actor_id;
        e.item_label = d.item_label;
        e.kind = d.kind;
        e.quantity = d.quantity;
        e.list_ref = d.list_ref;
        e.note = d.note;
        e.payload = d.payload;
        e.cause = d.cause;
        e.client_time = d.client_time;

        pending.touched[d.item_label] = evolve(current, e);
        pending.events.push_back(std::move(e));
    }
    return pending;
}

std::vector<MovementEvent> Warehouse::commit(Pending pending) {
    if (pending.base_offset != offset()) {
        throw StaleVersionError("ledger advanced since the batch was prepared", offset());
    }
    for (auto& [label, state] : pending.touched) {
        items_.insert_or_assign(label, std::move(state));
    }
    ledger_.insert(ledger_.end(), pending.events.begin(), pending.events.end());
    return std::move(pending.events);
}

MovementEvent Warehouse::apply(const EventDraft& draft, Timestamp now) {
    auto committed = commit(prepare(std::span(&draft, 1), now));
    return committed.front();
}

void Warehouse::apply_recorded(const MovementEvent& e) {
    if (e.offset != offset() + 1) {
        throw CorruptLogError("ledger gap: expected offset " + std::to_string(offset() + 1) + ", found offset " +
                                  std::to_string(e.offset) + " (item " + e.item_label + " sequence " +
                                  std::to_string(e.sequence) + ")",
                              e.offset, e.sequence);
    }
    auto it = items_.find(e.item_label);
    const ItemState* current = it == items_.end() ? nullptr : &it->second;
    std::int64_t expected_seq = (current ? current->record.version : 0) + 1;
    if (e.sequence != expected_seq) {
        throw CorruptLogError("sequence gap for item " + e.item_label + ": expected sequence " +
                                  std::to_string(expected_seq) + ", found sequence " + std::to_string(e.sequence) +
                                  " at offset " + std::to_string(e.offset),
                              e.offset, e.sequence);
    }
    if (e.timestamp < last_timestamp()) {
        throw CorruptLogError("out-of-order timestamp at offset " + std::to_string(e.offset) + " (sequence " +
                                  std::to_string(e.sequence) + ")",
                              e.offset, e.sequence);
    }
    ItemState next;
    try {
        next = evolve(current, e);
    } catch (const DomainError& err) {
        throw CorruptLogError("illegal event at offset " + std::to_string(e.offset) + " (sequence " +
                                  std::to_string(e.sequence) + "): " + err.what(),
                              e.offset, e.sequence);
    }
    items_.insert_or_assign(e.item_label, std::move(next));
    ledger_.push_back(e);
}

Warehouse Warehouse::replay(std::span<const MovementEvent> log) {
    Warehouse w;
    w.ledger_.reserve(log.size());
    for (const auto& e : log) w.apply_recorded(e);
    return w;
}

const ItemRecord* Warehouse::find(std::string_view label) const {
    auto it = items_.find(label);
    return it == items_.end() ? nullptr : &it->second.record;
}

const ItemRecord& Warehouse::get(std::string_view label) const {
    const ItemRecord* r = find(label);
    if (!r) fail(ErrorCode::UnknownItem, "unknown item " + std::string(label));
    return *r;
}

ListFlow Warehouse::flow(std::string_view label, std::string_view list_ref) const {
    auto it = items_.find(label);
    if (it == items_.end()) return {};
    auto f = it->second.flows.find(list_ref);
    return f == it->second.flows.end() ? ListFlow{} : f->second;
}

bool Warehouse::matches(const ItemRecord& r, const ItemFilter& f) {
    if (f.category && r.category != *f.category) return false;
    if (f.condition && r.condition != *f.condition) return false;
    if (f.status && r.status() != *f.status) return false;
    if (f.available_only && r.available_for_outbound() <= 0) return false;
    if (!f.text.empty()) {
        std::string needle = lower(f.text);
        bool hit = false;
        for (std::string_view hay : {std::string_view(r.label), std::string_view(r.name), std::string_view(r.material),
                                     std::string_view(r.location), to_string(r.category)}) {
            if (lower(hay).find(needle) != std::string::npos) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;
    }
    return true;
}

std::vector<ItemRecord> Warehouse::query(const ItemFilter& filter, Page page) const {
    std::vector<ItemRecord> out;
    std::size_t skipped = 0;
    for (const auto& [label, state] : items_) {
        if (out.size() >= page.limit) break;
        if (!matches(state.record, filter)) continue;
        if (skipped < page.offset) {
            ++skipped;
            continue;
        }
        out.push_back(state.record);
    }
    return out;
}

StockSnapshot Warehouse::snapshot() const {
    StockSnapshot snap;
    snap.as_of = offset();
    for (const auto& [label, state] : items_) snap.items.emplace(label, state.record.stock);
    return snap;
}

Json Warehouse::state_json() const {
    Json items = Json::array();
    for (const auto& [label, state] : items_) {
        Json j = state.record;
        Json flows = Json::object();
        for (const auto& [list, f] : state.flows) flows[list] = f;
        j["flows"] = std::move(flows);
        items.push_back(std::move(j));
    }
    return Json{{"as_of", offset()}, {"items", std::move(items)}};
}

}  // namespace circuloop::inventory
