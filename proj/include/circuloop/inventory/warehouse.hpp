#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circuloop/inventory/types.hpp"

namespace circuloop::inventory {

/// The digital warehouse: a fold over the movement ledger.
///
/// Every mutation goes through an EventDraft. `prepare` validates a batch
/// against the current state and assigns ledger identity (offset, per-item
/// sequence, event id, timestamp) without changing anything; `commit` makes
/// the batch visible. Callers that persist the ledger write the prepared
/// events to disk between the two calls, so nothing becomes observable before
/// it is durable.
///
/// Transition table (list-bound kinds need `list_ref`, the rest must not
/// carry one, Inspect/MarkConsumedOrDamaged accept either):
///
///   Register              new item, quantity >= 0 units into on_hand
///   AdjustQuantity        payload.direction "in" adds to on_hand, "out" removes available units
///   UpdateMetadata        payload is a MetadataPatch, quantity 0
///   Reserve               available -> list reserved; grade D / end-of-life items refused
///   ReleaseReservation    list reserved/picked/packed -> available
///   Pick                  list reserved -> picked
///   Pack                  list picked -> packed
///   Dispatch              list packed -> in transit (leaves on_hand)
///   Receive               in transit -> on site
///   Inspect               no stock change; payload.condition regrades the item
///   ReturnRestock         on site -> on_hand; without a list, temporarily stored -> on_hand
///   MarkConsumedOrDamaged on site -> consumed; without a list, available -> consumed
///   TempStore             on site -> temporarily stored
///   RouteRecycle          available -> recycled
///   Retire                available -> retired; item is retired once nothing is left
///
/// Not thread-safe; the service serialises writers and guards readers.
class Warehouse {
public:
    struct ItemState {
        ItemRecord record;
        std::map<std::string, ListFlow, std::less<>> flows;

        bool operator==(const ItemState&) const = default;
    };

    struct Pending {
        std::vector<MovementEvent> events;
        std::map<std::string, ItemState, std::less<>> touched;
        std::int64_t base_offset = 0;
    };

    Pending prepare(std::span<const EventDraft> drafts, Timestamp now) const;
    std::vector<MovementEvent> commit(Pending pending);

    /// prepare + commit for a single draft (no persistence).
    MovementEvent apply(const EventDraft& draft, Timestamp now);

    /// Re-applies an event read from the ledger, checking its identity.
    /// Throws CorruptLogError on gaps, reordering, or an illegal event.
    void apply_recorded(const MovementEvent& event);

    static Warehouse replay(std::span<const MovementEvent> log);

    const ItemRecord* find(std::string_view label) const;
    const ItemRecord& get(std::string_view label) const;
    ListFlow flow(std::string_view label, std::string_view list_ref) const;
    const std::map<std::string, ItemState, std::less<>>& items() const { return items_; }

    /// Deterministic: label ascending.
    std::vector<ItemRecord> query(const ItemFilter& filter, Page page = {}) const;
    static bool matches(const ItemRecord& record, const ItemFilter& filter);

    StockSnapshot snapshot() const;
    const std::vector<MovementEvent>& ledger() const { return ledger_; }
    std::int64_t offset() const { return static_cast<std::int64_t>(ledger_.size()); }
    Timestamp last_timestamp() const { return ledger_.empty() ? Timestamp{} : ledger_.back().timestamp; }
    std::size_t size() const { return items_.size(); }

    /// Full materialised state (records and list flows) for snapshot files.
    Json state_json() const;

    /// Same items, flows and ledger position.
    bool same_state(const Warehouse& other) const {
        return items_ == other.items_ && offset() == other.offset();
    }

private:
    std::map<std::string, ItemState, std::less<>> items_;
    std::vector<MovementEvent> ledger_;
};

/// Applies one event to an item's state (nullptr for Register). Pure; throws
/// DomainError when the event is not legal for that state.
Warehouse::ItemState evolve(const Warehouse::ItemState* current, const MovementEvent& event);

ItemRecord record_from_draft(const ItemDraft& draft);
void validate_draft(const ItemDraft& draft);

}  // namespace circuloop::inventory
