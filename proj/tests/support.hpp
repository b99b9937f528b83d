#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/inventory/warehouse.hpp"

namespace circuloop::testing {

namespace fs = std::filesystem;
using inventory::EventDraft;
using inventory::EventKind;
using inventory::ItemDraft;
using inventory::Warehouse;

class TempDir {
public:
    explicit TempDir(const std::string& tag = "circuloop") {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::vector<std::string> read_lines(const fs::path& p) {
    std::vector<std::string> out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

inline void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
}

inline const Actor kAdmin{Role::WarehouseAdministrator, "admin"};
inline const Actor kLead{Role::ProjectLead, "lead"};

inline ItemDraft make_item(const std::string& label, std::int64_t qty,
                           inventory::Category category = inventory::Category::EventProps,
                           const std::string& material = "wood-based") {
    ItemDraft d;
    d.label = label;
    d.name = "Item " + label;
    d.category = category;
    d.material = material;
    d.quantity = qty;
    d.remaining_lifespan = 5;
    d.location = "A-01";
    return d;
}

inline EventDraft register_draft(const ItemDraft& d, const Actor& actor = kAdmin) {
    EventDraft e;
    e.kind = EventKind::Register;
    e.item_label = d.label;
    e.quantity = d.quantity;
    e.actor = actor;
    e.payload = d;
    return e;
}

inline EventDraft draft(EventKind kind, const std::string& label, std::int64_t qty,
                        std::optional<std::string> list = std::nullopt, const Actor& actor = kAdmin) {
    EventDraft e;
    e.kind = kind;
    e.item_label = label;
    e.quantity = qty;
    e.actor = actor;
    e.list_ref = std::move(list);
    return e;
}

/// Draws random legal ledger events for a warehouse by inspecting its
/// current state. Occasionally proposes an event that must be refused.
class EventGenerator {
public:
    explicit EventGenerator(std::uint32_t seed) : rng_(seed) {}

    /// A draft that is legal against `w`.
    EventDraft legal(const Warehouse& w) {
        for (;;) {
            if (w.size() < 3 || pick(20) == 0) return fresh_item();
            const auto& items = w.items();
            auto it = items.begin();
            std::advance(it, static_cast<long>(pick(items.size())));
            const auto& [label, state] = *it;
            const auto& r = state.record;
            if (r.retired) continue;
            if (auto d = for_item(label, state)) return *d;
        }
    }

    /// A draft that `w` must refuse (over-quantity or wrong bucket).
    EventDraft illegal(const Warehouse& w) {
        const auto& items = w.items();
        auto it = items.begin();
        std::advance(it, static_cast<long>(pick(items.size())));
        const auto& r = it->second.record;
        switch (pick(4)) {
            case 0: {
                auto e = draft(EventKind::AdjustQuantity, r.label, r.available() + 1 + static_cast<std::int64_t>(pick(3)));
                e.payload = {{"direction", "out"}};
                return e;
            }
            case 1:
                return draft(EventKind::Pick, r.label,
                             w.flow(r.label, "L9").reserved + 1, "L9");
            case 2:
                return draft(EventKind::RouteRecycle, r.label, r.available() + 1);
            default:
                return register_draft(make_item(r.label, 1));
        }
    }

    std::mt19937& rng() { return rng_; }
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    std::int64_t upto(std::int64_t n) { return std::uniform_int_distribution<std::int64_t>(1, n)(rng_); }

private:
    EventDraft fresh_item() {
        char label[16];
        std::snprintf(label, sizeof label, "IT-%05d", ++next_label_);
        auto cat = inventory::kAllCategories[pick(inventory::kAllCategories.size())];
        return register_draft(make_item(label, static_cast<std::int64_t>(pick(60)), cat));
    }

    std::optional<EventDraft> for_item(const std::string& label, const Warehouse::ItemState& s) {
        const auto& r = s.record;
        std::vector<EventDraft> options;
        std::int64_t avail = r.available();

        auto adjust_in = draft(EventKind::AdjustQuantity, label, upto(20));
        adjust_in.payload = {{"direction", "in"}};
        options.push_back(adjust_in);

        auto meta = draft(EventKind::UpdateMetadata, label, 0);
        meta.payload = {{"location", "R-" + std::to_string(pick(40))}};
        if (pick(3) == 0) meta.payload["remaining_lifespan"] = static_cast<std::int64_t>(pick(4));
        if (pick(5) == 0) meta.payload["condition"] = std::string(1, static_cast<char>('A' + pick(4)));
        options.push_back(meta);

        if (avail > 0) {
            auto out = draft(EventKind::AdjustQuantity, label, upto(avail));
            out.payload = {{"direction", "out"}};
            options.push_back(out);
            options.push_back(draft(EventKind::RouteRecycle, label, upto(avail)));
            options.push_back(draft(EventKind::MarkConsumedOrDamaged, label, upto(avail)));
            if (pick(4) == 0) options.push_back(draft(EventKind::Retire, label, upto(avail)));
            if (r.reservable()) {
                std::string list = "L" + std::to_string(pick(4));
                for (int i = 0; i < 3; ++i) options.push_back(draft(EventKind::Reserve, label, upto(avail), list));
            }
        }
        if (r.stock.on_hand > 0) {
            auto ins = draft(EventKind::Inspect, label, upto(r.stock.on_hand));
            if (pick(3) == 0) ins.payload = {{"condition", std::string(1, static_cast<char>('A' + pick(3)))}};
            options.push_back(ins);
        }
        if (r.stock.temporarily_stored > 0) {
            options.push_back(draft(EventKind::ReturnRestock, label, upto(r.stock.temporarily_stored)));
        }
        if (avail == 0 && r.stock.accounted() == r.stock.consumed_or_damaged + r.stock.recycled + r.stock.retired &&
            pick(3) == 0) {
            options.push_back(draft(EventKind::Retire, label, 0));
        }
        for (const auto& [list, f] : s.flows) {
            if (f.held_in_warehouse() > 0 && pick(4) == 0) {
                options.push_back(draft(EventKind::ReleaseReservation, label, upto(f.held_in_warehouse()), list));
            }
            for (int i = 0; i < 2; ++i) {
                if (f.reserved > 0) options.push_back(draft(EventKind::Pick, label, upto(f.reserved), list));
                if (f.picked > 0) options.push_back(draft(EventKind::Pack, label, upto(f.picked), list));
                if (f.packed > 0) options.push_back(draft(EventKind::Dispatch, label, upto(f.packed), list));
                if (f.in_transit > 0) options.push_back(draft(EventKind::Receive, label, upto(f.in_transit), list));
            }
            if (f.on_site > 0) {
                options.push_back(draft(EventKind::Inspect, label, upto(f.on_site), list));
                options.push_back(draft(EventKind::ReturnRestock, label, upto(f.on_site), list));
                options.push_back(draft(EventKind::MarkConsumedOrDamaged, label, upto(f.on_site), list));
                options.push_back(draft(EventKind::TempStore, label, upto(f.on_site), list));
            }
        }
        if (options.empty()) return std::nullopt;
        return options[pick(options.size())];
    }

    std::mt19937 rng_;
    int next_label_ = 0;
};

/// Conservation and bucket sanity for one item, checked without the
/// warehouse's own helpers. Returns a description of the first violation.
inline std::optional<std::string> conservation_violation(const Warehouse::ItemState& s) {
    const auto& r = s.record;
    const auto& t = r.stock;
    std::int64_t inflow = r.inflow.registered + r.inflow.adjusted_in - r.inflow.adjusted_out;
    std::int64_t outflow = t.on_hand + t.dispatched + t.on_site + t.temporarily_stored + t.consumed_or_damaged +
                           t.recycled + t.retired;
    if (inflow != outflow) {
        return r.label + ": inflow " + std::to_string(inflow) + " != accounted " + std::to_string(outflow);
    }
    for (std::int64_t v : {t.on_hand, t.reserved, t.dispatched, t.on_site, t.temporarily_stored,
                           t.consumed_or_damaged, t.recycled, t.retired}) {
        if (v < 0) return r.label + ": negative bucket";
    }
    if (t.reserved > t.on_hand) return r.label + ": reserved exceeds on_hand";
    std::int64_t held = 0, transit = 0, site = 0, temp = 0;
    for (const auto& [list, f] : s.flows) {
        held += f.reserved + f.picked + f.packed;
        transit += f.in_transit;
        site += f.on_site;
        temp += f.temp_stored;
    }
    if (held != t.reserved) return r.label + ": list holds disagree with reserved";
    if (transit != t.dispatched) return r.label + ": in-transit disagrees with dispatched";
    if (site != t.on_site) return r.label + ": list on-site disagrees with on_site";
    if (temp < t.temporarily_stored) return r.label + ": temp store exceeds list temp dispositions";
    return std::nullopt;
}

/// on_hand per label from a raw scan of the ledger.
inline std::map<std::string, std::int64_t> on_hand_from_ledger(const std::vector<inventory::MovementEvent>& log) {
    std::map<std::string, std::int64_t> on_hand;
    for (const auto& e : log) {
        auto& q = on_hand[e.item_label];
        switch (e.kind) {
            case EventKind::Register:
                q += e.quantity;
                break;
            case EventKind::AdjustQuantity:
                q += e.payload.value("direction", std::string("in")) == "out" ? -e.quantity : e.quantity;
                break;
            case EventKind::Dispatch:
            case EventKind::RouteRecycle:
            case EventKind::Retire:
                q -= e.quantity;
                break;
            case EventKind::ReturnRestock:
                q += e.quantity;
                break;
            case EventKind::MarkConsumedOrDamaged:
                if (!e.list_ref) q -= e.quantity;
                break;
            default:
                break;
        }
    }
    return on_hand;
}

/// Per-list unit totals from a raw scan of the ledger.
struct ListTotals {
    std::int64_t dispatched = 0;
    std::int64_t consumed = 0;
    std::int64_t returned = 0;
    std::int64_t temp = 0;
    std::set<std::string> dispatched_labels;
};

inline std::map<std::string, ListTotals> list_totals_from_ledger(const std::vector<inventory::MovementEvent>& log) {
    std::map<std::string, ListTotals> out;
    for (const auto& e : log) {
        if (!e.list_ref) continue;
        auto& t = out[*e.list_ref];
        switch (e.kind) {
            case EventKind::Dispatch:
                t.dispatched += e.quantity;
                t.dispatched_labels.insert(e.item_label);
                break;
            case EventKind::MarkConsumedOrDamaged:
                t.consumed += e.quantity;
                break;
            case EventKind::ReturnRestock:
                t.returned += e.quantity;
                break;
            case EventKind::TempStore:
                t.temp += e.quantity;
                break;
            default:
                break;
        }
    }
    return out;
}

/// Labels of `list` dispatched on at least two distinct lists in `reconciled`.
inline std::int64_t redeployment_oracle(const std::map<std::string, ListTotals>& totals, const std::string& list,
                                        const std::set<std::string>& reconciled) {
    auto it = totals.find(list);
    if (it == totals.end()) return 0;
    std::int64_t count = 0;
    for (const auto& label : it->second.dispatched_labels) {
        int lists = 0;
        for (const auto& id : reconciled) {
            auto t = totals.find(id);
            if (t != totals.end() && t->second.dispatched_labels.count(label)) ++lists;
        }
        if (lists >= 2) ++count;
    }
    return count;
}

/// Emission factors read straight from the CSV text, no shared parser.
struct FactorOracle {
    std::map<std::pair<std::string, std::string>, double> rows;

    explicit FactorOracle(const std::string& csv) {
        std::istringstream in(csv);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (header) {
                header = false;
                continue;
            }
            auto a = line.find(',');
            auto b = line.find(',', a + 1);
            rows[{line.substr(0, a), line.substr(a + 1, b - a - 1)}] = std::stod(line.substr(b + 1));
        }
    }

    double factor(const std::string& category, const std::string& material) const {
        if (auto it = rows.find({category, material}); it != rows.end()) return it->second;
        return rows.at({category, "*"});
    }
};

inline bool close_rel(double a, double b, double rel) {
    double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= rel * scale;
}

}  // namespace circuloop::testing
