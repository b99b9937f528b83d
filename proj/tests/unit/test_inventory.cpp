#include <doctest.h>

#include "../check.hpp"
#include "../support.hpp"
#include "circuloop/inventory/bootstrap.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/inventory/event_log.hpp"
#include "circuloop/inventory/warehouse.hpp"

using namespace circuloop;
using namespace circuloop::inventory;
using namespace circuloop::testing;

namespace {

const Timestamp kT0 = Timestamp::parse_iso8601("2025-06-01T08:00:00Z");

Warehouse stocked(std::int64_t qty = 10) {
    Warehouse w;
    w.apply(register_draft(make_item("EP-0001", qty)), kT0);
    return w;
}

}  // namespace

TEST_CASE("register puts units on hand") {
    auto w = stocked(12);
    const auto& r = w.get("EP-0001");
    CHECK(r.quantity_on_hand() == 12);
    CHECK(r.available() == 12);
    CHECK(r.version == 1);
    CHECK(r.status() == ItemStatus::InStock);
    CHECK(w.ledger().front().offset == 1);
    CHECK(w.ledger().front().event_id == "evt-000000000001");
}

TEST_CASE("duplicate labels are refused") {
    auto w = stocked();
    CHECK_CODE(w.apply(register_draft(make_item("EP-0001", 1)), kT0), ErrorCode::DuplicateLabel);
    CHECK(w.offset() == 1);
}

TEST_CASE("register payload must agree with the envelope") {
    Warehouse w;
    auto d = register_draft(make_item("X", 3));
    d.quantity = 4;
    CHECK_CODE(w.apply(d, kT0), ErrorCode::Validation);
}

TEST_CASE("unknown items are refused") {
    Warehouse w;
    CHECK_CODE(w.apply(draft(EventKind::Inspect, "NOPE", 1), kT0), ErrorCode::UnknownItem);
    CHECK_CODE(w.get("NOPE"), ErrorCode::UnknownItem);
}

TEST_CASE("quantity rules") {
    auto w = stocked();
    CHECK_CODE(w.apply(draft(EventKind::Reserve, "EP-0001", 0, "L"), kT0), ErrorCode::InvalidQuantity);
    CHECK_CODE(w.apply(draft(EventKind::Reserve, "EP-0001", -1, "L"), kT0), ErrorCode::InvalidQuantity);
    auto meta = draft(EventKind::UpdateMetadata, "EP-0001", 1);
    meta.payload = {{"location", "B"}};
    CHECK_CODE(w.apply(meta, kT0), ErrorCode::InvalidQuantity);
}

TEST_CASE("list references are required or forbidden by kind") {
    auto w = stocked();
    CHECK_CODE(w.apply(draft(EventKind::Reserve, "EP-0001", 1), kT0), ErrorCode::Validation);
    CHECK_CODE(w.apply(draft(EventKind::RouteRecycle, "EP-0001", 1, "L"), kT0), ErrorCode::Validation);
}

TEST_CASE("outbound pipeline moves units bucket by bucket") {
    auto w = stocked(10);
    w.apply(draft(EventKind::Reserve, "EP-0001", 6, "L1"), kT0);
    CHECK(w.get("EP-0001").available() == 4);
    CHECK(w.get("EP-0001").quantity_reserved() == 6);
    w.apply(draft(EventKind::Pick, "EP-0001", 6, "L1"), kT0);
    w.apply(draft(EventKind::Pack, "EP-0001", 6, "L1"), kT0);
    w.apply(draft(EventKind::Dispatch, "EP-0001", 5, "L1"), kT0);
    const auto& r = w.get("EP-0001");
    CHECK(r.stock.on_hand == 5);
    CHECK(r.stock.reserved == 1);
    CHECK(r.stock.dispatched == 5);
    w.apply(draft(EventKind::ReleaseReservation, "EP-0001", 1, "L1"), kT0);
    w.apply(draft(EventKind::Receive, "EP-0001", 5, "L1"), kT0);
    w.apply(draft(EventKind::MarkConsumedOrDamaged, "EP-0001", 2, "L1"), kT0);
    w.apply(draft(EventKind::ReturnRestock, "EP-0001", 2, "L1"), kT0);
    w.apply(draft(EventKind::TempStore, "EP-0001", 1, "L1"), kT0);
    const auto& after = w.get("EP-0001");
    CHECK(after.stock.on_hand == 7);
    CHECK(after.stock.consumed_or_damaged == 2);
    CHECK(after.stock.temporarily_stored == 1);
    CHECK(after.available() == 7);
    auto f = w.flow("EP-0001", "L1");
    CHECK(f.returned == 2);
    CHECK(f.consumed == 2);
    CHECK(f.temp_stored == 1);
    CHECK(f.dispositioned() == 5);
    w.apply(draft(EventKind::ReturnRestock, "EP-0001", 1), kT0);
    CHECK(w.get("EP-0001").stock.temporarily_stored == 0);
    CHECK(w.get("EP-0001").stock.on_hand == 8);
}

TEST_CASE("empty bucket is an illegal transition, short bucket an overflow") {
    auto w = stocked(3);
    CHECK_CODE(w.apply(draft(EventKind::Pick, "EP-0001", 1, "L1"), kT0), ErrorCode::IllegalTransition);
    CHECK_CODE(w.apply(draft(EventKind::Reserve, "EP-0001", 4, "L1"), kT0), ErrorCode::QuantityOverflow);
    w.apply(draft(EventKind::Reserve, "EP-0001", 3, "L1"), kT0);
    CHECK_CODE(w.apply(draft(EventKind::Reserve, "EP-0001", 1, "L2"), kT0), ErrorCode::IllegalTransition);
    CHECK_CODE(w.apply(draft(EventKind::Pick, "EP-0001", 1, "L2"), kT0), ErrorCode::IllegalTransition);
    CHECK_CODE(w.apply(draft(EventKind::Receive, "EP-0001", 1, "L1"), kT0), ErrorCode::IllegalTransition);
}

TEST_CASE("refused events leave no trace") {
    auto w = stocked(3);
    auto before = w.items();
    CHECK_THROWS_AS(w.apply(draft(EventKind::RouteRecycle, "EP-0001", 4), kT0), DomainError);
    CHECK(w.items() == before);
    CHECK(w.offset() == 1);
}

TEST_CASE("end-of-life items cannot be reserved") {
    auto w = stocked(3);
    auto meta = draft(EventKind::UpdateMetadata, "EP-0001", 0);
    meta.payload = {{"condition", "D"}};
    w.apply(meta, kT0);
    CHECK(w.get("EP-0001").status() == ItemStatus::EndOfLife);
    CHECK(w.get("EP-0001").available_for_outbound() == 0);
    CHECK_CODE(w.apply(draft(EventKind::Reserve, "EP-0001", 1, "L"), kT0), ErrorCode::IllegalTransition);
    w.apply(draft(EventKind::RouteRecycle, "EP-0001", 3), kT0);
    CHECK(w.get("EP-0001").stock.recycled == 3);
}

TEST_CASE("retire ends an item once nothing is held") {
    auto w = stocked(4);
    w.apply(draft(EventKind::Reserve, "EP-0001", 1, "L"), kT0);
    w.apply(draft(EventKind::Retire, "EP-0001", 3), kT0);
    CHECK_FALSE(w.get("EP-0001").retired);
    CHECK_CODE(w.apply(draft(EventKind::Retire, "EP-0001", 0), kT0), ErrorCode::IllegalTransition);
    w.apply(draft(EventKind::ReleaseReservation, "EP-0001", 1, "L"), kT0);
    w.apply(draft(EventKind::Retire, "EP-0001", 1), kT0);
    CHECK(w.get("EP-0001").retired);
    CHECK(w.get("EP-0001").status() == ItemStatus::Retired);
    auto in = draft(EventKind::AdjustQuantity, "EP-0001", 1);
    CHECK_CODE(w.apply(in, kT0), ErrorCode::IllegalTransition);
}

TEST_CASE("inspect regrades without moving stock") {
    auto w = stocked(4);
    auto e = draft(EventKind::Inspect, "EP-0001", 4);
    e.payload = {{"condition", "C"}};
    w.apply(e, kT0);
    CHECK(w.get("EP-0001").condition == ConditionGrade::C);
    CHECK(w.get("EP-0001").stock.on_hand == 4);
}

TEST_CASE("adjust direction must be known") {
    auto w = stocked(4);
    auto e = draft(EventKind::AdjustQuantity, "EP-0001", 1);
    e.payload = {{"direction", "sideways"}};
    CHECK_CODE(w.apply(e, kT0), ErrorCode::Validation);
}

TEST_CASE("metadata patches validate and apply") {
    auto w = stocked(4);
    auto e = draft(EventKind::UpdateMetadata, "EP-0001", 0);
    e.payload = Json::object();
    CHECK_CODE(w.apply(e, kT0), ErrorCode::Validation);
    e.payload = {{"remaining_lifespan", -1}};
    CHECK_CODE(w.apply(e, kT0), ErrorCode::Validation);
    e.payload = {{"location", "Z-9"}, {"expiry_date", "2027-01-31"}};
    w.apply(e, kT0);
    CHECK(w.get("EP-0001").location == "Z-9");
    CHECK(w.get("EP-0001").expiry_date == Date::parse("2027-01-31"));
}

TEST_CASE("expected version guards against stale writes") {
    auto w = stocked(4);
    auto e = draft(EventKind::Inspect, "EP-0001", 1);
    e.expected_version = 1;
    w.apply(e, kT0);
    try {
        w.apply(e, kT0);
        FAIL("expected StaleVersion");
    } catch (const StaleVersionError& err) {
        CHECK(err.current_version() == 2);
    }
}

TEST_CASE("prepared batch is invisible until commit and stale after another commit") {
    auto w = stocked(4);
    std::vector<EventDraft> batch{draft(EventKind::Reserve, "EP-0001", 2, "L"),
                                  draft(EventKind::Pick, "EP-0001", 2, "L")};
    auto pending = w.prepare(batch, kT0);
    CHECK(w.get("EP-0001").quantity_reserved() == 0);
    CHECK(pending.events.size() == 2);
    CHECK(pending.events[1].sequence == 3);
    auto other = w.prepare(std::vector<EventDraft>{draft(EventKind::Inspect, "EP-0001", 1)}, kT0);
    w.commit(std::move(pending));
    CHECK(w.get("EP-0001").quantity_reserved() == 2);
    CHECK_THROWS_AS(w.commit(std::move(other)), StaleVersionError);
}

TEST_CASE("timestamps never go backwards") {
    auto w = stocked(4);
    auto e = w.apply(draft(EventKind::Inspect, "EP-0001", 1), Timestamp{0});
    CHECK(e.timestamp == kT0);
}

TEST_CASE("query filters and pages deterministically") {
    Warehouse w;
    w.apply(register_draft(make_item("B-1", 5, Category::OfficeSupplies, "paper")), kT0);
    w.apply(register_draft(make_item("A-1", 0, Category::EventProps, "metal")), kT0);
    w.apply(register_draft(make_item("C-1", 2, Category::EventProps, "wood-based")), kT0);
    auto all = w.query({});
    REQUIRE(all.size() == 3);
    CHECK(all[0].label == "A-1");
    ItemFilter f;
    f.category = Category::EventProps;
    CHECK(w.query(f).size() == 2);
    f.available_only = true;
    CHECK(w.query(f).size() == 1);
    ItemFilter text;
    text.text = "METAL";
    CHECK(w.query(text).size() == 1);
    ItemFilter status;
    status.status = ItemStatus::OutOfStock;
    CHECK(w.query(status).front().label == "A-1");
    CHECK(w.query({}, Page{1, 1}).front().label == "B-1");
}

TEST_CASE("snapshot lists tallies by label") {
    auto w = stocked(4);
    auto s = w.snapshot();
    CHECK(s.as_of == 1);
    CHECK(s.items.at("EP-0001").on_hand == 4);
}

TEST_CASE("event codec round-trips every kind") {
    EventGenerator gen(3);
    Warehouse w;
    for (int i = 0; i < 400; ++i) w.apply(gen.legal(w), Timestamp{kT0.millis + i});
    std::set<EventKind> seen;
    for (const auto& e : w.ledger()) {
        seen.insert(e.kind);
        auto line = encode_event(e);
        CHECK(line.find('\n') == std::string::npos);
        CHECK(decode_event(line) == e);
        CHECK(encode_event(decode_event(line)) == line);
    }
    CHECK(seen.size() >= 12);
}

TEST_CASE("item record codec round-trips") {
    auto w = stocked(4);
    Json j = w.get("EP-0001");
    CHECK(j.get<ItemRecord>() == w.get("EP-0001"));
}

TEST_CASE("undecodable log lines are corrupt") {
    CHECK_CODE(decode_event("{not json"), ErrorCode::CorruptLog);
}

TEST_CASE("conservation holds after every random legal event") {
    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
        EventGenerator gen(seed);
        Warehouse w;
        for (int i = 0; i < 1500; ++i) {
            auto d = gen.legal(w);
            w.apply(d, kT0);
            auto violation = conservation_violation(w.items().at(d.item_label));
            if (violation) FAIL(*violation);
        }
    }
}

TEST_CASE("illegal events are refused without changing state") {
    EventGenerator gen(11);
    Warehouse w;
    for (int i = 0; i < 300; ++i) w.apply(gen.legal(w), kT0);
    auto before = w.items();
    for (int i = 0; i < 200; ++i) {
        CHECK_THROWS_AS(w.apply(gen.illegal(w), kT0), DomainError);
    }
    CHECK(w.items() == before);
}

TEST_CASE("replay of the ledger rebuilds the live state") {
    for (std::uint32_t seed = 1; seed <= 10; ++seed) {
        EventGenerator gen(seed);
        Warehouse w;
        for (int i = 0; i < 1000; ++i) w.apply(gen.legal(w), Timestamp{kT0.millis + i});
        auto r = Warehouse::replay(w.ledger());
        CHECK(r.same_state(w));
        CHECK(r.snapshot() == w.snapshot());
        CHECK(r.state_json() == w.state_json());
    }
}

TEST_CASE("replay detects a missing event and names it") {
    EventGenerator gen(5);
    Warehouse w;
    for (int i = 0; i < 200; ++i) w.apply(gen.legal(w), kT0);
    auto log = w.ledger();
    auto dropped = log.begin() + 100;
    auto next = *(dropped + 1);
    log.erase(dropped);
    try {
        Warehouse::replay(log);
        FAIL("expected CorruptLog");
    } catch (const CorruptLogError& e) {
        CHECK(e.offset() == next.offset);
        CHECK(e.sequence() == next.sequence);
    }
}

TEST_CASE("replay detects a per-item sequence gap and reordering") {
    auto w = stocked(4);
    w.apply(draft(EventKind::Inspect, "EP-0001", 1), kT0);
    auto log = w.ledger();
    log[1].sequence = 5;
    CHECK_THROWS_AS(Warehouse::replay(log), CorruptLogError);
    log = w.ledger();
    log[1].timestamp.millis -= 1;
    CHECK_THROWS_AS(Warehouse::replay(log), CorruptLogError);
    log = w.ledger();
    log[1].quantity = 99;
    CHECK_THROWS_AS(Warehouse::replay(log), CorruptLogError);
}

TEST_CASE("event log persists and reads back") {
    TempDir dir;
    EventGenerator gen(9);
    Warehouse w;
    for (int i = 0; i < 100; ++i) w.apply(gen.legal(w), kT0);
    {
        EventLog log(dir / "events.jsonl");
        log.append(w.ledger());
    }
    auto read = EventLog::read(dir / "events.jsonl");
    CHECK(read == w.ledger());
    auto lines = read_lines(dir / "events.jsonl");
    lines[40] = "{\"garbage\": true}";
    write_lines(dir / "events.jsonl", lines);
    CHECK_THROWS_AS(EventLog::read(dir / "events.jsonl"), CorruptLogError);
}

TEST_CASE("bootstrap csv parses and round-trips") {
    std::string text =
        "label,name,category,material,quantity,condition,remaining_lifespan,expiry_date,embodied_carbon_per_unit,"
        "location\n"
        "EP-0001,Arch,EventProps,wood-based,4,B,3,,12.5,A-01\n"
        "MED-0001,Kit,MedicalSupplies,mixed,10,A,1,2026-03-01,0.4,M-02\n";
    auto drafts = parse_item_csv(text);
    REQUIRE(drafts.size() == 2);
    CHECK(drafts[0].condition == ConditionGrade::B);
    CHECK(drafts[1].expiry_date == Date::parse("2026-03-01"));
    auto again = parse_item_csv(to_item_csv(drafts));
    REQUIRE(again.size() == 2);
    CHECK(Json(again[0]) == Json(drafts[0]));
    CHECK(Json(again[1]) == Json(drafts[1]));
}

TEST_CASE("bootstrap csv errors name the line or the label") {
    std::string header =
        "label,name,category,material,quantity,condition,remaining_lifespan,expiry_date,embodied_carbon_per_unit,"
        "location\n";
    CHECK_CODE(parse_item_csv(header + "A,x,EventProps,m,1,A,1,,0,L\nA,y,EventProps,m,1,A,1,,0,L\n"),
               ErrorCode::DuplicateLabel);
    try {
        parse_item_csv(header + "A,x,EventProps,m,1,A,1,,0,L\nB,y,Spaceships,m,1,A,1,,0,L\n");
        FAIL("expected ParseError");
    } catch (const DomainError& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_CODE(parse_item_csv(header + "A,x,EventProps,m,-1,A,1,,0,L\n"), ErrorCode::ParseError);
}
