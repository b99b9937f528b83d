#include "circuloop/workflow/codec.hpp"

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"

namespace circuloop::workflow {

namespace {

template <typename Enum, typename Parser>
Enum enum_from(const Json& j, Parser parse, const char* what) {
    if (!j.is_string()) fail(ErrorCode::Validation, std::string(what) + " must be a string");
    auto v = parse(j.get<std::string>());
    if (!v) fail(ErrorCode::Validation, "unknown " + std::string(what) + " '" + j.get<std::string>() + "'");
    return *v;
}

Json actor_json(const Actor& a) { return Json{{"role", a.role}, {"actor_id", a.actor_id}}; }

Actor actor_from(const Json& j) { return Actor{j.at("role").get<Role>(), j.value("actor_id", std::string{})}; }

}  // namespace

void to_json(Json& j, ListState s) { j = std::string(to_string(s)); }
void from_json(const Json& j, ListState& s) { s = enum_from<ListState>(j, parse_list_state, "list state"); }
void to_json(Json& j, Disposition d) { j = std::string(to_string(d)); }
void from_json(const Json& j, Disposition& d) { d = enum_from<Disposition>(j, parse_disposition, "disposition"); }
void to_json(Json& j, LineOrigin o) { j = std::string(to_string(o)); }
void from_json(const Json& j, LineOrigin& o) { o = enum_from<LineOrigin>(j, parse_line_origin, "line origin"); }

void to_json(Json& j, const ListLine& l) {
    Json disp = Json::object();
    for (Disposition d : kAllDispositions) disp[std::string(to_string(d))] = l.disposed(d);
    j = Json{{"item_label", l.item_label},
             {"quantity_requested", l.quantity_requested},
             {"quantity_dispatched", l.quantity_dispatched},
             {"origin", l.origin},
             {"dispositions", std::move(disp)}};
    if (l.replaced_purchase) j["replaced_purchase"] = *l.replaced_purchase;
}

void from_json(const Json& j, ListLine& l) {
    l.item_label = j.at("item_label").get<std::string>();
    l.quantity_requested = j.at("quantity_requested").get<std::int64_t>();
    l.quantity_dispatched = j.value("quantity_dispatched", std::int64_t{0});
    l.origin = j.at("origin").get<LineOrigin>();
    l.dispositions.clear();
    if (auto it = j.find("dispositions"); it != j.end()) {
        for (auto d = it->begin(); d != it->end(); ++d) {
            auto disp = parse_disposition(d.key());
            if (!disp) fail(ErrorCode::Validation, "unknown disposition " + d.key());
            auto q = d.value().get<std::int64_t>();
            if (q != 0) l.dispositions[*disp] = q;
        }
    }
    if (j.contains("replaced_purchase")) l.replaced_purchase = j.at("replaced_purchase").get<std::string>();
}

void to_json(Json& j, const Notification& n) {
    j = Json{{"id", n.id},
             {"recipient", n.recipient},
             {"list_id", n.list_id},
             {"required_action", n.required_action},
             {"created", n.created.to_iso8601()},
             {"acknowledged", n.acknowledged}};
}

Json export_list(const ProjectList& list) {
    Json milestones = Json::array();
    for (const auto& m : list.milestones) {
        milestones.push_back(Json{{"milestone", m.state},
                                  {"actor", m.actor},
                                  {"actor_id", m.actor_id},
                                  {"timestamp", m.timestamp.to_iso8601()}});
    }
    Json materials = Json::array();
    for (const auto& link : list.materials) {
        materials.push_back(Json{{"material_id", link.material_id},
                                 {"note", link.note},
                                 {"linked_by", link.linked_by},
                                 {"actor_id", link.actor_id},
                                 {"timestamp", link.timestamp.to_iso8601()}});
    }
    Json j{{"schema", kListExportSchema},
           {"list_id", list.list_id},
           {"project_name", list.project_name},
           {"client", list.client},
           {"state", list.state},
           {"high_value", list.high_value},
           {"version", list.version},
           {"created_by", actor_json(list.created_by)},
           {"lines", list.lines},
           {"milestones", std::move(milestones)},
           {"materials", std::move(materials)},
           {"purchase_lines", list.purchase_lines()},
           {"refuse_count", list.substituted_lines()}};
    j["report"] = list.report ? *list.report : Json();
    return j;
}

Json encode_workflow_event(const WorkflowEvent& event) {
    Json j{{"seq", event.seq},
           {"timestamp", event.timestamp.to_iso8601()},
           {"actor", actor_json(event.actor)},
           {"list_id", event.list_id}};
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ListCreated>) {
                j["type"] = "ListCreated";
                j["project_name"] = c.project_name;
                j["client"] = c.client;
                j["lines"] = c.lines;
                j["high_value"] = c.high_value;
            } else if constexpr (std::is_same_v<T, LineAdded>) {
                j["type"] = "LineAdded";
                j["line"] = c.line;
                j["high_value"] = c.high_value;
            } else if constexpr (std::is_same_v<T, LineSubstituted>) {
                j["type"] = "LineSubstituted";
                j["purchase_label"] = c.purchase_label;
                j["stock_label"] = c.stock_label;
                j["high_value"] = c.high_value;
            } else if constexpr (std::is_same_v<T, Transitioned>) {
                j["type"] = "Transitioned";
                j["from"] = c.from;
                j["to"] = c.to;
                if (!c.dispatch_quantities.empty()) j["dispatch_quantities"] = c.dispatch_quantities;
                if (c.report) j["report"] = *c.report;
            } else if constexpr (std::is_same_v<T, DispositionRecorded>) {
                j["type"] = "DispositionRecorded";
                j["item_label"] = c.item_label;
                j["disposition"] = c.disposition;
                j["quantity"] = c.quantity;
            } else if constexpr (std::is_same_v<T, MaterialLinked>) {
                j["type"] = "MaterialLinked";
                j["material_id"] = c.material_id;
                j["note"] = c.note;
            } else if constexpr (std::is_same_v<T, NotificationAcknowledged>) {
                j["type"] = "NotificationAcknowledged";
                j["notification_id"] = c.notification_id;
            }
        },
        event.change);
    return j;
}

WorkflowEvent decode_workflow_event(const Json& j) {
    try {
        WorkflowEvent e;
        e.seq = j.at("seq").get<std::int64_t>();
        e.timestamp = Timestamp::parse_iso8601(j.at("timestamp").get<std::string>());
        e.actor = actor_from(j.at("actor"));
        e.list_id = j.at("list_id").get<std::string>();
        const auto type = j.at("type").get<std::string>();
        if (type == "ListCreated") {
            e.change = ListCreated{j.at("project_name").get<std::string>(), j.at("client").get<std::string>(),
                                   j.at("lines").get<std::vector<ListLine>>(), j.at("high_value").get<bool>()};
        } else if (type == "LineAdded") {
            e.change = LineAdded{j.at("line").get<ListLine>(), j.at("high_value").get<bool>()};
        } else if (type == "LineSubstituted") {
            e.change = LineSubstituted{j.at("purchase_label").get<std::string>(),
                                       j.at("stock_label").get<std::string>(), j.at("high_value").get<bool>()};
        } else if (type == "Transitioned") {
            Transitioned t;
            t.from = j.at("from").get<ListState>();
            t.to = j.at("to").get<ListState>();
            if (j.contains("dispatch_quantities")) {
                t.dispatch_quantities = j.at("dispatch_quantities").get<std::map<std::string, std::int64_t>>();
            }
            if (j.contains("report")) t.report = j.at("report");
            e.change = std::move(t);
        } else if (type == "DispositionRecorded") {
            e.change = DispositionRecorded{j.at("item_label").get<std::string>(),
                                           j.at("disposition").get<Disposition>(),
                                           j.at("quantity").get<std::int64_t>()};
        } else if (type == "MaterialLinked") {
            e.change = MaterialLinked{j.at("material_id").get<std::string>(), j.value("note", std::string{})};
        } else if (type == "NotificationAcknowledged") {
            e.change = NotificationAcknowledged{j.at("notification_id").get<std::string>()};
        } else {
            fail(ErrorCode::CorruptLog, "unknown workflow record type " + type);
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::CorruptLog, std::string("unreadable workflow record: ") + ex.what());
    }
}

}  // namespace circuloop::workflow
