#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "circuloop/core/error.hpp"
#include "circuloop/indicators/metrics.hpp"
#include "circuloop/indicators/report.hpp"
#include "circuloop/inventory/bootstrap.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/service/demo.hpp"
#include "circuloop/service/json_io.hpp"
#include "circuloop/service/platform.hpp"
#include "circuloop/workflow/codec.hpp"

namespace py = pybind11;
using namespace circuloop;
using service::Json;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_py(const py::handle& obj) {
    auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return Json::parse(text);
}

Actor actor(const std::string& role, const std::string& actor_id) {
    auto r = parse_role(role);
    if (!r) fail(ErrorCode::Validation, "unknown role '" + role + "'");
    return Actor{*r, actor_id};
}

Json ratio_json(const Ratio& r, int decimals) {
    return Json{{"numerator", r.numerator}, {"denominator", r.denominator}, {"value", r.rounded(decimals)}};
}

/// Platform plus an optional manual clock the tests can drive.
class PyPlatform {
public:
    PyPlatform(std::optional<std::string> data_dir, std::optional<std::string> factors_csv,
               std::optional<std::string> permissions, int high_value_threshold,
               std::optional<std::string> start_time) {
        service::PlatformOptions o;
        if (data_dir) o.data_dir = *data_dir;
        if (factors_csv) o.factors = indicators::EmissionFactorTable::parse_csv(*factors_csv);
        if (permissions) o.matrix = workflow::PermissionMatrix::parse(*permissions);
        o.workflow.high_value_threshold = high_value_threshold;
        if (start_time) {
            clock_ = std::make_shared<ManualClock>(Timestamp::parse_iso8601(*start_time));
            o.clock = clock_->as_clock();
        }
        platform_ = std::make_unique<service::Platform>(std::move(o));
    }

    service::Platform& p() { return *platform_; }

    void advance_hours(double hours) {
        if (!clock_) fail(ErrorCode::Validation, "platform uses the system clock");
        clock_->advance_hours(hours);
    }

private:
    std::shared_ptr<ManualClock> clock_;
    std::unique_ptr<service::Platform> platform_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "circuloop core bindings";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> domain_error;
    domain_error.call_once_and_store_result(
        [&]() { return py::object(py::exception<DomainError>(m, "DomainError", PyExc_RuntimeError)); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            const py::object& cls = domain_error.get_stored();
            py::object err = cls(e.what());
            err.attr("code") = error_code_name(e.code());
            err.attr("status") = http_status(e.code());
            PyErr_SetObject(cls.ptr(), err.ptr());
        }
    });

    m.def("recovery_rate", [](std::int64_t returned, std::int64_t intended) {
        return to_py(ratio_json(indicators::recovery_rate(returned, intended), 4));
    });
    m.def("improvement_ratio", [](std::vector<int> ratings) {
        return to_py(ratio_json(indicators::improvement_ratio({"", std::move(ratings)}), 2));
    });
    m.def("selection_share", &indicators::selection_share);
    m.def("carbon_avoided", [](const py::list& lines, const std::string& factors_csv) {
        auto table = indicators::EmissionFactorTable::parse_csv(factors_csv);
        std::vector<indicators::ReturnedLine> parsed;
        for (const auto& item : lines) {
            auto j = from_py(item);
            parsed.push_back({j.at("category").get<inventory::Category>(), j.at("material").get<std::string>(),
                              j.at("quantity").get<std::int64_t>()});
        }
        auto c = indicators::carbon_avoided(parsed, table);
        Json per = Json::object();
        for (const auto& [cat, kg] : c.per_category_kg) per[std::string(inventory::to_string(cat))] = kg;
        return to_py(Json{{"total_kg", c.total_kg}, {"per_category_kg", per}, {"factor_version", c.factor_version}});
    });
    m.def("demo_factors_csv", &service::demo_factors_csv);
    m.def("demo_inventory_csv", [] { return inventory::to_item_csv(service::demo_inventory()); });
    m.def("demo_materials_csv", [] { return materials::to_csv(service::demo_materials()); });

    py::class_<PyPlatform>(m, "Platform")
        .def(py::init<std::optional<std::string>, std::optional<std::string>, std::optional<std::string>, int,
                      std::optional<std::string>>(),
             py::arg("data_dir") = py::none(), py::arg("factors_csv") = py::none(),
             py::arg("permissions") = py::none(), py::arg("high_value_threshold") = 3,
             py::arg("start_time") = py::none())
        .def("advance_hours", &PyPlatform::advance_hours)
        .def("import_items",
             [](PyPlatform& self, const std::string& csv, const std::string& role, const std::string& actor_id) {
                 return self.p().import_items(csv, actor(role, actor_id));
             },
             py::arg("csv"), py::arg("role"), py::arg("actor_id") = "python")
        .def("register_item",
             [](PyPlatform& self, const py::dict& draft, const std::string& role, const std::string& actor_id) {
                 return to_py(service::to_json(
                     self.p().register_item(from_py(draft).get<inventory::ItemDraft>(), actor(role, actor_id))));
             },
             py::arg("draft"), py::arg("role"), py::arg("actor_id") = "python")
        .def("record_events",
             [](PyPlatform& self, const py::list& events, const std::string& role, const std::string& actor_id) {
                 std::vector<inventory::EventDraft> drafts;
                 for (const auto& e : events) drafts.push_back(service::parse_event_draft(from_py(e), actor(role, actor_id)));
                 Json out = Json::array();
                 for (const auto& e : self.p().record_events(drafts)) out.push_back(e);
                 return to_py(out);
             },
             py::arg("events"), py::arg("role"), py::arg("actor_id") = "python")
        .def("item", [](PyPlatform& self, const std::string& label) { return to_py(service::to_json(self.p().item(label))); })
        .def("items",
             [](PyPlatform& self, const std::string& text, std::optional<std::string> category, std::size_t limit) {
                 inventory::ItemFilter f;
                 f.text = text;
                 if (category) f.category = Json(*category).get<inventory::Category>();
                 Json out = Json::array();
                 for (const auto& r : self.p().items(f, {0, limit})) out.push_back(service::to_json(r));
                 return to_py(out);
             },
             py::arg("text") = "", py::arg("category") = py::none(), py::arg("limit") = 100000)
        .def("create_list",
             [](PyPlatform& self, const py::dict& request, const std::string& role, const std::string& actor_id) {
                 auto l = self.p().create_list(service::parse_outbound_request(from_py(request)), actor(role, actor_id));
                 return to_py(self.p().export_list(l.list_id));
             },
             py::arg("request"), py::arg("role"), py::arg("actor_id") = "python")
        .def("transition",
             [](PyPlatform& self, const std::string& list_id, const std::string& to, const std::string& role,
                const std::string& actor_id, std::map<std::string, std::int64_t> dispatch,
                std::optional<std::int64_t> version) {
                 auto state = workflow::parse_list_state(to);
                 if (!state) fail(ErrorCode::Validation, "unknown state '" + to + "'");
                 workflow::TransitionOptions o{std::move(dispatch), version};
                 self.p().transition(list_id, *state, actor(role, actor_id), o);
                 return to_py(self.p().export_list(list_id));
             },
             py::arg("list_id"), py::arg("to"), py::arg("role"), py::arg("actor_id") = "python",
             py::arg("dispatch") = std::map<std::string, std::int64_t>{}, py::arg("version") = py::none())
        .def("record_disposition",
             [](PyPlatform& self, const std::string& list_id, const std::string& label, const std::string& disposition,
                std::int64_t quantity, const std::string& role, const std::string& actor_id) {
                 auto d = workflow::parse_disposition(disposition);
                 if (!d) fail(ErrorCode::Validation, "unknown disposition '" + disposition + "'");
                 self.p().record_disposition(list_id, label, *d, quantity, actor(role, actor_id));
                 return to_py(self.p().export_list(list_id));
             },
             py::arg("list_id"), py::arg("item_label"), py::arg("disposition"), py::arg("quantity"), py::arg("role"),
             py::arg("actor_id") = "python")
        .def("reconcile",
             [](PyPlatform& self, const std::string& list_id, const std::string& role, const std::string& actor_id) {
                 self.p().reconcile(list_id, actor(role, actor_id));
                 return to_py(self.p().export_list(list_id));
             },
             py::arg("list_id"), py::arg("role"), py::arg("actor_id") = "python")
        .def("link_material",
             [](PyPlatform& self, const std::string& list_id, const std::string& material_id, const std::string& note,
                const std::string& role, const std::string& actor_id) {
                 self.p().link_material(list_id, material_id, note, actor(role, actor_id));
                 return to_py(self.p().export_list(list_id));
             },
             py::arg("list_id"), py::arg("material_id"), py::arg("note"), py::arg("role"),
             py::arg("actor_id") = "python")
        .def("list", [](PyPlatform& self, const std::string& list_id) { return to_py(self.p().export_list(list_id)); })
        .def("project_report",
             [](PyPlatform& self, const std::string& list_id) {
                 return to_py(indicators::to_json(self.p().project_report(list_id)));
             })
        .def("period_report",
             [](PyPlatform& self, const std::string& from, const std::string& to) {
                 return to_py(indicators::to_json(self.p().period_report(service::parse_period_bound(from, false),
                                                                         service::parse_period_bound(to, true))));
             })
        .def("record_audit",
             [](PyPlatform& self, const std::string& csv, const std::string& role, const std::string& actor_id) {
                 return to_py(service::to_json(self.p().record_audit(service::parse_audit_csv(csv), actor(role, actor_id))));
             },
             py::arg("csv"), py::arg("role"), py::arg("actor_id") = "python")
        .def("import_materials",
             [](PyPlatform& self, const std::string& csv, const std::string& role, const std::string& actor_id) {
                 return self.p().import_materials(csv, actor(role, actor_id));
             },
             py::arg("csv"), py::arg("role"), py::arg("actor_id") = "python")
        .def("search_materials",
             [](PyPlatform& self, const py::dict& query) {
                 Json out = Json::array();
                 for (const auto& s : self.p().search_materials(from_py(query).get<materials::MaterialQuery>())) {
                     out.push_back(service::to_json(s));
                 }
                 return to_py(out);
             })
        .def("run_case_study",
             [](PyPlatform& self, std::optional<double> hours_per_step) {
                 service::CaseStudyOptions o;
                 if (hours_per_step) o.after_step = [&self, h = *hours_per_step](workflow::ListState) { self.advance_hours(h); };
                 auto l = service::run_case_study(self.p(), o);
                 return to_py(self.p().export_list(l.list_id));
             },
             py::arg("hours_per_step") = py::none())
        .def("checkpoint",
             [](PyPlatform& self) -> std::optional<std::string> {
                 auto path = self.p().checkpoint();
                 if (!path) return std::nullopt;
                 return path->string();
             })
        .def("state", [](PyPlatform& self) { return to_py(self.p().state_json()); })
        .def_property_readonly("ledger_offset", [](PyPlatform& self) { return self.p().ledger_offset(); })
        .def_static("verify", [](const std::string& data_dir) {
            auto r = service::Platform::verify(data_dir, service::PlatformOptions{});
            return to_py(Json{{"events", r.events},
                              {"journal_records", r.journal_records},
                              {"snapshots_checked", r.snapshots_checked}});
        });
}
