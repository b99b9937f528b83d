#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"
#include "circuloop/indicators/metrics.hpp"
#include "circuloop/inventory/bootstrap.hpp"
#include "circuloop/inventory/codec.hpp"
#include "circuloop/service/auth.hpp"
#include "circuloop/service/config.hpp"
#include "circuloop/service/demo.hpp"
#include "circuloop/service/http_api.hpp"
#include "circuloop/service/json_io.hpp"
#include "circuloop/service/platform.hpp"
#include "circuloop/workflow/codec.hpp"

extern char** environ;

namespace {

using namespace circuloop;
using service::Json;

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << text;
}

std::pair<std::string, std::string> split_pair(const std::string& text, char sep, const char* what) {
    auto at = text.find(sep);
    if (at == std::string::npos || at == 0) throw UsageError(std::string("expected ") + what + ", got '" + text + "'");
    return {text.substr(0, at), text.substr(at + 1)};
}

std::int64_t to_int(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        auto v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw UsageError(std::string(what) + " must be an integer, got '" + text + "'");
}

std::string ratio_text(const std::optional<Ratio>& r) {
    if (!r) return "undefined";
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << r->rounded(4) << " (" << r->numerator << "/" << r->denominator << ")";
    return out.str();
}

void print_row(const std::string& key, const std::string& value) {
    std::cout << std::left << std::setw(24) << key << value << "\n";
}

void print_report(const indicators::IndicatorReport& r) {
    std::cout << "report " << r.scope_kind << " " << r.scope_id << "\n";
    print_row("lists", std::to_string(r.list_ids.size()));
    print_row("dispatched", std::to_string(r.dispatched_units));
    print_row("consumed", std::to_string(r.consumed_units));
    print_row("returned", std::to_string(r.returned_units));
    print_row("temp", std::to_string(r.temp_stored_units));
    print_row("intended for reuse", std::to_string(r.intended_for_reuse));
    print_row("recovery rate", ratio_text(r.recovery_rate));
    print_row("reuse sourcing rate", ratio_text(r.reuse_sourcing_rate));
    print_row("loss/damage rate", ratio_text(r.loss_damage_rate));
    print_row("recycle rate", ratio_text(r.recycle_rate));
    print_row("purchase lines", std::to_string(r.purchase_lines));
    print_row("refuse count", std::to_string(r.refuse_count));
    print_row("redeployments", std::to_string(r.four_r.reuse.redeployment_count));
    if (r.cycle_time_hours) {
        std::ostringstream h;
        h << std::fixed << std::setprecision(1) << *r.cycle_time_hours;
        print_row("cycle time (h)", h.str());
    }
    print_row("inventory accuracy", ratio_text(r.inventory_accuracy));
    std::ostringstream kg;
    kg << std::fixed << std::setprecision(1) << r.carbon.total_kg;
    print_row("carbon avoided (kg)", kg.str() + " [factors " + r.carbon.factor_version + "]");
}

void print_list(const workflow::ProjectList& l) {
    std::cout << l.list_id << "  " << workflow::to_string(l.state) << "  v" << l.version << "  " << l.project_name
              << "\n";
    for (const auto& line : l.lines) {
        std::cout << "  " << std::left << std::setw(22) << line.item_label << " requested " << line.quantity_requested
                  << " dispatched " << line.quantity_dispatched << " open " << line.undispositioned() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circuloop: event-sourced warehouse and project logistics service"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_file;
    std::optional<std::string> data_dir;
    std::vector<std::string> sets;
    std::optional<std::string> role_name;
    std::string actor_id = "cli";
    bool as_json = false;
    app.add_option("--config", config_file, "key=value config file");
    app.add_option("--data-dir", data_dir, "data directory (overrides config)");
    app.add_option("--set", sets, "config override key=value (repeatable)");
    app.add_option("--as", role_name, "acting role for mutating commands");
    app.add_option("--actor", actor_id, "acting actor id")->capture_default_str();
    app.add_flag("--json", as_json, "machine-readable output");

    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    std::optional<std::string> listen;
    serve->add_option("--listen", listen, "host:port");

    auto* import = app.add_subcommand("import", "bulk imports")->require_subcommand(1);
    std::string import_path;
    auto* import_items = import->add_subcommand("items", "register items from a bootstrap CSV");
    import_items->add_option("csv", import_path)->required();
    auto* import_materials = import->add_subcommand("materials", "upsert the materials catalogue from CSV");
    import_materials->add_option("csv", import_path)->required();

    auto* items = app.add_subcommand("items", "search the warehouse");
    std::string item_text;
    std::optional<std::string> item_category;
    std::size_t item_limit = 50;
    items->add_option("--text", item_text);
    items->add_option("--category", item_category);
    items->add_option("--limit", item_limit)->capture_default_str();

    auto* list = app.add_subcommand("list", "project lists")->require_subcommand(1);
    std::string list_id;
    auto* list_create = list->add_subcommand("create", "create an outbound list");
    std::optional<std::string> create_id;
    std::string project_name;
    std::string client;
    std::vector<std::string> line_specs;
    list_create->add_option("--id", create_id);
    list_create->add_option("--project", project_name);
    list_create->add_option("--client", client);
    list_create->add_option("--line", line_specs, "LABEL=QTY[:FromStock|NewPurchase]")->required();
    auto* list_show = list->add_subcommand("show", "show one list, or all lists");
    list_show->add_option("id", list_id);
    auto* list_transition = list->add_subcommand("transition", "confirm a milestone");
    std::string target_state;
    std::vector<std::string> dispatch_specs;
    std::optional<std::int64_t> expected_version;
    list_transition->add_option("id", list_id)->required();
    list_transition->add_option("state", target_state)->required();
    list_transition->add_option("--dispatch", dispatch_specs, "LABEL=QTY shipped on Dispatched");
    list_transition->add_option("--version", expected_version);
    auto* list_dispose = list->add_subcommand("dispose", "record a line disposition");
    std::string dispose_label;
    std::string dispose_kind;
    std::int64_t dispose_qty = 0;
    list_dispose->add_option("id", list_id)->required();
    list_dispose->add_option("label", dispose_label)->required();
    list_dispose->add_option("disposition", dispose_kind)->required();
    list_dispose->add_option("quantity", dispose_qty)->required();
    auto* list_reconcile = list->add_subcommand("reconcile", "close the inbound list");
    list_reconcile->add_option("id", list_id)->required();
    list_reconcile->add_option("--version", expected_version);
    auto* list_link = list->add_subcommand("link", "link a material to a list");
    std::string material_id;
    std::string note;
    list_link->add_option("id", list_id)->required();
    list_link->add_option("material", material_id)->required();
    list_link->add_option("--note", note);

    auto* report = app.add_subcommand("report", "indicator reports")->require_subcommand(1);
    bool as_csv = false;
    report->add_flag("--csv", as_csv, "CSV output");
    auto* report_project = report->add_subcommand("project", "report for one reconciled list");
    report_project->add_option("id", list_id)->required();
    auto* report_period = report->add_subcommand("period", "aggregate over lists reconciled in a period");
    std::string period_from;
    std::string period_to;
    report_period->add_option("from", period_from)->required();
    report_period->add_option("to", period_to)->required();
    auto* report_survey = report->add_subcommand("survey", "improvement ratios from CSV indicator,ratings[,absolute_score]");
    std::string survey_path;
    report_survey->add_option("file", survey_path)->required();
    auto* report_share = report->add_subcommand("share", "selected / n as a percentage");
    std::int64_t share_selected = 0;
    std::int64_t share_n = 0;
    report_share->add_option("selected", share_selected)->required();
    report_share->add_option("n", share_n)->required();

    auto* audit = app.add_subcommand("audit", "record a cycle count from CSV label,counted");
    std::string audit_path;
    audit->add_option("csv", audit_path)->required();

    auto* mats = app.add_subcommand("materials", "search the materials catalogue");
    std::vector<std::string> terms;
    std::optional<std::string> mat_category;
    std::optional<bool> recyclable;
    std::optional<bool> certified;
    std::optional<double> max_carbon;
    std::optional<std::int64_t> min_cycles;
    std::optional<std::string> fire_rating;
    mats->add_option("terms", terms);
    mats->add_option("--category", mat_category);
    mats->add_option("--recyclable", recyclable);
    mats->add_option("--certified", certified);
    mats->add_option("--max-carbon", max_carbon);
    mats->add_option("--min-cycles", min_cycles);
    mats->add_option("--fire-rating", fire_rating);

    auto* notes = app.add_subcommand("notifications", "pending actions for the acting role");

    auto* verify = app.add_subcommand("replay-verify", "fold the logs from scratch and check every snapshot");

    auto* demo = app.add_subcommand("demo", "demonstration data")->require_subcommand(1);
    std::string demo_dir;
    auto* demo_data = demo->add_subcommand("data", "write the demo CSV and config files");
    demo_data->add_option("dir", demo_dir)->required();
    auto* demo_case = demo->add_subcommand("case-study", "run the single-project journey");

    auto* users = app.add_subcommand("users", "user file helpers")->require_subcommand(1);
    auto* users_add = users->add_subcommand("add", "print a users-file line");
    std::string user_id;
    std::string user_role;
    std::string password;
    users_add->add_option("actor_id", user_id)->required();
    users_add->add_option("role", user_role)->required();
    users_add->add_option("--password", password)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsageError;
    }

    try {
        if (*users_add) {
            auto role = parse_role(user_role);
            if (!role) throw UsageError("unknown role '" + user_role + "'");
            std::cout << service::user_line(user_id, *role, password) << "\n";
            return 0;
        }
        if (*report_survey) {
            auto batches = indicators::parse_survey_csv(read_file(survey_path));
            Json out = Json::array();
            if (as_csv) std::cout << "indicator,n,improvement_ratio,absolute_score\n";
            for (const auto& b : batches) {
                double ratio = indicators::improvement_ratio(b).rounded(2);
                if (as_json) {
                    out.push_back({{"indicator", b.indicator},
                                   {"n", b.n()},
                                   {"improvement_ratio", ratio},
                                   {"absolute_score", b.absolute_score ? Json(*b.absolute_score) : Json(nullptr)}});
                } else if (as_csv) {
                    std::cout << csv::escape(b.indicator) << "," << b.n() << "," << std::fixed << std::setprecision(2)
                              << ratio << "," << (b.absolute_score ? Json(*b.absolute_score).dump() : "") << "\n";
                } else {
                    std::cout << std::left << std::setw(28) << b.indicator << " n=" << b.n() << "  ratio " << std::fixed
                              << std::setprecision(2) << ratio;
                    if (b.absolute_score) std::cout << "  absolute " << std::setprecision(0) << *b.absolute_score;
                    std::cout << "\n";
                }
            }
            if (as_json) std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*report_share) {
            double share = indicators::selection_share(share_selected, share_n);
            if (as_json) std::cout << Json{{"selected", share_selected}, {"n", share_n}, {"percent", share}}.dump(2) << "\n";
            else std::cout << std::fixed << std::setprecision(1) << share << "%\n";
            return 0;
        }
        if (*demo_data) {
            std::filesystem::path dir(demo_dir);
            std::filesystem::create_directories(dir);
            write_file(dir / "bootstrap_items.csv", inventory::to_item_csv(service::demo_inventory()));
            write_file(dir / "materials_demo.csv", materials::to_csv(service::demo_materials()));
            write_file(dir / "demo_factors.csv", service::demo_factors_csv());
            write_file(dir / "survey_demo.csv", service::demo_survey_csv());
            write_file(dir / "permissions.conf", std::string(workflow::PermissionMatrix::default_text()));
            std::cout << "wrote demo data to " << dir.string() << "\n";
            return 0;
        }

        service::Settings overrides;
        for (const auto& s : sets) {
            auto [k, v] = split_pair(s, '=', "key=value");
            overrides[k] = v;
        }
        if (data_dir) overrides["data_dir"] = *data_dir;
        if (listen) overrides["listen"] = *listen;
        std::optional<std::filesystem::path> file;
        if (config_file) file = *config_file;
        service::ServiceConfig config;
        try {
            config = service::resolve_config(file, service::settings_from_environment(environ), overrides);
        } catch (const DomainError& e) {
            std::cerr << "invalid config: " << e.what() << "\n";
            return kUsageError;
        }
        if (auto violation = config.first_violation()) {
            std::cerr << "invalid config: " << *violation << "\n";
            return kUsageError;
        }
        auto options = service::options_from_config(config);

        if (*verify) {
            auto r = service::Platform::verify(config.data_dir, options);
            if (as_json) {
                std::cout << Json{{"events", r.events},
                                  {"journal_records", r.journal_records},
                                  {"snapshots_checked", r.snapshots_checked},
                                  {"snapshot_offset", r.snapshot_offset ? Json(*r.snapshot_offset) : Json()}}
                                 .dump(2)
                          << "\n";
            } else if (r.snapshots_checked > 0) {
                std::cout << "snapshot verified: " << r.snapshots_checked << " snapshot(s), " << r.events
                          << " events, " << r.journal_records << " journal records\n";
            } else {
                std::cout << "replay ok, no snapshot to compare: " << r.events << " events, " << r.journal_records
                          << " journal records\n";
            }
            return 0;
        }

        auto acting = [&]() {
            if (!role_name) throw UsageError("this command needs --as <Role>");
            auto role = parse_role(*role_name);
            if (!role) throw UsageError("unknown role '" + *role_name + "'");
            return Actor{*role, actor_id};
        };

        service::Platform platform(options);
        if (platform.recovery().repaired_events > 0) {
            std::cerr << "recovered " << platform.recovery().repaired_events
                      << " ledger event(s) for the last journal record\n";
        }

        if (*serve) {
            if (!config.users) throw UsageError("serve needs a users file (config key 'users')");
            service::Authenticator auth(service::parse_users(read_file(config.users->string())),
                                        config.token_ttl_minutes, system_clock());
            service::IdempotencyStore idempotency(config.data_dir / "idempotency.jsonl");
            httplib::Server server;
            service::HttpApi api(platform, auth, idempotency);
            api.mount(server);
            static httplib::Server* running = &server;
            std::signal(SIGINT, [](int) { running->stop(); });
            std::signal(SIGTERM, [](int) { running->stop(); });
            std::cout << "listening on " << config.listen << std::endl;
            if (!server.listen(config.host(), config.port())) {
                std::cerr << "cannot listen on " << config.listen << "\n";
                return kDomainError;
            }
            platform.checkpoint();
            return 0;
        }

        bool mutated = true;
        if (*import_items) {
            auto n = platform.import_items(read_file(import_path), acting());
            std::cout << (as_json ? Json{{"count", n}}.dump() : "registered " + std::to_string(n) + " items") << "\n";
        } else if (*import_materials) {
            auto n = platform.import_materials(read_file(import_path), acting());
            std::cout << (as_json ? Json{{"count", n}}.dump() : "imported " + std::to_string(n) + " materials")
                      << "\n";
        } else if (*list_create) {
            workflow::OutboundRequest request;
            request.list_id = create_id;
            request.project_name = project_name;
            request.client = client;
            for (const auto& spec : line_specs) {
                auto [label, rest] = split_pair(spec, '=', "LABEL=QTY");
                workflow::LineRequest line{label, 0, workflow::LineOrigin::FromStock};
                auto colon = rest.find(':');
                line.quantity = to_int(rest.substr(0, colon), "quantity");
                if (colon != std::string::npos) {
                    auto origin = workflow::parse_line_origin(rest.substr(colon + 1));
                    if (!origin) throw UsageError("unknown line origin '" + rest.substr(colon + 1) + "'");
                    line.origin = *origin;
                }
                request.lines.push_back(line);
            }
            auto l = platform.create_list(request, acting());
            if (as_json) std::cout << platform.export_list(l.list_id).dump(2) << "\n";
            else print_list(l);
        } else if (*list_transition) {
            auto state = workflow::parse_list_state(target_state);
            if (!state) throw UsageError("unknown state '" + target_state + "'");
            workflow::TransitionOptions o;
            o.expected_version = expected_version;
            for (const auto& spec : dispatch_specs) {
                auto [label, qty] = split_pair(spec, '=', "LABEL=QTY");
                o.dispatch_quantities[label] = to_int(qty, "quantity");
            }
            auto l = platform.transition(list_id, *state, acting(), o);
            if (as_json) std::cout << platform.export_list(l.list_id).dump(2) << "\n";
            else print_list(l);
        } else if (*list_dispose) {
            auto d = workflow::parse_disposition(dispose_kind);
            if (!d) throw UsageError("unknown disposition '" + dispose_kind + "'");
            auto l = platform.record_disposition(list_id, dispose_label, *d, dispose_qty, acting());
            if (as_json) std::cout << platform.export_list(l.list_id).dump(2) << "\n";
            else print_list(l);
        } else if (*list_reconcile) {
            auto l = platform.reconcile(list_id, acting(), expected_version);
            if (as_json) std::cout << platform.export_list(l.list_id).dump(2) << "\n";
            else print_list(l);
        } else if (*list_link) {
            auto l = platform.link_material(list_id, material_id, note, acting());
            if (as_json) std::cout << platform.export_list(l.list_id).dump(2) << "\n";
            else print_list(l);
        } else if (*audit) {
            auto record = platform.record_audit(service::parse_audit_csv(read_file(audit_path)), acting());
            if (as_json) {
                std::cout << service::to_json(record).dump(2) << "\n";
            } else {
                print_row("inventory accuracy", ratio_text(record.accuracy));
                for (const auto& d : record.discrepancies) {
                    std::cout << "  " << d.label << " counted " << d.counted << " on hand " << d.on_hand << "\n";
                }
            }
        } else if (*demo_case) {
            service::CaseStudyOptions o;
            auto l = service::run_case_study(platform, o);
            if (as_json) std::cout << platform.export_list(l.list_id).dump(2) << "\n";
            else print_list(l);
        } else {
            mutated = false;
        }
        if (mutated) {
            platform.checkpoint();
            return 0;
        }

        if (*list_show) {
            if (list_id.empty()) {
                Json all = Json::array();
                for (const auto& l : platform.lists()) {
                    if (as_json) all.push_back(workflow::export_list(l));
                    else print_list(l);
                }
                if (as_json) std::cout << all.dump(2) << "\n";
            } else if (as_json) {
                std::cout << platform.export_list(list_id).dump(2) << "\n";
            } else {
                print_list(platform.list(list_id));
            }
        } else if (*items) {
            inventory::ItemFilter filter;
            filter.text = item_text;
            if (item_category) {
                auto c = inventory::parse_category(*item_category);
                if (!c) throw UsageError("unknown category '" + *item_category + "'");
                filter.category = *c;
            }
            auto found = platform.items(filter, {0, item_limit});
            if (as_json) {
                Json out = Json::array();
                for (const auto& r : found) out.push_back(service::to_json(r));
                std::cout << out.dump(2) << "\n";
            } else {
                for (const auto& r : found) {
                    std::cout << std::left << std::setw(20) << r.label << std::setw(12)
                              << inventory::to_string(r.status()) << " on hand " << r.quantity_on_hand()
                              << " available " << r.available() << "  " << r.name << "\n";
                }
            }
        } else if (*report_project || *report_period) {
            auto r = *report_project
                         ? platform.project_report(list_id)
                         : platform.period_report(service::parse_period_bound(period_from, false),
                                                  service::parse_period_bound(period_to, true));
            if (as_csv) std::cout << indicators::to_csv(r);
            else if (as_json) std::cout << indicators::to_json(r).dump(2) << "\n";
            else print_report(r);
        } else if (*mats) {
            materials::MaterialQuery q;
            q.terms = terms;
            q.category = mat_category;
            q.recyclable = recyclable;
            q.certified = certified;
            q.max_carbon_per_kg = max_carbon;
            q.min_reusable_cycles = min_cycles;
            q.fire_rating = fire_rating;
            auto found = platform.search_materials(q);
            if (as_json) {
                Json out = Json::array();
                for (const auto& s : found) out.push_back(service::to_json(s));
                std::cout << out.dump(2) << "\n";
            } else {
                for (const auto& s : found) {
                    std::cout << std::left << std::setw(10) << s.material.material_id << std::setw(8) << s.score
                              << s.material.name << " [" << s.material.category << "]\n";
                }
            }
        } else if (*notes) {
            auto pending = platform.notifications(acting().role);
            if (as_json) {
                Json out = Json::array();
                for (const auto& n : pending) out.push_back(n);
                std::cout << out.dump(2) << "\n";
            } else {
                for (const auto& n : pending) {
                    std::cout << n.id << "  " << n.list_id << " awaits " << workflow::to_string(n.required_action)
                              << "\n";
                }
            }
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsageError;
    } catch (const CorruptLogError& e) {
        std::cerr << "error: " << error_code_name(e.code()) << " at offset " << e.offset() << ", sequence "
                  << e.sequence() << ": " << e.what() << "\n";
        return kDomainError;
    } catch (const DomainError& e) {
        std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::InvalidConfig ? kUsageError : kDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    }
}
