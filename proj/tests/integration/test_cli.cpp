// Integration test: the circuloop command line against a scratch data directory.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>

#include "../support.hpp"

using namespace circuloop::testing;

namespace {

struct Run {
    int exit_code = -1;
    std::string output;
};

Run run(const std::string& args) {
    std::string cmd = std::string(CIRCULOOP_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
    int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct Workspace {
    TempDir dir{"cli"};
    std::string base;

    Workspace() {
        base = "--data-dir " + (dir / "run").string() + " --set factors=" + std::string(CIRCULOOP_DATA) +
               "/demo_factors.csv";
    }
    Run operator()(const std::string& args) { return run(base + " " + args); }
};

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
    Workspace ws;
    CHECK(ws("--set colour=blue items").exit_code == 2);
}

TEST_CASE("demo data files are written") {
    Workspace ws;
    auto out = ws.dir / "demo";
    REQUIRE(run("demo data " + out.string()).exit_code == 0);
    CHECK(read_lines(out / "bootstrap_items.csv").size() == 1381);
    CHECK(read_lines(out / "materials_demo.csv").size() == 51);
    CHECK(fs::exists(out / "demo_factors.csv"));
    CHECK(fs::exists(out / "permissions.conf"));
    CHECK(read_lines(out / "survey_demo.csv").size() == 6);
    CHECK(read_text(out / "bootstrap_items.csv") == read_text(fs::path(CIRCULOOP_DATA) / "bootstrap_items.csv"));
}

TEST_CASE("case study through the cli") {
    Workspace ws;
    auto import = ws("--as WarehouseAdministrator import items " + std::string(CIRCULOOP_DATA) + "/bootstrap_items.csv");
    REQUIRE_MESSAGE(import.exit_code == 0, import.output);
    CHECK(contains(import.output, "1380"));
    auto cs = ws("demo case-study");
    REQUIRE_MESSAGE(cs.exit_code == 0, cs.output);
    auto report = ws("report project demo-4_3");
    REQUIRE_MESSAGE(report.exit_code == 0, report.output);
    CHECK(contains(report.output, "0.9706"));
    CHECK(contains(report.output, "dispatched"));
    auto json = ws("--json report project demo-4_3");
    auto j = nlohmann::json::parse(json.output);
    CHECK(j.at("recovery_rate") == 0.9706);
    CHECK(j.at("returned_units") == 198);
    auto csv = ws("report --csv project demo-4_3");
    CHECK(contains(csv.output, "recovery_rate"));
    auto verify = ws("replay-verify");
    CHECK(verify.exit_code == 0);
    CHECK(contains(verify.output, "verified"));
}

TEST_CASE("list commands and domain error exit codes") {
    Workspace ws;
    auto items = ws.dir / "items.csv";
    write_text(items,
               "label,name,category,material,quantity,condition,remaining_lifespan,expiry_date,"
               "embodied_carbon_per_unit,location\nEP-0001,Arch,EventProps,wood-based,10,A,3,,12,A-01\n");
    REQUIRE(ws("--as WarehouseAdministrator import items " + items.string()).exit_code == 0);
    auto denied = ws("--as Designer list create --id L1 --line EP-0001=2");
    CHECK(denied.exit_code == 1);
    CHECK(contains(denied.output, "FORBIDDEN_ROLE"));
    REQUIRE(ws("--as ProjectLead list create --id L1 --line EP-0001=2").exit_code == 0);
    auto illegal = ws("--as ProjectLead list transition L1 Packed");
    CHECK(illegal.exit_code == 1);
    CHECK(contains(illegal.output, "ILLEGAL_TRANSITION"));
    CHECK(ws("--as ProjectLead list transition L1 Submitted").exit_code == 0);
    auto shown = ws("--json list show L1");
    CHECK(nlohmann::json::parse(shown.output).at("state") == "Submitted");
    auto unknown = ws("list show L9");
    CHECK(unknown.exit_code == 1);
    CHECK(contains(unknown.output, "UNKNOWN_LIST"));
    auto missing_role = ws("list create --id L2 --line EP-0001=1");
    CHECK(missing_role.exit_code == 2);
    auto audit = ws.dir / "audit.csv";
    write_text(audit, "label,counted\nEP-0001,10\n");
    auto a = ws("--as WarehouseAdministrator audit " + audit.string());
    CHECK(a.exit_code == 0);
}

TEST_CASE("replay-verify reports a damaged ledger") {
    Workspace ws;
    REQUIRE(ws("--as WarehouseAdministrator import items " + std::string(CIRCULOOP_DATA) + "/bootstrap_items.csv")
                .exit_code == 0);
    auto log = ws.dir / "run" / "events.jsonl";
    auto lines = read_lines(log);
    lines.erase(lines.begin() + 99);
    write_lines(log, lines);
    auto r = ws("replay-verify");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "CORRUPT_LOG at offset 101"));
}

TEST_CASE("materials search from the cli") {
    Workspace ws;
    REQUIRE(ws("--as WarehouseAdministrator import materials " + std::string(CIRCULOOP_DATA) + "/materials_demo.csv")
                .exit_code == 0);
    auto r = ws("--json materials --category board --recyclable true");
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    auto hits = nlohmann::json::parse(r.output);
    CHECK_FALSE(hits.empty());
    for (const auto& h : hits) CHECK(h.at("category") == "board");
    CHECK(ws("materials").exit_code == 1);
}

TEST_CASE("survey and share reports") {
    auto survey = run("report survey " + std::string(CIRCULOOP_DATA) + "/survey_demo.csv");
    REQUIRE_MESSAGE(survey.exit_code == 0, survey.output);
    for (const char* v : {"0.88", "0.82", "0.78", "0.84", "0.86"}) CHECK(contains(survey.output, v));
    auto json = nlohmann::json::parse(run("--json report survey " + std::string(CIRCULOOP_DATA) + "/survey_demo.csv").output);
    CHECK(json.at(2).at("absolute_score") == 74.0);
    CHECK(run("report share 10 14").output == "71.4%\n");
    CHECK(run("report share 15 14").exit_code != 0);
}
