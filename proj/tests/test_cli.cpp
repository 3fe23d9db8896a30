#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "inverterlab/commands.hpp"
#include "inverterlab/errors.hpp"
#include "inverterlab/scenario.hpp"

using namespace inverterlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("inverterlab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    auto path = dir / name;
    std::ofstream(path) << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string error_key(const scenario::Json& user) {
    try {
        scenario::to_config(scenario::merge_with_defaults(user));
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "ok";
}

}  // namespace

TEST_CASE("scenario defaults produce the default config", "[scenario]") {
    const auto cfg = scenario::to_config(scenario::default_document());
    CHECK(cfg.controller == sim::ControllerKind::sliding);
    CHECK(cfg.plant.dc_bus == 400.0);
    CHECK(cfg.gains.beta == 1e5);
    CHECK(cfg.fuzzy.ke == 1.0 / 50.0);
    CHECK(cfg.reference.rms() == 230.0);
    CHECK(cfg.load.resistance_at(0.0) == 50.0);
    CHECK(cfg.control_period == 1e-4);
}

TEST_CASE("scenario validation names keys", "[scenario]") {
    using scenario::Json;
    CHECK(error_key(Json::object()) == "ok");
    CHECK(error_key({{"plant", {{"dc_bus_E", 100.0}}}}) == "plant.dc_bus_E");
    CHECK(error_key({{"plant", {{"inductance_H", -1e-3}}}}) == "plant.inductance_H");
    CHECK(error_key({{"plant", {{"bogus", 1}}}}) == "plant.bogus");
    CHECK(error_key({{"controller", {{"type", "pid"}}}}) == "controller.type");
    CHECK(error_key({{"controller", {{"k1", "fast"}}}}) == "controller.k1");
    CHECK(error_key({{"sim", {{"step_s", 3e-6}}}}) == "sim.control_period_s");
    CHECK(error_key({{"load", {{"segments", Json::array({{{"start_s", 0}, {"resistance_ohm", -2}}})}}}}) ==
          "load.segments");
    CHECK(error_key({{"load", {{"segments", Json::array({{{"start_s", 0}, {"ohms", 2}}})}}}}) ==
          "load.segments.0.ohms");
    CHECK(error_key({{"controller", {{"fuzzy", {{"rule_file", "/nonexistent"}}}}}}) == "controller.fuzzy.rule_file");
}

TEST_CASE("dotted keys address numeric entries", "[scenario]") {
    auto doc = scenario::default_document();
    scenario::set_number(doc, "controller.beta", 2e5);
    CHECK(doc["controller"]["beta"] == 2e5);
    scenario::set_number(doc, "load.segments.0.resistance_ohm", 30.0);
    CHECK(doc["load"]["segments"][0]["resistance_ohm"] == 30.0);
    scenario::set_number(doc, "controller.fuzzy.resolution", 501);
    CHECK(doc["controller"]["fuzzy"]["resolution"] == 501);
    CHECK_THROWS_AS(scenario::set_number(doc, "controller.fuzzy.resolution", 500.5), ConfigError);
    CHECK_THROWS_AS(scenario::set_number(doc, "controller.type", 1.0), ConfigError);
    CHECK_THROWS_AS(scenario::set_number(doc, "controller.gamma", 1.0), ConfigError);
    CHECK_THROWS_AS(scenario::set_number(doc, "load.segments.4.resistance_ohm", 1.0), ConfigError);
}

TEST_CASE("shipped scenarios validate", "[scenario]") {
    std::ostringstream log, err;
    for (const char* name : {"default.json", "load_step.json", "fuzzy_custom_rules.json"}) {
        INFO(name);
        CHECK(cli::validate(fs::path(INVERTERLAB_SCENARIO_DIR) / name, {}, log, err) == cli::kExitOk);
    }
}

TEST_CASE("simulate writes outputs and reports config errors", "[cli]") {
    const auto dir = scratch("simulate");
    std::ostringstream log, err;

    CHECK(cli::simulate({{}, dir / "out", true, {}}, log, err) == cli::kExitOk);
    for (const char* f : {"trace.csv", "spectrum.csv", "summary.json", "waveform.svg", "command.svg", "spectrum.svg"})
        CHECK(fs::exists(dir / "out" / f));
    const auto summary = scenario::Json::parse(slurp(dir / "out" / "summary.json"));
    CHECK(summary["thd"].get<double>() < 0.05);
    CHECK(slurp(dir / "out" / "trace.csv").rfind("t,x1,x1_ref,x2,i_s,u,mu,s,V2,sat\n", 0) == 0);
    CHECK(slurp(dir / "out" / "spectrum.csv").rfind("harmonic,magnitude_volts\n1,", 0) == 0);

    const auto low_bus = write_file(dir, "low_bus.json", R"({"plant": {"dc_bus_E": 100}})");
    std::ostringstream err2;
    CHECK(cli::simulate({low_bus, dir / "bad", false, {}}, log, err2) == cli::kExitConfig);
    CHECK(err2.str().find("plant.dc_bus_E") != std::string::npos);

    const auto neg_l = write_file(dir, "neg_l.json", R"({"plant": {"inductance_H": -0.003}})");
    CHECK(cli::simulate({neg_l, dir / "bad", false, {}}, log, err) == cli::kExitConfig);

    const auto broken = write_file(dir, "broken.json", "{ not json");
    CHECK(cli::simulate({broken, dir / "bad", false, {}}, log, err) == cli::kExitConfig);
}

TEST_CASE("simulate is a pure function of the scenario", "[cli]") {
    const auto dir = scratch("determinism");
    std::ostringstream log, err;
    const auto file = fs::path(INVERTERLAB_SCENARIO_DIR) / "load_step.json";
    REQUIRE(cli::simulate({file, dir / "a", false, {}}, log, err) == cli::kExitOk);
    REQUIRE(cli::simulate({file, dir / "b", false, {}}, log, err) == cli::kExitOk);
    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
}

TEST_CASE("compare matches standalone simulate", "[cli]") {
    const auto dir = scratch("compare");
    std::ostringstream log, err;
    REQUIRE(cli::compare({{}, {"sliding", "fuzzy"}, dir / "cmp", false, {}}, log, err) == cli::kExitOk);
    const auto table = slurp(dir / "cmp" / "compare.csv");
    CHECK(table.rfind("controller,status,thd,rms_error_pct,settle_time_s,saturation_count\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 3);

    cli::Overrides ov;
    ov.controller = "fuzzy";
    REQUIRE(cli::simulate({{}, dir / "sim", false, ov}, log, err) == cli::kExitOk);
    CHECK(slurp(dir / "sim" / "trace.csv") == slurp(dir / "cmp" / "fuzzy" / "trace.csv"));
    CHECK(slurp(dir / "sim" / "summary.json") == slurp(dir / "cmp" / "fuzzy" / "summary.json"));

    CHECK(cli::compare({{}, {}, dir / "none", false, {}}, log, err) == cli::kExitConfig);
    CHECK(cli::compare({{}, {"pid"}, dir / "none", false, {}}, log, err) == cli::kExitConfig);
}

TEST_CASE("sweep isolates failing values", "[cli]") {
    const auto dir = scratch("sweep");
    std::ostringstream log, err;
    cli::SweepOptions opts{{}, "controller.beta", {5e4, -1.0, 2e5}, dir / "sw", {}, 2};
    opts.overrides.controller = "sliding";
    REQUIRE(cli::sweep(opts, log, err) == cli::kExitOk);
    std::istringstream rows(slurp(dir / "sw" / "sweep.csv"));
    std::vector<std::string> lines;
    for (std::string l; std::getline(rows, l);) lines.push_back(l);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "value,status,thd,rms_error_pct,settle_time_s");
    CHECK(lines[1].rfind("50000,ok,", 0) == 0);
    CHECK(lines[2] == "-1,failed,,,");
    CHECK(lines[3].rfind("200000,ok,", 0) == 0);

    opts.key = "controller.nonexistent";
    CHECK(cli::sweep(opts, log, err) == cli::kExitConfig);
}

TEST_CASE("single-value sweep agrees with simulate", "[cli]") {
    const auto dir = scratch("sweep_one");
    std::ostringstream log, err;
    REQUIRE(cli::sweep({{}, "controller.beta", {1e5}, dir / "sw", {}, 1}, log, err) == cli::kExitOk);
    REQUIRE(cli::simulate({{}, dir / "sim", false, {}}, log, err) == cli::kExitOk);
    const auto summary = scenario::Json::parse(slurp(dir / "sim" / "summary.json"));
    const auto row = slurp(dir / "sw" / "sweep.csv");
    CHECK(row.find(sim::format_number(summary["thd"].get<double>())) != std::string::npos);
}

TEST_CASE("thread cap from the environment", "[cli]") {
    ::setenv("INVERTERLAB_THREADS", "3", 1);
    CHECK(cli::thread_cap_from_env() == 3);
    ::setenv("INVERTERLAB_THREADS", "zero", 1);
    CHECK(cli::thread_cap_from_env() == 0);
    ::unsetenv("INVERTERLAB_THREADS");
    CHECK(cli::thread_cap_from_env() == 0);
}
