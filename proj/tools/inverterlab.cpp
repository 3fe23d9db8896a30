#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "inverterlab/commands.hpp"

namespace {

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> split(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = inverterlab::cli;

    CLI::App app{"Single-phase inverter controller simulation"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out = ".";
    bool svg = false;
    std::string model;
    std::string controller;

    auto add_common = [&](CLI::App* sub, bool with_controller) {
        sub->add_option("scenario", scenario, "Scenario file (JSON); omit for defaults");
        sub->add_option("--model", model, "averaged | switched")->check(CLI::IsMember({"averaged", "switched"}));
        if (with_controller)
            sub->add_option("--controller", controller, "backstepping | sliding | fuzzy")
                ->check(CLI::IsMember({"backstepping", "sliding", "fuzzy"}));
    };

    auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
    add_common(validate, true);

    auto* simulate = app.add_subcommand("simulate", "Run one scenario");
    add_common(simulate, true);
    simulate->add_option("--out", out, "Output directory");
    simulate->add_flag("--svg", svg, "Also write SVG charts");

    std::string controllers;
    auto* compare = app.add_subcommand("compare", "Run the scenario once per controller");
    add_common(compare, false);
    compare->add_option("--controllers", controllers, "Comma-separated list, e.g. sliding,fuzzy")->required();
    compare->add_option("--out", out, "Output directory");
    compare->add_flag("--svg", svg, "Also write SVG charts");

    std::string key;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "Run the scenario for each value of one numeric key");
    add_common(sweep, true);
    sweep->add_option("--key", key, "Dotted config key, e.g. controller.beta")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitConfig;
    }

    cli::Overrides ov;
    if (!model.empty()) ov.model = model;
    if (!controller.empty()) ov.controller = controller;

    try {
        if (*validate) return cli::validate(scenario, ov, std::cout, std::cerr);
        if (*simulate) return cli::simulate({scenario, out, svg, ov}, std::cout, std::cerr);
        if (*compare) {
            cli::CompareOptions opts{scenario, split(controllers), out, svg, ov};
            return cli::compare(opts, std::cout, std::cerr);
        }
        if (*sweep) {
            std::vector<double> parsed;
            try {
                parsed = parse_values(values);
            } catch (const std::exception& e) {
                std::cerr << "usage: --values: " << e.what() << '\n';
                return cli::kExitConfig;
            }
            cli::SweepOptions opts{scenario, key, parsed, out, ov};
            return cli::sweep(opts, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitRuntime;
    }
    return cli::kExitConfig;
}
