#include "inverterlab/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "inverterlab/errors.hpp"
#include "inverterlab/scenario.hpp"
#include "inverterlab/svg.hpp"

namespace inverterlab::cli {

namespace fs = std::filesystem;

namespace {

scenario::Json load_document(const fs::path& path, const Overrides& ov) {
    auto doc = scenario::read_document(path);
    if (ov.model) scenario::set_string(doc, "sim.model", *ov.model);
    if (ov.controller) scenario::set_string(doc, "controller.type", *ov.controller);
    return doc;
}

fs::path base_dir(const fs::path& scenario) { return scenario.empty() ? fs::path{} : scenario.parent_path(); }

void write_outputs(const fs::path& dir, const sim::ScenarioResult& result, bool svg_plots) {
    fs::create_directories(dir);
    write_atomic(dir / "trace.csv", sim::trace_csv(result.trace));

    std::ostringstream spectrum;
    sim::write_spectrum_csv(spectrum, result.summary.spectrum);
    write_atomic(dir / "spectrum.csv", spectrum.str());
    write_atomic(dir / "summary.json", scenario::summary_json(result.summary).dump(2) + "\n");

    if (svg_plots) {
        write_atomic(dir / "waveform.svg", svg::waveform_chart(result.trace));
        write_atomic(dir / "command.svg", svg::command_chart(result.trace));
        write_atomic(dir / "spectrum.svg", svg::spectrum_chart("Output voltage spectrum", result.summary.spectrum));
    }
}

std::string optional_number(const std::optional<double>& v, const char* missing) {
    return v ? sim::format_number(*v) : std::string(missing);
}

// Four significant digits for the human-readable table.
std::string short_number(const std::optional<double>& v, const char* missing) {
    if (!v) return missing;
    std::ostringstream os;
    os << std::setprecision(4) << *v;
    return os.str();
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

int thread_cap_from_env() {
    const char* env = std::getenv("INVERTERLAB_THREADS");
    if (env == nullptr) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) return 0;
    return static_cast<int>(v);
}

sim::SimConfig load_config(const fs::path& scenario, const Overrides& overrides) {
    return scenario::to_config(load_document(scenario, overrides), base_dir(scenario));
}

std::string summary_fields_csv(const sim::ScenarioSummary& s) {
    return optional_number(s.thd, "") + ',' + sim::format_number(s.tracking.rms_error_pct) + ',' +
           optional_number(s.tracking.settle_time, "none") + ',' + std::to_string(s.saturation_count);
}

int validate(const fs::path& scenario, const Overrides& overrides, std::ostream& log, std::ostream& err) {
    try {
        const auto cfg = load_config(scenario, overrides);
        log << "ok: " << sim::to_string(cfg.controller) << " controller, " << sim::to_string(cfg.model) << " model, "
            << cfg.control_steps() << " control steps\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int simulate(const SimulateOptions& opts, std::ostream& log, std::ostream& err) {
    sim::SimConfig cfg;
    try {
        cfg = load_config(opts.scenario, opts.overrides);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto result = sim::run_scenario(cfg);
        write_outputs(opts.out, result, opts.svg);
        const auto& s = result.summary;
        log << sim::to_string(s.controller) << " (" << sim::to_string(s.model) << "): THD "
            << optional_number(s.thd, "n/a") << ", RMS error " << sim::format_number(s.tracking.rms_error_pct)
            << "%, settle " << optional_number(s.tracking.settle_time, "none") << " s, " << s.saturation_count
            << " saturated samples\n";
        return kExitOk;
    } catch (const SimulationFault& e) {
        err << "runtime fault: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int compare(const CompareOptions& opts, std::ostream& log, std::ostream& err) {
    if (opts.controllers.empty()) {
        err << "usage: compare needs at least one controller\n";
        return kExitConfig;
    }

    std::vector<sim::SimConfig> configs;
    try {
        for (const auto& name : opts.controllers) {
            Overrides ov = opts.overrides;
            ov.controller = name;
            configs.push_back(load_config(opts.scenario, ov));
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const auto outcomes = sim::run_batch(configs, thread_cap_from_env());

    std::ostringstream csv;
    std::ostringstream text;
    csv << "controller,status,thd,rms_error_pct,settle_time_s,saturation_count\n";
    text << std::left << std::setw(14) << "controller" << std::setw(8) << "status" << std::setw(14) << "THD"
         << std::setw(16) << "rms_error_pct" << std::setw(16) << "settle_time_s" << "saturations\n";
    bool any_failed = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& name = opts.controllers[i];
        const auto& o = outcomes[i];
        if (!o.result) {
            any_failed = true;
            csv << name << ",failed,,,,\n";
            text << std::setw(14) << name << std::setw(8) << "failed" << o.error << '\n';
            err << name << ": " << o.error << '\n';
            continue;
        }
        const auto& s = o.result->summary;
        csv << name << ",ok," << summary_fields_csv(s) << '\n';
        text << std::setw(14) << name << std::setw(8) << "ok" << std::setw(14) << short_number(s.thd, "n/a")
             << std::setw(16) << short_number(s.tracking.rms_error_pct, "") << std::setw(16)
             << short_number(s.tracking.settle_time, "none") << s.saturation_count << '\n';
        write_outputs(opts.out / name, *o.result, opts.svg);
    }
    fs::create_directories(opts.out);
    write_atomic(opts.out / "compare.csv", csv.str());
    write_atomic(opts.out / "compare.txt", text.str());
    log << text.str();
    return any_failed ? kExitRuntime : kExitOk;
}

int sweep(const SweepOptions& opts, std::ostream& log, std::ostream& err) {
    if (opts.values.empty()) {
        err << "usage: sweep needs at least one value\n";
        return kExitConfig;
    }

    scenario::Json base;
    try {
        base = load_document(opts.scenario, opts.overrides);
        // reject keys that do not name a numeric entry before running anything
        auto probe = base;
        scenario::set_number(probe, opts.key, opts.values.front());
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<sim::SimConfig> configs(opts.values.size());
    std::vector<std::string> config_errors(opts.values.size());
    std::vector<std::size_t> runnable;
    for (std::size_t i = 0; i < opts.values.size(); ++i) {
        try {
            auto doc = base;
            scenario::set_number(doc, opts.key, opts.values[i]);
            configs[i] = scenario::to_config(doc, base_dir(opts.scenario));
            runnable.push_back(i);
        } catch (const ConfigError& e) {
            config_errors[i] = e.what();
        }
    }

    std::vector<sim::SimConfig> batch;
    for (auto i : runnable) batch.push_back(configs[i]);
    const int threads = opts.threads > 0 ? opts.threads : thread_cap_from_env();
    const auto outcomes = sim::run_batch(batch, threads);

    std::vector<std::string> failures(opts.values.size());
    std::vector<const sim::ScenarioSummary*> summaries(opts.values.size(), nullptr);
    for (std::size_t k = 0; k < runnable.size(); ++k) {
        if (outcomes[k].result)
            summaries[runnable[k]] = &outcomes[k].result->summary;
        else
            failures[runnable[k]] = outcomes[k].error;
    }

    std::ostringstream csv;
    csv << "value,status,thd,rms_error_pct,settle_time_s\n";
    for (std::size_t i = 0; i < opts.values.size(); ++i) {
        csv << sim::format_number(opts.values[i]) << ',';
        if (const auto* s = summaries[i]) {
            csv << "ok," << optional_number(s->thd, "") << ',' << sim::format_number(s->tracking.rms_error_pct) << ','
                << optional_number(s->tracking.settle_time, "none") << '\n';
            continue;
        }
        const auto& why = config_errors[i].empty() ? failures[i] : config_errors[i];
        csv << "failed,,,\n";
        err << opts.key << " = " << sim::format_number(opts.values[i]) << ": " << why << '\n';
    }
    fs::create_directories(opts.out);
    write_atomic(opts.out / "sweep.csv", csv.str());
    log << csv.str();
    return kExitOk;
}

}  // namespace inverterlab::cli
