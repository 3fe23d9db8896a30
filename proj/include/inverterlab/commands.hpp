#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "inverterlab/sim.hpp"

namespace inverterlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Command-line overrides applied on top of the scenario file.
struct Overrides {
    std::optional<std::string> model;
    std::optional<std::string> controller;
};

struct SimulateOptions {
    std::filesystem::path scenario;
    std::filesystem::path out = ".";
    bool svg = false;
    Overrides overrides;
};

struct CompareOptions {
    std::filesystem::path scenario;
    std::vector<std::string> controllers;
    std::filesystem::path out = ".";
    bool svg = false;
    Overrides overrides;  // controller override ignored
};

struct SweepOptions {
    std::filesystem::path scenario;
    std::string key;
    std::vector<double> values;
    std::filesystem::path out = ".";
    Overrides overrides;
    int threads = 0;  // <= 0: INVERTERLAB_THREADS or the OpenMP default
};

int validate(const std::filesystem::path& scenario, const Overrides& overrides, std::ostream& log, std::ostream& err);
int simulate(const SimulateOptions& opts, std::ostream& log, std::ostream& err);
int compare(const CompareOptions& opts, std::ostream& log, std::ostream& err);
int sweep(const SweepOptions& opts, std::ostream& log, std::ostream& err);

/// Load a scenario file and apply overrides. Throws ConfigError.
sim::SimConfig load_config(const std::filesystem::path& scenario, const Overrides& overrides);

/// "thd,rms_error_pct,settle_time_s,saturation_count" fields of a summary.
std::string summary_fields_csv(const sim::ScenarioSummary& summary);

/// Parallelism cap from INVERTERLAB_THREADS; 0 when unset or invalid.
int thread_cap_from_env();

/// Write via a temporary file and rename, so readers never see partial output.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace inverterlab::cli
