#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inverterlab/analysis.hpp"
#include "inverterlab/fuzzy.hpp"
#include "inverterlab/nlctrl.hpp"
#include "inverterlab/plant.hpp"
#include "inverterlab/pwm.hpp"
#include "inverterlab/reference.hpp"

namespace inverterlab::sim {

enum class ModelKind { averaged, switched };
enum class ControllerKind { backstepping, sliding, fuzzy };
enum class LoadRateMode { analytic, filtered };

std::string_view to_string(ModelKind m) noexcept;
std::string_view to_string(ControllerKind c) noexcept;
std::string_view to_string(LoadRateMode m) noexcept;
std::optional<ModelKind> parse_model(std::string_view s) noexcept;
std::optional<ControllerKind> parse_controller(std::string_view s) noexcept;
std::optional<LoadRateMode> parse_load_rate(std::string_view s) noexcept;

struct SimConfig {
    double duration = 0.1;         // s
    double step = 1e-6;            // plant integration step h, s
    double control_period = 1e-4;  // Ts, integer multiple of h
    ModelKind model = ModelKind::averaged;
    ControllerKind controller = ControllerKind::sliding;
    nlctrl::ControllerGains gains;
    LoadRateMode load_rate = LoadRateMode::analytic;
    double load_rate_filter_tau = 2e-4;  // s, filtered mode only
    fuzzy::FuzzyConfig fuzzy;
    fuzzy::RuleTable rules = fuzzy::RuleTable::standard();
    plant::PlantParams plant;
    plant::LoadModel load = plant::LoadModel::constant(50.0);
    reference::ReferenceSpec reference;
    pwm::PwmConfig pwm;
    plant::PlantState initial;
    int harmonics = analysis::kDefaultHarmonics;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    /// Number of h substeps per control period.
    std::size_t substeps() const;
    std::size_t control_steps() const;
    std::size_t samples_per_cycle() const;
};

/// One row per control period.
struct TraceRecord {
    double t = 0.0;
    double x1 = 0.0;
    double x1_ref = 0.0;
    double x2 = 0.0;
    double i_s = 0.0;
    double u = 0.0;
    std::optional<int> mu;     // switched model only
    std::optional<double> s;   // sliding controller only
    std::optional<double> v2;  // backstepping controller only
    bool saturated = false;
};

struct ScenarioSummary {
    ControllerKind controller = ControllerKind::sliding;
    ModelKind model = ModelKind::averaged;
    std::optional<double> thd;  // empty when the fundamental is zero
    analysis::TrackingMetrics tracking;
    std::size_t saturation_count = 0;
    double output_rms = 0.0;  // V, final two cycles
    analysis::Spectrum spectrum;
};

struct ScenarioResult {
    std::vector<TraceRecord> trace;
    ScenarioSummary summary;
};

/// Classical RK4 with u held; resistance resolved once at state.t.
plant::PlantState rk4_step(const plant::PlantState& state, double u, double h, const plant::PlantParams& params,
                           const plant::LoadModel& load);

/// Closed loop with zero-order hold. Throws SimulationFault on divergence or
/// controller failure and ConfigError on an invalid config.
ScenarioResult run_scenario(const SimConfig& cfg);

/// Summary metrics computed from a trace (final two cycles).
ScenarioSummary summarize(std::span<const TraceRecord> trace, const SimConfig& cfg);

struct BatchOutcome {
    std::optional<ScenarioResult> result;
    std::string error;  // set when result is empty
    bool config_error = false;
};

/// Independent scenarios in parallel. `threads` <= 0 uses the OpenMP default.
std::vector<BatchOutcome> run_batch(std::span<const SimConfig> configs, int threads = 0);

namespace serial {
std::vector<BatchOutcome> run_batch(std::span<const SimConfig> configs);
}  // namespace serial

/// CSV with header t,x1,x1_ref,x2,i_s,u,mu,s,V2,sat. Absent channels are empty.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
std::string trace_csv(std::span<const TraceRecord> trace);

/// harmonic,magnitude_volts
void write_spectrum_csv(std::ostream& out, const analysis::Spectrum& spectrum);

/// Shortest round-trip decimal form; used for every numeric field written to disk.
std::string format_number(double v);

}  // namespace inverterlab::sim
