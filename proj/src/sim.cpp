#include "inverterlab/sim.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "inverterlab/errors.hpp"

namespace inverterlab::sim {

namespace {

bool is_integer_ratio(double num, double den, std::size_t& ratio) {
    const double q = num / den;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * r) return false;
    ratio = static_cast<std::size_t>(r);
    return true;
}

plant::PlantState rk4_with(const plant::PlantState& s, double u, double h, const plant::PlantParams& p, double r) {
    using plant::derivatives_at;
    const auto k1 = derivatives_at(s.x1, s.x2, u, p, r);
    const auto k2 = derivatives_at(s.x1 + 0.5 * h * k1.dx1, s.x2 + 0.5 * h * k1.dx2, u, p, r);
    const auto k3 = derivatives_at(s.x1 + 0.5 * h * k2.dx1, s.x2 + 0.5 * h * k2.dx2, u, p, r);
    const auto k4 = derivatives_at(s.x1 + h * k3.dx1, s.x2 + h * k3.dx2, u, p, r);
    return {s.x1 + h / 6.0 * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1),
            s.x2 + h / 6.0 * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2), s.t + h};
}

// Per-run controller state: fuzzy change-of-error memory and the optional
// load-current differentiator.
class ControllerRuntime {
public:
    struct Output {
        nlctrl::Command command;
        std::optional<double> s;
        std::optional<double> v2;
    };

    explicit ControllerRuntime(const SimConfig& cfg) : cfg_(cfg) {
        if (cfg.controller == ControllerKind::fuzzy) fuzzy_.emplace(cfg.fuzzy, cfg.rules, cfg.control_period);
        if (cfg.load_rate == LoadRateMode::filtered)
            differentiator_.emplace(cfg.control_period, cfg.load_rate_filter_tau);
    }

    double load_rate(const plant::PlantState& state, double resistance, double load_current) {
        if (differentiator_) return differentiator_->update(load_current);
        return (state.x2 - state.x1 / resistance) / (resistance * cfg_.plant.capacitance);
    }

    Output step(const nlctrl::ControlInputs& in) {
        switch (cfg_.controller) {
            case ControllerKind::sliding: {
                const double s = nlctrl::sliding_surface(nlctrl::tracking_error(in), cfg_.gains);
                return {nlctrl::smc_command(in, cfg_.gains), s, std::nullopt};
            }
            case ControllerKind::backstepping: {
                const double v2 = nlctrl::lyapunov_v2(nlctrl::backstep_errors(in, cfg_.gains));
                return {nlctrl::backstep_command(in, cfg_.gains), std::nullopt, v2};
            }
            case ControllerKind::fuzzy:
                return {fuzzy_->step(in), std::nullopt, std::nullopt};
        }
        throw std::logic_error("unknown controller");
    }

private:
    const SimConfig& cfg_;
    std::optional<fuzzy::FuzzyController> fuzzy_;
    std::optional<nlctrl::FilteredDifferentiator> differentiator_;
};

}  // namespace

std::string_view to_string(ModelKind m) noexcept { return m == ModelKind::averaged ? "averaged" : "switched"; }

std::string_view to_string(ControllerKind c) noexcept {
    switch (c) {
        case ControllerKind::backstepping: return "backstepping";
        case ControllerKind::sliding: return "sliding";
        case ControllerKind::fuzzy: return "fuzzy";
    }
    return "?";
}

std::string_view to_string(LoadRateMode m) noexcept { return m == LoadRateMode::analytic ? "analytic" : "filtered"; }

std::optional<ModelKind> parse_model(std::string_view s) noexcept {
    if (s == "averaged") return ModelKind::averaged;
    if (s == "switched") return ModelKind::switched;
    return std::nullopt;
}

std::optional<ControllerKind> parse_controller(std::string_view s) noexcept {
    if (s == "backstepping") return ControllerKind::backstepping;
    if (s == "sliding") return ControllerKind::sliding;
    if (s == "fuzzy") return ControllerKind::fuzzy;
    return std::nullopt;
}

std::optional<LoadRateMode> parse_load_rate(std::string_view s) noexcept {
    if (s == "analytic") return LoadRateMode::analytic;
    if (s == "filtered") return LoadRateMode::filtered;
    return std::nullopt;
}

void SimConfig::validate() const {
    plant.validate();
    gains.validate();
    fuzzy.validate();
    pwm.validate(reference.frequency());

    if (!(std::isfinite(step) && step > 0.0)) throw ConfigError("sim.step_s", "must be > 0");
    if (!(std::isfinite(control_period) && control_period > 0.0))
        throw ConfigError("sim.control_period_s", "must be > 0");
    std::size_t ratio = 0;
    if (!is_integer_ratio(control_period, step, ratio))
        throw ConfigError("sim.control_period_s", "must be an integer multiple of sim.step_s");
    if (!is_integer_ratio(reference.period(), control_period, ratio))
        throw ConfigError("sim.control_period_s", "must divide the fundamental period into whole samples");
    if (!(std::isfinite(duration) && duration >= 2.0 * reference.period() * (1.0 - 1e-12)))
        throw ConfigError("sim.duration_s", "must cover at least 2 fundamental periods");
    if (model == ModelKind::switched && step > pwm.period() / 64.0 * (1.0 + 1e-12))
        throw ConfigError("sim.step_s", "switched model needs step <= carrier period / 64");
    if (!(plant.dc_bus > reference.peak()))
        throw ConfigError("plant.dc_bus_E", "must exceed the reference peak V*sqrt(2)");
    if (harmonics < 2) throw ConfigError("sim.harmonics", "must be >= 2");
    if (2 * samples_per_cycle() < 2 * static_cast<std::size_t>(harmonics) + 1)
        throw ConfigError("sim.harmonics", "too many harmonics for two cycles of control samples");
    if (!initial.finite()) throw ConfigError("sim.initial", "initial state must be finite");
    if (!(std::isfinite(load_rate_filter_tau) && load_rate_filter_tau >= 0.0))
        throw ConfigError("controller.dis_filter_tau_s", "must be >= 0");
}

std::size_t SimConfig::substeps() const { return static_cast<std::size_t>(std::llround(control_period / step)); }

std::size_t SimConfig::control_steps() const {
    return static_cast<std::size_t>(std::llround(duration / control_period));
}

std::size_t SimConfig::samples_per_cycle() const {
    return static_cast<std::size_t>(std::llround(reference.period() / control_period));
}

plant::PlantState rk4_step(const plant::PlantState& state, double u, double h, const plant::PlantParams& params,
                           const plant::LoadModel& load) {
    if (!(std::abs(u) <= 1.0)) throw std::domain_error("command outside [-1, 1]");
    if (!(h > 0.0)) throw std::invalid_argument("step must be > 0");
    auto next = rk4_with(state, u, h, params, load.resistance_at(state.t));
    if (!next.finite()) throw SimulationFault(state.t, "integrator produced a non-finite state");
    return next;
}

ScenarioResult run_scenario(const SimConfig& cfg) {
    cfg.validate();

    const double ts = cfg.control_period;
    const double h = cfg.step;
    const std::size_t steps = cfg.control_steps();
    const std::size_t sub = cfg.substeps();
    const auto load = cfg.load.snapped(ts);
    const auto& p = cfg.plant;

    ControllerRuntime controller(cfg);
    ScenarioResult result;
    result.trace.reserve(steps);

    plant::PlantState state = cfg.initial;
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * ts;
        state.t = t;
        if (!state.finite()) throw SimulationFault(t, "plant state diverged (non-finite)");

        const double r = load.resistance_at(t);
        nlctrl::ControlInputs in;
        in.state = state;
        in.ref = reference::reference_eval(cfg.reference, t);
        in.load_current = state.x1 / r;
        in.load_current_rate = controller.load_rate(state, r, in.load_current);
        in.params = p;

        ControllerRuntime::Output out;
        try {
            out = controller.step(in);
        } catch (const std::domain_error& e) {
            throw SimulationFault(t, std::string("controller fault: ") + e.what());
        }

        TraceRecord rec;
        rec.t = t;
        rec.x1 = state.x1;
        rec.x1_ref = in.ref.value;
        rec.x2 = state.x2;
        rec.i_s = in.load_current;
        rec.u = out.command.u;
        rec.s = out.s;
        rec.v2 = out.v2;
        rec.saturated = out.command.saturated;
        if (cfg.model == ModelKind::switched) rec.mu = pwm::modulate(out.command.u, t, cfg.pwm);
        result.trace.push_back(rec);

        for (std::size_t j = 0; j < sub; ++j) {
            const double tj = t + static_cast<double>(j) * h;
            const double drive =
                cfg.model == ModelKind::averaged ? out.command.u : static_cast<double>(pwm::modulate(out.command.u, tj, cfg.pwm));
            state = rk4_with(state, drive, h, p, r);
        }
    }
    if (!state.finite())
        throw SimulationFault(static_cast<double>(steps) * ts, "plant state diverged (non-finite)");

    result.summary = summarize(result.trace, cfg);
    return result;
}

ScenarioSummary summarize(std::span<const TraceRecord> trace, const SimConfig& cfg) {
    ScenarioSummary sum;
    sum.controller = cfg.controller;
    sum.model = cfg.model;
    for (const auto& r : trace) sum.saturation_count += r.saturated ? 1 : 0;

    std::vector<double> t, x1, ref;
    t.reserve(trace.size());
    x1.reserve(trace.size());
    ref.reserve(trace.size());
    for (const auto& r : trace) {
        t.push_back(r.t);
        x1.push_back(r.x1);
        ref.push_back(r.x1_ref);
    }
    const std::size_t spc = cfg.samples_per_cycle();
    sum.tracking = analysis::tracking_metrics(t, x1, ref, cfg.reference.rms(), spc);

    const std::span<const double> window = std::span<const double>(x1).last(2 * spc);
    sum.spectrum = analysis::dft_harmonics(window, 1.0 / cfg.control_period, cfg.reference.frequency(), cfg.harmonics);
    sum.output_rms = analysis::rms(window);
    if (sum.spectrum.magnitudes.front() > 0.0) sum.thd = analysis::thd(sum.spectrum);
    return sum;
}

namespace {

BatchOutcome run_one(const SimConfig& cfg) {
    BatchOutcome out;
    try {
        out.result = run_scenario(cfg);
    } catch (const ConfigError& e) {
        out.error = e.what();
        out.config_error = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

std::vector<BatchOutcome> run_batch(std::span<const SimConfig> configs, int threads) {
    std::vector<BatchOutcome> out(configs.size());
    const auto count = static_cast<std::ptrdiff_t>(configs.size());
#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
#else
    (void)threads;
#endif
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = run_one(configs[static_cast<std::size_t>(i)]);
    return out;
}

namespace serial {

std::vector<BatchOutcome> run_batch(std::span<const SimConfig> configs) {
    std::vector<BatchOutcome> out;
    out.reserve(configs.size());
    for (const auto& cfg : configs) out.push_back(run_one(cfg));
    return out;
}

}  // namespace serial

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
    out << "t,x1,x1_ref,x2,i_s,u,mu,s,V2,sat\n";
    for (const auto& r : trace) {
        out << format_number(r.t) << ',' << format_number(r.x1) << ',' << format_number(r.x1_ref) << ','
            << format_number(r.x2) << ',' << format_number(r.i_s) << ',' << format_number(r.u) << ',';
        if (r.mu) out << *r.mu;
        out << ',';
        if (r.s) out << format_number(*r.s);
        out << ',';
        if (r.v2) out << format_number(*r.v2);
        out << ',' << (r.saturated ? 1 : 0) << '\n';
    }
}

std::string trace_csv(std::span<const TraceRecord> trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
}

void write_spectrum_csv(std::ostream& out, const analysis::Spectrum& spectrum) {
    out << "harmonic,magnitude_volts\n";
    for (int n = 1; n <= spectrum.harmonics(); ++n)
        out << n << ',' << format_number(spectrum.magnitude(n)) << '\n';
}

}  // namespace inverterlab::sim
