#include "inverterlab/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inverterlab/errors.hpp"

namespace inverterlab::plant {

namespace {

void require_positive(double v, const char* key) {
    if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(key, "must be finite and > 0");
}

}  // namespace

void PlantParams::validate() const {
    require_positive(inductance, "plant.inductance_H");
    require_positive(capacitance, "plant.capacitance_F");
    require_positive(dc_bus, "plant.dc_bus_E");
}

bool PlantState::finite() const noexcept {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(t);
}

LoadModel::LoadModel(std::vector<LoadSegment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ConfigError("load.segments", "at least one segment required");
    if (segments_.front().start != 0.0) throw ConfigError("load.segments", "first segment must start at t = 0");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& seg = segments_[i];
        if (!(std::isfinite(seg.resistance) && seg.resistance > 0.0))
            throw ConfigError("load.segments", "resistance must be finite and > 0");
        if (i > 0 && !(seg.start > segments_[i - 1].start))
            throw ConfigError("load.segments", "start times must be strictly increasing");
    }
}

LoadModel LoadModel::constant(double resistance) { return LoadModel({{0.0, resistance}}); }

double LoadModel::resistance_at(double t) const {
    // last segment whose start <= t
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double time, const LoadSegment& seg) { return time < seg.start; });
    if (it == segments_.begin()) return segments_.front().resistance;
    return std::prev(it)->resistance;
}

LoadModel LoadModel::snapped(double period) const {
    std::vector<LoadSegment> out;
    out.reserve(segments_.size());
    for (const auto& seg : segments_) {
        const double start = std::round(seg.start / period) * period;
        if (!out.empty() && start <= out.back().start) {
            // two steps collapsed onto one control instant; the later one wins
            out.back().resistance = seg.resistance;
            continue;
        }
        out.push_back({start, seg.resistance});
    }
    return LoadModel(std::move(out));
}

double load_current(const PlantState& state, const LoadModel& load) {
    return state.x1 / load.resistance_at(state.t);
}

double load_current_rate(const PlantState& state, const LoadModel& load, const PlantParams& params) {
    const double r = load.resistance_at(state.t);
    return (state.x2 - state.x1 / r) / (r * params.capacitance);
}

Derivatives derivatives_at(double x1, double x2, double u, const PlantParams& params, double resistance) noexcept {
    return {(x2 - x1 / resistance) / params.capacitance, (u * params.dc_bus - x1) / params.inductance};
}

Derivatives derivatives(const PlantState& state, double u, const PlantParams& params, const LoadModel& load) {
    if (!(std::abs(u) <= 1.0)) throw std::domain_error("command outside [-1, 1]");
    return derivatives_at(state.x1, state.x2, u, params, load.resistance_at(state.t));
}

double stored_energy(const PlantState& state, const PlantParams& params) noexcept {
    return 0.5 * (params.capacitance * state.x1 * state.x1 + params.inductance * state.x2 * state.x2);
}

}  // namespace inverterlab::plant
