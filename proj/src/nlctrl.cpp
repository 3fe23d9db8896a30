#include "inverterlab/nlctrl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "inverterlab/errors.hpp"

namespace inverterlab::nlctrl {

void ControllerGains::validate() const {
    auto positive = [](double v, const char* key) {
        if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(key, "must be finite and > 0");
    };
    positive(k1, "controller.k1");
    positive(k2, "controller.k2");
    positive(k, "controller.k");
    positive(beta, "controller.beta");
    if (!(std::isfinite(phi) && phi >= 0.0)) throw ConfigError("controller.phi", "must be finite and >= 0");
}

TrackingError tracking_error(const ControlInputs& in) noexcept {
    const double c = in.params.capacitance;
    return {c * (in.state.x1 - in.ref.value), in.state.x2 - in.load_current - c * in.ref.rate};
}

double sliding_surface(const TrackingError& err, const ControllerGains& gains) noexcept {
    return gains.k * err.z + err.rate;
}

double sgn_phi(double s, double phi) noexcept {
    if (phi == 0.0) return static_cast<double>((s > 0.0) - (s < 0.0));
    return std::clamp(s / phi, -1.0, 1.0);
}

Command saturate(double u_raw) {
    if (!std::isfinite(u_raw)) throw std::domain_error("controller produced a non-finite command");
    const double u = std::clamp(u_raw, -1.0, 1.0);
    return {u, u_raw, u != u_raw};
}

Command smc_command(const ControlInputs& in, const ControllerGains& gains) {
    const auto& p = in.params;
    const auto err = tracking_error(in);
    const double s = sliding_surface(err, gains);
    const double bracket = -gains.beta * sgn_phi(s, gains.phi) - gains.k * err.rate + in.load_current_rate +
                           p.capacitance * in.ref.accel;
    return saturate(in.state.x1 / p.dc_bus + (p.inductance / p.dc_bus) * bracket);
}

double surface_rate(const ControlInputs& in, double u, const ControllerGains& gains) noexcept {
    const auto& p = in.params;
    const auto err = tracking_error(in);
    return gains.k * err.rate + (u * p.dc_bus - in.state.x1) / p.inductance - in.load_current_rate -
           p.capacitance * in.ref.accel;
}

BacksteppingErrors backstep_errors(const ControlInputs& in, const ControllerGains& gains) noexcept {
    const auto err = tracking_error(in);  // z1 and its rate share the sliding-mode error definition
    const double c = in.params.capacitance;
    BacksteppingErrors out;
    out.z1 = err.z;
    out.virtual_current = -gains.k1 * err.z + in.load_current + c * in.ref.rate;
    out.z2 = in.state.x2 - out.virtual_current;
    out.virtual_current_rate = -gains.k1 * err.rate + in.load_current_rate + c * in.ref.accel;
    return out;
}

double lyapunov_v2(const BacksteppingErrors& errs) noexcept {
    return 0.5 * errs.z1 * errs.z1 + 0.5 * errs.z2 * errs.z2;
}

Command backstep_command(const ControlInputs& in, const ControllerGains& gains) {
    const auto& p = in.params;
    const auto e = backstep_errors(in, gains);
    const double bracket = -e.z1 - gains.k2 * e.z2 + e.virtual_current_rate;
    return saturate(in.state.x1 / p.dc_bus + (p.inductance / p.dc_bus) * bracket);
}

double backstep_z2_rate(const ControlInputs& in, double u, const ControllerGains& gains) noexcept {
    const auto& p = in.params;
    const auto e = backstep_errors(in, gains);
    return (u * p.dc_bus - in.state.x1) / p.inductance - e.virtual_current_rate;
}

FilteredDifferentiator::FilteredDifferentiator(double sample_period, double time_constant)
    : period_(sample_period), alpha_(sample_period / (time_constant + sample_period)) {
    if (!(sample_period > 0.0) || !(time_constant >= 0.0))
        throw ConfigError("controller.dis_filter_tau_s", "needs positive sample period and tau >= 0");
}

double FilteredDifferentiator::update(double sample) noexcept {
    if (!primed_) {
        primed_ = true;
        previous_ = sample;
        return output_;
    }
    const double raw = (sample - previous_) / period_;
    previous_ = sample;
    output_ += alpha_ * (raw - output_);
    return output_;
}

}  // namespace inverterlab::nlctrl
