#include "inverterlab/reference.hpp"

#include <cmath>
#include <numbers>

#include "inverterlab/errors.hpp"

namespace inverterlab::reference {

ReferenceSpec::ReferenceSpec(double rms_volts, double frequency_hz) : rms_(rms_volts), frequency_(frequency_hz) {
    if (!(std::isfinite(rms_volts) && rms_volts >= 0.0)) throw ConfigError("reference.rms_volts", "must be >= 0");
    if (!(std::isfinite(frequency_hz) && frequency_hz > 0.0))
        throw ConfigError("reference.frequency_hz", "must be > 0");
}

double ReferenceSpec::omega() const noexcept { return 2.0 * std::numbers::pi * frequency_; }

double ReferenceSpec::peak() const noexcept { return rms_ * std::numbers::sqrt2; }

ReferenceSample reference_eval(const ReferenceSpec& spec, double t) noexcept {
    const double w = spec.omega();
    const double a = spec.peak();
    const double phase = w * t;
    const double value = a * std::sin(phase);
    return {value, a * w * std::cos(phase), -w * w * value};
}

}  // namespace inverterlab::reference
