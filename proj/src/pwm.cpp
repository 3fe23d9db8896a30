#include "inverterlab/pwm.hpp"

#include <cmath>
#include <stdexcept>

#include "inverterlab/errors.hpp"

namespace inverterlab::pwm {

void PwmConfig::validate(double reference_hz) const {
    if (!(std::isfinite(carrier_hz) && carrier_hz > 0.0)) throw ConfigError("pwm.carrier_hz", "must be > 0");
    if (carrier_hz < 20.0 * reference_hz)
        throw ConfigError("pwm.carrier_hz", "must be at least 20x the reference frequency");
}

double carrier(double t, const PwmConfig& cfg) noexcept {
    const double cycles = t * cfg.carrier_hz;
    const double phase = cycles - std::floor(cycles);
    return phase < 0.5 ? -1.0 + 4.0 * phase : 3.0 - 4.0 * phase;
}

int modulate(double u, double t, const PwmConfig& cfg) {
    if (!(std::abs(u) <= 1.0)) throw std::domain_error("command outside [-1, 1]");
    return u >= carrier(t, cfg) ? 1 : -1;
}

SwitchOrders switch_orders(int mu) noexcept { return {(1 + mu) / 2, (1 - mu) / 2}; }

}  // namespace inverterlab::pwm
