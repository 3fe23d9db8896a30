#pragma once

namespace inverterlab::pwm {

struct PwmConfig {
    double carrier_hz = 10e3;

    /// Requires carrier_hz >= 20 * reference_hz.
    void validate(double reference_hz) const;
    double period() const noexcept { return 1.0 / carrier_hz; }
};

/// Symmetric triangle over [-1, 1]: -1 at t = 0, +1 at half period.
double carrier(double t, const PwmConfig& cfg) noexcept;

/// mu = +1 when u >= carrier(t), else -1. Throws std::domain_error if |u| > 1.
int modulate(double u, double t, const PwmConfig& cfg);

/// Complementary binary switch-pair orders with mu = upper - lower.
struct SwitchOrders {
    int upper = 0;  // (K1, K'2) on
    int lower = 0;  // (K2, K'1) on
};

SwitchOrders switch_orders(int mu) noexcept;

}  // namespace inverterlab::pwm
