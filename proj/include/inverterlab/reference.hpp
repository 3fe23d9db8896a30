#pragma once

namespace inverterlab::reference {

/// Sinusoidal output-voltage reference x1*(t) = V sqrt(2) sin(w t).
class ReferenceSpec {
public:
    ReferenceSpec() = default;
    /// Throws ConfigError unless rms_volts >= 0 and frequency_hz > 0.
    /// A zero amplitude is accepted for equilibrium runs.
    ReferenceSpec(double rms_volts, double frequency_hz);

    double rms() const noexcept { return rms_; }
    double frequency() const noexcept { return frequency_; }
    double omega() const noexcept;
    double peak() const noexcept;
    double period() const noexcept { return 1.0 / frequency_; }

private:
    double rms_ = 230.0;
    double frequency_ = 50.0;
};

struct ReferenceSample {
    double value = 0.0;  // V
    double rate = 0.0;   // V/s
    double accel = 0.0;  // V/s^2
};

/// Analytic reference and its first two derivatives at time t.
ReferenceSample reference_eval(const ReferenceSpec& spec, double t) noexcept;

}  // namespace inverterlab::reference
