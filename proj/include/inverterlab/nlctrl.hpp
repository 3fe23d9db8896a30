#pragma once

#include "inverterlab/plant.hpp"
#include "inverterlab/reference.hpp"

namespace inverterlab::nlctrl {

/// Gains for the backstepping (k1, k2) and sliding-mode (k, beta, phi) laws.
struct ControllerGains {
    double k1 = 5e3;    // 1/s
    double k2 = 5e3;    // 1/s
    double k = 5e3;     // 1/s, surface slope
    double beta = 1e5;  // A/s, reaching-law gain
    double phi = 20.0;  // A, boundary-layer half-width (0 = pure sign)

    void validate() const;
};

/// Everything a nonlinear law needs at one control instant.
struct ControlInputs {
    plant::PlantState state;
    reference::ReferenceSample ref;
    double load_current = 0.0;       // i_S, A
    double load_current_rate = 0.0;  // di_S/dt, A/s
    plant::PlantParams params;
};

/// Charge-scaled voltage error z = C (x1 - x1*) and its rate z' = x2 - i_S - C x1*'.
struct TrackingError {
    double z = 0.0;
    double rate = 0.0;
};

struct Command {
    double u = 0.0;      // clamped to [-1, 1]
    double u_raw = 0.0;  // before saturation
    bool saturated = false;
};

TrackingError tracking_error(const ControlInputs& in) noexcept;

/// s = k z + z'
double sliding_surface(const TrackingError& err, const ControllerGains& gains) noexcept;

/// Sign with sgn(0) = 0 when phi = 0, otherwise the linear saturation clamp(s/phi, -1, 1).
double sgn_phi(double s, double phi) noexcept;

/// Sliding-mode law. Solves
///   s' = k z' + (u E - x1)/L - di_S/dt - C x1*''
/// for u under s' = -beta sgn_phi(s). Throws std::domain_error on non-finite output.
Command smc_command(const ControlInputs& in, const ControllerGains& gains);

/// Analytic surface rate s' for a given applied command u.
double surface_rate(const ControlInputs& in, double u, const ControllerGains& gains) noexcept;

/// Backstepping errors: z1 = C (x1 - x1*), z2 = x2 - x2* with the virtual
/// control x2* = -k1 z1 + i_S + C x1*'.
struct BacksteppingErrors {
    double z1 = 0.0;
    double z2 = 0.0;
    double virtual_current = 0.0;       // x2*
    double virtual_current_rate = 0.0;  // x2*'
};

BacksteppingErrors backstep_errors(const ControlInputs& in, const ControllerGains& gains) noexcept;

/// V2 = z1^2/2 + z2^2/2
double lyapunov_v2(const BacksteppingErrors& errs) noexcept;

/// Backstepping law: solves z2' = (u E - x1)/L - x2*' = -z1 - k2 z2 for u.
Command backstep_command(const ControlInputs& in, const ControllerGains& gains);

/// z2' = (u E - x1)/L - x2*' for a given applied command u.
double backstep_z2_rate(const ControlInputs& in, double u, const ControllerGains& gains) noexcept;

/// Saturate u_raw to [-1, 1]; throws std::domain_error when u_raw is not finite.
Command saturate(double u_raw);

/// First-order filtered numerical differentiator for a sampled load current,
/// used when di_S/dt is not taken from the load model.
class FilteredDifferentiator {
public:
    FilteredDifferentiator(double sample_period, double time_constant);

    /// Feed the next sample and return the filtered derivative. The first
    /// call returns 0.
    double update(double sample) noexcept;

private:
    double period_;
    double alpha_;
    double previous_ = 0.0;
    double output_ = 0.0;
    bool primed_ = false;
};

}  // namespace inverterlab::nlctrl
