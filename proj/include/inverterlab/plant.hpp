#pragma once

#include <span>
#include <vector>

namespace inverterlab::plant {

/// Resistance used to represent an open-circuit output.
inline constexpr double kNoLoadResistance = 1e6;

struct PlantParams {
    double inductance = 3e-3;    // H
    double capacitance = 30e-6;  // F
    double dc_bus = 400.0;       // V

    /// Throws ConfigError unless all three are strictly positive and finite.
    void validate() const;
};

/// Filter state: capacitor voltage x1, inductor current x2, time t.
struct PlantState {
    double x1 = 0.0;
    double x2 = 0.0;
    double t = 0.0;

    bool finite() const noexcept;
};

struct LoadSegment {
    double start = 0.0;       // s
    double resistance = 50.0; // ohm
};

/// Piecewise-constant resistive load. Segments are right-continuous: at a
/// step instant the new resistance applies.
class LoadModel {
public:
    explicit LoadModel(std::vector<LoadSegment> segments);

    static LoadModel constant(double resistance);

    double resistance_at(double t) const;
    std::span<const LoadSegment> segments() const noexcept { return segments_; }

    /// Copy with every step time rounded to the nearest multiple of `period`.
    LoadModel snapped(double period) const;

private:
    std::vector<LoadSegment> segments_;
};

struct Derivatives {
    double dx1 = 0.0;  // V/s
    double dx2 = 0.0;  // A/s
};

/// i_S = x1 / R for the segment active at state.t.
double load_current(const PlantState& state, const LoadModel& load);

/// di_S/dt = (x2 - x1/R) / (R C), the derivative of x1/R along the averaged dynamics.
double load_current_rate(const PlantState& state, const LoadModel& load, const PlantParams& params);

/// Averaged-model right-hand side
///   C dx1/dt = x2 - i_S
///   L dx2/dt = u E - x1
/// Throws std::domain_error if |u| > 1.
Derivatives derivatives(const PlantState& state, double u, const PlantParams& params, const LoadModel& load);

/// Same as above with the load resistance already resolved.
Derivatives derivatives_at(double x1, double x2, double u, const PlantParams& params, double resistance) noexcept;

/// (C x1^2 + L x2^2) / 2
double stored_energy(const PlantState& state, const PlantParams& params) noexcept;

}  // namespace inverterlab::plant
