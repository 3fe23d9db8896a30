#pragma once

#include <optional>
#include <span>
#include <vector>

namespace inverterlab::analysis {

inline constexpr int kDefaultHarmonics = 50;

struct Spectrum {
    double fundamental_hz = 0.0;
    double dc = 0.0;
    std::vector<double> magnitudes;  // peak amplitude of harmonic n at index n - 1

    int harmonics() const noexcept { return static_cast<int>(magnitudes.size()); }
    double magnitude(int n) const { return magnitudes.at(static_cast<std::size_t>(n - 1)); }
};

/// Number of whole fundamental cycles covered by `count` samples at
/// `sample_rate`. Throws std::invalid_argument if coverage is not an integer
/// >= 2 (leakage would corrupt the harmonic magnitudes).
int whole_cycles(std::size_t count, double sample_rate, double fundamental_hz);

/// Harmonic magnitudes 1..H by direct summation over the window. Each
/// harmonic is computed independently, in parallel.
Spectrum dft_harmonics(std::span<const double> samples, double sample_rate, double fundamental_hz,
                       int harmonics = kDefaultHarmonics);

namespace serial {
Spectrum dft_harmonics(std::span<const double> samples, double sample_rate, double fundamental_hz,
                       int harmonics = kDefaultHarmonics);
}  // namespace serial

/// sqrt(sum_{n>=2} mag[n]^2) / mag[1]. Throws std::domain_error on a zero fundamental.
double thd(const Spectrum& spectrum);

/// Root mean square. Throws std::invalid_argument on empty input.
double rms(std::span<const double> samples);

struct TrackingMetrics {
    double rms_error = 0.0;      // V
    double rms_error_pct = 0.0;  // percent of reference RMS
    double peak_error = 0.0;     // V
    std::optional<double> settle_time;  // s; empty when it never settles
};

/// Errors over the final two cycles; settle time is the first instant after
/// which |x1 - x1*| stays within 5% of the reference peak, held for at least
/// one cycle before the end of the trace.
TrackingMetrics tracking_metrics(std::span<const double> time, std::span<const double> output,
                                 std::span<const double> reference, double reference_rms,
                                 std::size_t samples_per_cycle);

/// Time, measured from `from`, after which |output - reference| <= threshold
/// for every remaining sample. Empty when the settled tail is shorter than
/// `min_hold` seconds (a trace that only dips inside the band at its very end
/// has not settled).
std::optional<double> settle_time(std::span<const double> time, std::span<const double> output,
                                  std::span<const double> reference, double threshold, double from = 0.0,
                                  double min_hold = 0.0);

}  // namespace inverterlab::analysis
