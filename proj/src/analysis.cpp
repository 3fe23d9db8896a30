#include "inverterlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace inverterlab::analysis {

namespace {

void check_window(std::span<const double> samples, int harmonics) {
    if (harmonics < 2) throw std::invalid_argument("need at least 2 harmonics");
    if (samples.size() < 2 * static_cast<std::size_t>(harmonics) + 1)
        throw std::invalid_argument("window too short for the requested harmonic count");
}

double dc_of(std::span<const double> samples) {
    double sum = 0.0;
    for (double x : samples) sum += x;
    return sum / static_cast<double>(samples.size());
}

// Magnitude of harmonic n: bin n * cycles of the window.
double harmonic_magnitude(std::span<const double> samples, int cycles, int n) {
    const auto count = samples.size();
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        // reduce the phase index modulo the window to keep the argument small
        const auto idx = (static_cast<std::size_t>(n) * static_cast<std::size_t>(cycles) * k) % count;
        const double arg = 2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(count);
        re += samples[k] * std::cos(arg);
        im -= samples[k] * std::sin(arg);
    }
    return 2.0 / static_cast<double>(count) * std::hypot(re, im);
}

}  // namespace

int whole_cycles(std::size_t count, double sample_rate, double fundamental_hz) {
    if (!(sample_rate > 0.0) || !(fundamental_hz > 0.0))
        throw std::invalid_argument("sample rate and fundamental must be positive");
    const double cycles = static_cast<double>(count) * fundamental_hz / sample_rate;
    const double rounded = std::round(cycles);
    if (std::abs(cycles - rounded) > 1e-6 * std::max(1.0, cycles))
        throw std::invalid_argument("window does not cover an integer number of fundamental cycles");
    if (rounded < 2.0) throw std::invalid_argument("window must cover at least 2 fundamental cycles");
    return static_cast<int>(rounded);
}

Spectrum dft_harmonics(std::span<const double> samples, double sample_rate, double fundamental_hz, int harmonics) {
    check_window(samples, harmonics);
    const int cycles = whole_cycles(samples.size(), sample_rate, fundamental_hz);

    Spectrum out;
    out.fundamental_hz = fundamental_hz;
    out.dc = dc_of(samples);
    out.magnitudes.assign(static_cast<std::size_t>(harmonics), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int n = 1; n <= harmonics; ++n)
        out.magnitudes[static_cast<std::size_t>(n - 1)] = harmonic_magnitude(samples, cycles, n);
    return out;
}

namespace serial {

Spectrum dft_harmonics(std::span<const double> samples, double sample_rate, double fundamental_hz, int harmonics) {
    check_window(samples, harmonics);
    const int cycles = whole_cycles(samples.size(), sample_rate, fundamental_hz);

    Spectrum out;
    out.fundamental_hz = fundamental_hz;
    out.dc = dc_of(samples);
    out.magnitudes.reserve(static_cast<std::size_t>(harmonics));
    for (int n = 1; n <= harmonics; ++n) out.magnitudes.push_back(harmonic_magnitude(samples, cycles, n));
    return out;
}

}  // namespace serial

double thd(const Spectrum& spectrum) {
    if (spectrum.magnitudes.size() < 2) throw std::invalid_argument("spectrum needs at least 2 harmonics");
    const double fundamental = spectrum.magnitudes.front();
    double sum = 0.0;
    for (std::size_t i = 1; i < spectrum.magnitudes.size(); ++i) sum += spectrum.magnitudes[i] * spectrum.magnitudes[i];
    // a fundamental at round-off level relative to the rest of the signal counts as zero
    const double scale = std::abs(spectrum.dc) + fundamental + std::sqrt(sum);
    if (!(fundamental > 1e-12 * scale)) throw std::domain_error("THD undefined for a zero fundamental");
    return std::sqrt(sum) / fundamental;
}

double rms(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("rms of an empty series");
    double sum = 0.0;
    for (double x : samples) sum += x * x;
    return std::sqrt(sum / static_cast<double>(samples.size()));
}

std::optional<double> settle_time(std::span<const double> time, std::span<const double> output,
                                  std::span<const double> reference, double threshold, double from,
                                  double min_hold) {
    if (time.size() != output.size() || time.size() != reference.size())
        throw std::invalid_argument("time, output and reference lengths differ");
    if (time.empty()) return std::nullopt;

    std::optional<double> last_violation;
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (time[i] < from) continue;
        if (!(std::abs(output[i] - reference[i]) <= threshold)) last_violation = time[i];
    }
    if (!last_violation) return 0.0;
    if (*last_violation == time.back()) return std::nullopt;
    // settled from the sample after the last violation
    const double settled_at = *std::upper_bound(time.begin(), time.end(), *last_violation);
    if (time.back() - settled_at < min_hold) return std::nullopt;
    return settled_at - from;
}

TrackingMetrics tracking_metrics(std::span<const double> time, std::span<const double> output,
                                 std::span<const double> reference, double reference_rms,
                                 std::size_t samples_per_cycle) {
    if (time.size() != output.size() || time.size() != reference.size())
        throw std::invalid_argument("time, output and reference lengths differ");
    const std::size_t window = 2 * samples_per_cycle;
    if (samples_per_cycle == 0 || time.size() < window)
        throw std::invalid_argument("trace shorter than two fundamental cycles");

    TrackingMetrics m;
    const std::size_t first = time.size() - window;
    double sum = 0.0;
    for (std::size_t i = first; i < time.size(); ++i) {
        const double err = output[i] - reference[i];
        sum += err * err;
        m.peak_error = std::max(m.peak_error, std::abs(err));
    }
    m.rms_error = std::sqrt(sum / static_cast<double>(window));
    m.rms_error_pct = reference_rms > 0.0 ? 100.0 * m.rms_error / reference_rms : 0.0;

    const double peak = reference_rms * std::numbers::sqrt2;
    const double cycle = time.size() > samples_per_cycle ? time[samples_per_cycle] - time[0] : 0.0;
    m.settle_time = settle_time(time, output, reference, 0.05 * peak, time.front(), cycle);
    return m;
}

}  // namespace inverterlab::analysis
