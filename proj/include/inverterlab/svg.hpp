#pragma once

#include <span>
#include <string>
#include <vector>

#include "inverterlab/analysis.hpp"
#include "inverterlab/sim.hpp"

namespace inverterlab::svg {

struct Series {
    std::string name;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG line chart.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       std::span<const Series> series);

/// Harmonic magnitudes as bars, as a percentage of the fundamental.
std::string spectrum_chart(const std::string& title, const analysis::Spectrum& spectrum);

/// waveform (x1 vs x1*), command u.
std::string waveform_chart(std::span<const sim::TraceRecord> trace);
std::string command_chart(std::span<const sim::TraceRecord> trace);

}  // namespace inverterlab::svg
