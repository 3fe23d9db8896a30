#include "inverterlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace inverterlab::svg {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 400;
constexpr double kMargin = 60;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
    double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

void header(std::ostringstream& out, const std::string& title, const std::string& xl, const std::string& yl,
            const Frame& f) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
        << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << escape(xl)
        << "</text>\n";
    out << "<text x=\"15\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 15 " << kHeight / 2
        << ")\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
        out << "<text x=\"" << kMargin - 5 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << yv
            << "</text>\n";
        out << "<text x=\"" << f.px(xv) << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">" << xv
            << "</text>\n";
    }
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       std::span<const Series> series) {
    Frame f{0, 1, -1, 1};
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (first) {
                f = {s.x[i], s.x[i], s.y[i], s.y[i]};
                first = false;
            }
            f.x0 = std::min(f.x0, s.x[i]);
            f.x1 = std::max(f.x1, s.x[i]);
            f.y0 = std::min(f.y0, s.y[i]);
            f.y1 = std::max(f.y1, s.y[i]);
        }
    }
    if (f.x1 == f.x0) f.x1 = f.x0 + 1;
    if (f.y1 == f.y0) {
        f.y0 -= 1;
        f.y1 += 1;
    }

    std::ostringstream out;
    header(out, title, x_label, y_label, f);
    double legend_y = kMargin + 14;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) out << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << kWidth - kMargin - 5 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" fill=\""
            << s.color << "\">" << escape(s.name) << "</text>\n";
        legend_y += 14;
    }
    out << "</svg>\n";
    return out.str();
}

std::string spectrum_chart(const std::string& title, const analysis::Spectrum& spectrum) {
    const double fundamental = spectrum.magnitudes.empty() ? 0.0 : spectrum.magnitudes.front();
    std::vector<double> pct;
    double top = 0.0;
    for (int n = 2; n <= spectrum.harmonics(); ++n) {
        const double v = fundamental > 0.0 ? 100.0 * spectrum.magnitude(n) / fundamental : 0.0;
        pct.push_back(v);
        top = std::max(top, v);
    }
    if (top <= 0.0) top = 1.0;
    const Frame f{1.5, spectrum.harmonics() + 0.5, 0.0, top};

    std::ostringstream out;
    header(out, title, "harmonic order", "% of fundamental", f);
    const double bar = (f.px(2.0) - f.px(1.0)) * 0.7;
    for (std::size_t i = 0; i < pct.size(); ++i) {
        const double n = static_cast<double>(i + 2);
        out << "<rect x=\"" << f.px(n) - bar / 2 << "\" y=\"" << f.py(pct[i]) << "\" width=\"" << bar
            << "\" height=\"" << f.py(0.0) - f.py(pct[i]) << "\" fill=\"#3366cc\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string waveform_chart(std::span<const sim::TraceRecord> trace) {
    std::vector<Series> s(2);
    s[0] = {"x1 (output)", "#cc3333", {}, {}};
    s[1] = {"x1* (reference)", "#333333", {}, {}};
    for (const auto& r : trace) {
        s[0].x.push_back(r.t * 1e3);
        s[0].y.push_back(r.x1);
        s[1].x.push_back(r.t * 1e3);
        s[1].y.push_back(r.x1_ref);
    }
    return line_chart("Output voltage", "time (ms)", "volts", s);
}

std::string command_chart(std::span<const sim::TraceRecord> trace) {
    std::vector<Series> s(1);
    s[0] = {"u", "#3366cc", {}, {}};
    for (const auto& r : trace) {
        s[0].x.push_back(r.t * 1e3);
        s[0].y.push_back(r.u);
    }
    return line_chart("Control command", "time (ms)", "u", s);
}

}  // namespace inverterlab::svg
