#include "inverterlab/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "inverterlab/errors.hpp"

namespace inverterlab::fuzzy {

namespace {

constexpr std::array<std::string_view, kTermCount> kNames = {"NB", "NM", "NS", "Z", "PS", "PM", "PB"};

using Grid = std::array<std::array<Term, kTermCount>, kTermCount>;

}  // namespace

std::string_view term_name(Term t) noexcept { return kNames[slot(t)]; }

std::optional<Term> parse_term(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kTermCount; ++i)
        if (kNames[i] == name) return term_at_slot(i);
    return std::nullopt;
}

double MembershipFunction::degree(double x) const noexcept {
    if (x == center) return 1.0;
    if (x < center) {
        if (left_shoulder) return 1.0;
        if (x <= left) return 0.0;
        return (x - left) / (center - left);
    }
    if (right_shoulder) return 1.0;
    if (x >= right) return 0.0;
    return (right - x) / (right - center);
}

MembershipSet MembershipSet::uniform() {
    std::array<MembershipFunction, kTermCount> mfs{};
    for (std::size_t i = 0; i < kTermCount; ++i) {
        const auto center = [](std::size_t k) { return static_cast<double>(static_cast<int>(k) - 3) / 3.0; };
        auto& mf = mfs[i];
        mf.center = center(i);
        mf.left = i == 0 ? -1.0 : center(i - 1);
        mf.right = i + 1 == kTermCount ? 1.0 : center(i + 1);
        mf.left_shoulder = i == 0;
        mf.right_shoulder = i + 1 == kTermCount;
    }
    return MembershipSet(mfs);
}

MembershipSet::MembershipSet(std::array<MembershipFunction, kTermCount> mfs) : mfs_(mfs) {
    for (const auto& mf : mfs_)
        if (!(mf.left <= mf.center && mf.center <= mf.right))
            throw std::invalid_argument("membership function needs left <= center <= right");
}

Degrees MembershipSet::fuzzify(double x) const noexcept {
    x = std::clamp(x, -1.0, 1.0);
    Degrees out{};
    for (std::size_t i = 0; i < kTermCount; ++i) out[i] = mfs_[i].degree(x);
    return out;
}

RuleTable::RuleTable(Grid cells) : cells_(cells) {}

RuleTable RuleTable::standard() {
    Grid cells{};
    for (std::size_t i = 0; i < kTermCount; ++i)
        for (std::size_t j = 0; j < kTermCount; ++j) {
            const int sum = signed_index(term_at_slot(i)) + signed_index(term_at_slot(j));
            cells[i][j] = static_cast<Term>(std::clamp(sum, -3, 3));
        }
    return RuleTable(cells);
}

bool RuleTable::antisymmetric() const noexcept {
    for (Term e : kTerms)
        for (Term c : kTerms)
            if (at(negate(e), negate(c)) != negate(at(e, c))) return false;
    return true;
}

bool RuleTable::monotone() const noexcept {
    for (std::size_t i = 0; i < kTermCount; ++i)
        for (std::size_t j = 0; j + 1 < kTermCount; ++j) {
            if (signed_index(cells_[i][j + 1]) < signed_index(cells_[i][j])) return false;
            if (signed_index(cells_[j + 1][i]) < signed_index(cells_[j][i])) return false;
        }
    return true;
}

RuleTable RuleTable::parse(std::istream& in) {
    auto fail = [](std::size_t line_no, const std::string& msg) -> RuleTable {
        throw std::invalid_argument("rule table line " + std::to_string(line_no) + ": " + msg);
    };

    Grid cells{};
    bool header_seen = false;
    std::size_t rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::vector<std::string> words;
        for (std::string w; tokens >> w;) words.push_back(w);
        if (words.empty()) continue;
        if (words.size() != kTermCount + 1) return fail(line_no, "expected 8 fields");

        if (!header_seen) {
            for (std::size_t j = 0; j < kTermCount; ++j)
                if (words[j + 1] != kNames[j]) return fail(line_no, "header must list NB NM NS Z PS PM PB");
            header_seen = true;
            continue;
        }
        if (rows == kTermCount) return fail(line_no, "more than 7 rule rows");
        if (words[0] != kNames[rows]) return fail(line_no, "row label out of order: " + words[0]);
        for (std::size_t j = 0; j < kTermCount; ++j) {
            auto t = parse_term(words[j + 1]);
            if (!t) return fail(line_no, "unknown term " + words[j + 1]);
            cells[rows][j] = *t;
        }
        ++rows;
    }
    if (!header_seen) return fail(line_no, "missing header");
    if (rows != kTermCount) return fail(line_no, "expected 7 rule rows, got " + std::to_string(rows));

    RuleTable table(cells);
    if (!table.antisymmetric()) throw std::invalid_argument("rule table is not antisymmetric");
    if (!table.monotone()) throw std::invalid_argument("rule table is not monotone along rows and columns");
    return table;
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open rule table " + path.string());
    return parse(in);
}

std::string RuleTable::to_text() const {
    std::ostringstream out;
    out << "E\\CE";
    for (auto n : kNames) out << ' ' << n;
    out << '\n';
    for (std::size_t i = 0; i < kTermCount; ++i) {
        out << kNames[i];
        for (std::size_t j = 0; j < kTermCount; ++j) out << ' ' << term_name(cells_[i][j]);
        out << '\n';
    }
    return out.str();
}

bool Aggregate::any_fired() const noexcept {
    return std::any_of(strength.begin(), strength.end(), [](double s) { return s > 0.0; });
}

Aggregate infer(const Degrees& error, const Degrees& change, const RuleTable& table) noexcept {
    Aggregate agg;
    for (std::size_t i = 0; i < kTermCount; ++i) {
        if (error[i] <= 0.0) continue;
        for (std::size_t j = 0; j < kTermCount; ++j) {
            if (change[j] <= 0.0) continue;
            const double activation = std::min(error[i], change[j]);
            auto& slot_strength = agg.strength[slot(table.at(term_at_slot(i), term_at_slot(j)))];
            slot_strength = std::max(slot_strength, activation);
        }
    }
    return agg;
}

Crisp defuzzify_centroid(const Aggregate& agg, const MembershipSet& mfs, int resolution) {
    if (resolution < 2) throw std::invalid_argument("defuzzification resolution must be >= 2");
    if (!agg.any_fired()) return {0.0, false};

    // Grid points x_g = (2g - (n-1)) / (n-1) are exact mirrors of each other;
    // summing mirrored pairs keeps the centroid exactly odd in the aggregate.
    const auto envelope = [&](double x) {
        double mu = 0.0;
        for (std::size_t k = 0; k < kTermCount; ++k) {
            if (agg.strength[k] <= 0.0) continue;
            mu = std::max(mu, std::min(agg.strength[k], mfs[term_at_slot(k)].degree(x)));
        }
        return mu;
    };
    const double span = static_cast<double>(resolution - 1);
    double num = 0.0;
    double den = 0.0;
    for (int g = 0; 2 * g < resolution - 1; ++g) {
        const double x = static_cast<double>(2 * g - (resolution - 1)) / span;
        const double lo = envelope(x);
        const double hi = envelope(-x);
        num += x * (lo - hi);
        den += lo + hi;
    }
    if (resolution % 2 == 1) den += envelope(0.0);
    if (den == 0.0) return {0.0, false};
    return {num / den, true};
}

void FuzzyConfig::validate() const {
    auto positive = [](double v, const char* key) {
        if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(key, "must be finite and > 0");
    };
    positive(ke, "controller.fuzzy.ke");
    positive(kde, "controller.fuzzy.kde");
    positive(ku, "controller.fuzzy.ku");
    if (resolution < 101) throw ConfigError("controller.fuzzy.resolution", "must be >= 101");
}

double flc_command(double e, double de, const FuzzyConfig& cfg, const RuleTable& table) {
    const auto agg = infer(cfg.mfs.fuzzify(cfg.ke * e), cfg.mfs.fuzzify(cfg.kde * de), table);
    return std::clamp(cfg.ku * defuzzify_centroid(agg, cfg.mfs, cfg.resolution).value, -1.0, 1.0);
}

double model_feedforward(const nlctrl::ControlInputs& in) noexcept {
    const auto& p = in.params;
    return (in.ref.value + p.inductance * (in.load_current_rate + p.capacitance * in.ref.accel)) / p.dc_bus;
}

FuzzyController::FuzzyController(FuzzyConfig cfg, RuleTable table, double sample_period)
    : cfg_(std::move(cfg)), table_(table), period_(sample_period) {
    cfg_.validate();
}

nlctrl::Command FuzzyController::step(const nlctrl::ControlInputs& in) {
    const double e = in.ref.value - in.state.x1;
    const double de = primed_ ? (e - previous_error_) / period_ : 0.0;
    previous_error_ = e;
    primed_ = true;
    double u = flc_command(e, de, cfg_, table_);
    if (cfg_.feedforward) u += model_feedforward(in);
    return nlctrl::saturate(u);
}

std::vector<double> control_surface(std::span<const double> errors, std::span<const double> changes,
                                    const FuzzyConfig& cfg, const RuleTable& table) {
    cfg.validate();  // nothing may throw inside the parallel region
    std::vector<double> out(errors.size() * changes.size());
    const auto rows = static_cast<std::ptrdiff_t>(errors.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto base = static_cast<std::size_t>(i) * changes.size();
        for (std::size_t j = 0; j < changes.size(); ++j)
            out[base + j] = flc_command(errors[static_cast<std::size_t>(i)], changes[j], cfg, table);
    }
    return out;
}

namespace serial {

std::vector<double> control_surface(std::span<const double> errors, std::span<const double> changes,
                                    const FuzzyConfig& cfg, const RuleTable& table) {
    std::vector<double> out;
    out.reserve(errors.size() * changes.size());
    for (double e : errors)
        for (double de : changes) out.push_back(flc_command(e, de, cfg, table));
    return out;
}

}  // namespace serial

}  // namespace inverterlab::fuzzy
