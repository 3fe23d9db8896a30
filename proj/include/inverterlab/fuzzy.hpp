#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inverterlab/nlctrl.hpp"

namespace inverterlab::fuzzy {

inline constexpr std::size_t kTermCount = 7;

/// Linguistic terms with signed indices NB = -3 ... PB = +3.
enum class Term : int { NB = -3, NM = -2, NS = -1, Z = 0, PS = 1, PM = 2, PB = 3 };

inline constexpr std::array<Term, kTermCount> kTerms = {Term::NB, Term::NM, Term::NS, Term::Z,
                                                        Term::PS, Term::PM, Term::PB};

constexpr int signed_index(Term t) noexcept { return static_cast<int>(t); }
constexpr std::size_t slot(Term t) noexcept { return static_cast<std::size_t>(signed_index(t) + 3); }
constexpr Term term_at_slot(std::size_t i) noexcept { return static_cast<Term>(static_cast<int>(i) - 3); }
constexpr Term negate(Term t) noexcept { return static_cast<Term>(-signed_index(t)); }

std::string_view term_name(Term t) noexcept;
std::optional<Term> parse_term(std::string_view name) noexcept;

/// Triangle on [left, right] peaking at center. A shouldered side stays at 1
/// beyond the center.
struct MembershipFunction {
    double left = 0.0;
    double center = 0.0;
    double right = 0.0;
    bool left_shoulder = false;
    bool right_shoulder = false;

    double degree(double x) const noexcept;
};

using Degrees = std::array<double, kTermCount>;

/// Seven membership functions over the normalized universe [-1, 1].
class MembershipSet {
public:
    /// Centers at -1, -2/3, ..., 1 with 50% overlap (partition of unity);
    /// NB and PB shouldered.
    static MembershipSet uniform();

    explicit MembershipSet(std::array<MembershipFunction, kTermCount> mfs);

    const MembershipFunction& operator[](Term t) const noexcept { return mfs_[slot(t)]; }

    /// Degree per term, indexed by slot(). Input is clamped to [-1, 1].
    Degrees fuzzify(double x) const noexcept;

private:
    std::array<MembershipFunction, kTermCount> mfs_;
};

/// 7x7 rule base: (error term, change-of-error term) -> output term.
/// Rows are the error, columns the change of error.
class RuleTable {
public:
    /// The standard 49-rule table (output = clamp(i + j, -3, 3) in signed indices).
    static RuleTable standard();

    /// Parse the plain-text format shipped in data/fuzzy_rules.txt.
    /// Throws std::invalid_argument on malformed input or when the table is
    /// not antisymmetric and monotone.
    static RuleTable parse(std::istream& in);
    static RuleTable load(const std::filesystem::path& path);

    explicit RuleTable(std::array<std::array<Term, kTermCount>, kTermCount> cells);

    Term at(Term error, Term change) const noexcept { return cells_[slot(error)][slot(change)]; }

    /// rule(-i, -j) == -rule(i, j) for every cell.
    bool antisymmetric() const noexcept;
    /// Output index non-decreasing along every row and column.
    bool monotone() const noexcept;

    std::string to_text() const;

    friend bool operator==(const RuleTable&, const RuleTable&) = default;

private:
    std::array<std::array<Term, kTermCount>, kTermCount> cells_;
};

/// Aggregated Mamdani output: each output MF clipped at its strength.
struct Aggregate {
    Degrees strength{};

    bool any_fired() const noexcept;
};

/// Min activation, max aggregation.
Aggregate infer(const Degrees& error, const Degrees& change, const RuleTable& table) noexcept;

struct Crisp {
    double value = 0.0;
    bool fired = true;  // false: all strengths zero, value forced to 0
};

/// Centroid of the pointwise-max envelope of clipped MFs on a uniform grid of
/// `resolution` points over [-1, 1].
Crisp defuzzify_centroid(const Aggregate& agg, const MembershipSet& mfs, int resolution);

struct FuzzyConfig {
    double ke = 1.0 / 50.0;    // 1/V
    double kde = 2e-6;         // s/V
    double ku = 0.5;
    int resolution = 1001;     // defuzzification grid points
    bool feedforward = true;   // add the model feedforward in closed loop
    MembershipSet mfs = MembershipSet::uniform();

    void validate() const;
};

/// u = clamp(Ku * centroid(infer(fuzzify(Ke e), fuzzify(Kde de))), -1, 1)
double flc_command(double e, double de, const FuzzyConfig& cfg, const RuleTable& table);

/// Averaged-model command that reproduces the reference exactly:
/// (x1* + L (di_S/dt + C x1*'')) / E.
double model_feedforward(const nlctrl::ControlInputs& in) noexcept;

/// Closed-loop fuzzy controller with the discrete change-of-error memory.
/// Error is e = x1* - x1; de = (e - e_prev) / Ts, zero at the first sample.
class FuzzyController {
public:
    FuzzyController(FuzzyConfig cfg, RuleTable table, double sample_period);

    nlctrl::Command step(const nlctrl::ControlInputs& in);

    const FuzzyConfig& config() const noexcept { return cfg_; }
    const RuleTable& table() const noexcept { return table_; }

private:
    FuzzyConfig cfg_;
    RuleTable table_;
    double period_;
    double previous_error_ = 0.0;
    bool primed_ = false;
};

/// Evaluate flc_command on the grid error x change (row-major, error outer).
/// Parallelized over grid rows.
std::vector<double> control_surface(std::span<const double> errors, std::span<const double> changes,
                                    const FuzzyConfig& cfg, const RuleTable& table);

namespace serial {
std::vector<double> control_surface(std::span<const double> errors, std::span<const double> changes,
                                    const FuzzyConfig& cfg, const RuleTable& table);
}  // namespace serial

}  // namespace inverterlab::fuzzy
