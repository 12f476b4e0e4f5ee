#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elc/least_squares.hpp"
#include "elc/tracker.hpp"

namespace elc {

enum class Phase : std::uint8_t { Descending, Ascending, Uncertain };

/// What the quadratics are fitted against: image x, or frame index.
enum class AbscissaMode : std::uint8_t { X, T };

enum class SearchMode : std::uint8_t { Exhaustive, MonotoneSplit };

std::string_view to_string(Phase p) noexcept;
std::string_view to_string(AbscissaMode m) noexcept;
std::string_view to_string(SearchMode m) noexcept;

/// Per-point phase labels of an analysis window, together with the window
/// data the fits need.
struct PhaseLabeling {
    std::vector<double> u;       // abscissa per point
    std::vector<double> x;       // image x per point
    std::vector<double> y;       // image y per point
    std::vector<int> frames;     // frame index per point
    std::vector<double> v_y;     // px/frame
    std::vector<Phase> labels;
    AbscissaMode mode = AbscissaMode::T;
    std::size_t anchor = 0;      // y-max point

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    /// Indices of Uncertain points, in time order.
    [[nodiscard]] std::vector<std::size_t> uncertain() const;
    [[nodiscard]] int count(Phase p) const;
};

/// Phase for each Uncertain point (time order). Bit j of `bits` set means
/// uncertain point j goes to the ascending phase.
struct Assignment {
    std::uint32_t bits = 0;
    int k = 0;

    [[nodiscard]] Phase phase(int j) const noexcept {
        return ((bits >> static_cast<unsigned>(j)) & 1U) != 0U ? Phase::Ascending : Phase::Descending;
    }
    /// '0' = descending, '1' = ascending, one character per uncertain point.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AssignmentFit {
    QuadraticFit<double> descending;
    QuadraticFit<double> ascending;
    double combined_mse = 0.0;
};

struct SearchResult {
    Assignment assignment;
    AssignmentFit fit;
};

struct BounceConfig {
    double tau_v = 1.5;     // px/frame
    int window_frames = 3;  // W
    int max_uncertain = 10; // K_max
    SearchMode mode = SearchMode::Exhaustive;
    double bracket_margin = 2.0;  // abscissa units
    /// When set, intersections outside the frame grown by 10% fall back.
    std::optional<std::pair<int, int>> frame_size;

    void validate() const;
};

struct BouncePrediction {
    Point2 point = Point2::Zero();
    double u_star = 0.0;
    Assignment assignment;
    double combined_mse = 0.0;
    bool confident = true;
    AbscissaMode mode = AbscissaMode::T;
    SearchMode search = SearchMode::Exhaustive;
    AssignmentFit fits;
    /// x as a function of frame index over the descending points (T mode only).
    std::optional<LineFit<double>> x_of_t;
    std::pair<double, double> bracket{0.0, 0.0};
    std::string fallback_reason;  // empty when confident
    PhaseLabeling labeling;
};

/// Labels points by forward-difference vertical velocity around the y-max
/// anchor. Throws TooShort (< 7 points) or PhaseStarved.
[[nodiscard]] PhaseLabeling label_phases(const Trajectory& window, double tau_v, int window_frames,
                                         int max_uncertain);

/// Fits both phases under one assignment. Throws NoFeasibleAssignment when a
/// phase has fewer than 3 points, Degenerate when a fit is singular.
[[nodiscard]] AssignmentFit evaluate_assignment(const PhaseLabeling& labeling, const Assignment& asg);

inline constexpr double kTieRelative = 1e-12;
inline constexpr double kTieFloor = 1e-20;  // times the mean squared ordinate

/// Minimum pooled-MSE assignment. Ties (within kTieRelative relative, or an
/// absolute kTieFloor * mean(y^2) for rounding-level fits) go to the more
/// balanced split, then to the earlier candidate in enumeration order
/// (ascending bitmask for Exhaustive, split position for MonotoneSplit).
[[nodiscard]] SearchResult search_min_mse(const PhaseLabeling& labeling, SearchMode mode);

/// Candidate assignments in enumeration order.
[[nodiscard]] std::vector<Assignment> enumerate_assignments(int k, SearchMode mode);

/// Returns (u*, y*) with y* on the descending curve. Throws NoIntersection or
/// IdenticalCurves.
[[nodiscard]] std::pair<double, double> intersect(const QuadraticFit<double>& descending,
                                                  const QuadraticFit<double>& ascending,
                                                  std::pair<double, double> bracket);

/// [last descending u - margin, first ascending u + margin], ordered.
[[nodiscard]] std::pair<double, double> intersection_bracket(const PhaseLabeling& labeling,
                                                             const Assignment& asg, double margin);

/// label -> search -> intersect. Failed intersections fall back to the window's
/// y-max point with confident = false. Labeling and search failures are
/// rethrown as AnalysisFailed.
[[nodiscard]] BouncePrediction predict_bounce(const Trajectory& window, const BounceConfig& cfg);

}  // namespace elc
