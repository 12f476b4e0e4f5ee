#include "elc/bounce.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace elc {

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Descending: return "descending";
        case Phase::Ascending: return "ascending";
        case Phase::Uncertain: return "uncertain";
    }
    return "?";
}

std::string_view to_string(AbscissaMode m) noexcept { return m == AbscissaMode::X ? "x" : "t"; }

std::string_view to_string(SearchMode m) noexcept {
    return m == SearchMode::Exhaustive ? "exhaustive" : "monotone_split";
}

std::vector<std::size_t> PhaseLabeling::uncertain() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == Phase::Uncertain) out.push_back(i);
    }
    return out;
}

int PhaseLabeling::count(Phase p) const {
    return static_cast<int>(std::count(labels.begin(), labels.end(), p));
}

std::string Assignment::to_string() const {
    std::string s;
    for (int j = 0; j < k; ++j) s.push_back(phase(j) == Phase::Ascending ? '1' : '0');
    return s;
}

void BounceConfig::validate() const {
    if (!(tau_v >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tau_v must be >= 0");
    if (window_frames < 0) throw Error(ErrorCode::InvalidConfig, "W must be >= 0");
    if (max_uncertain < 0 || max_uncertain > 20) throw Error(ErrorCode::InvalidConfig, "K_max must be in [0,20]");
    if (!(bracket_margin >= 0.0)) throw Error(ErrorCode::InvalidConfig, "bracket margin must be >= 0");
}

// ---------------------------------------------------------------------------

PhaseLabeling label_phases(const Trajectory& window, double tau_v, int window_frames, int max_uncertain) {
    const std::size_t n = window.size();
    if (n < 7) throw Error(ErrorCode::TooShort, "phase labeling needs >= 7 points, got " + std::to_string(n));
    window.validate();

    PhaseLabeling lab;
    lab.x.resize(n);
    lab.y.resize(n);
    lab.frames.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        lab.x[i] = window.points[i].centroid.x();
        lab.y[i] = window.points[i].centroid.y();
        lab.frames[i] = window.points[i].frame_index;
    }
    lab.v_y.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        lab.v_y[i] = (lab.y[i + 1] - lab.y[i]) / (lab.frames[i + 1] - lab.frames[i]);
    }
    lab.v_y[n - 1] = (lab.y[n - 1] - lab.y[n - 2]) / (lab.frames[n - 1] - lab.frames[n - 2]);
    lab.anchor = window.y_max_index();

    const int anchor_frame = lab.frames[lab.anchor];
    lab.labels.assign(n, Phase::Uncertain);
    for (std::size_t i = 0; i < n; ++i) {
        const int dist = lab.frames[i] - anchor_frame;
        const bool near = std::abs(dist) < window_frames;
        const double v = lab.v_y[i];
        if (near || std::abs(v) <= tau_v) continue;
        if (v > tau_v && dist < window_frames) {
            lab.labels[i] = Phase::Descending;
        } else if (v < -tau_v && dist > -window_frames) {
            lab.labels[i] = Phase::Ascending;
        }
        // Velocity contradicting the side of the anchor stays Uncertain.
    }

    auto unc = lab.uncertain();
    if (static_cast<int>(unc.size()) > max_uncertain) {
        std::stable_sort(unc.begin(), unc.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(lab.frames[a] - anchor_frame) < std::abs(lab.frames[b] - anchor_frame);
        });
        for (std::size_t j = static_cast<std::size_t>(max_uncertain); j < unc.size(); ++j) {
            const std::size_t i = unc[j];
            const double v = lab.v_y[i];
            if (v > 0.0) {
                lab.labels[i] = Phase::Descending;
            } else if (v < 0.0) {
                lab.labels[i] = Phase::Ascending;
            } else {
                lab.labels[i] = i < lab.anchor ? Phase::Descending : Phase::Ascending;
            }
        }
    }

    const int nd = lab.count(Phase::Descending);
    const int na = lab.count(Phase::Ascending);
    const int nu = lab.count(Phase::Uncertain);
    if (lab.anchor == 0 || lab.anchor == n - 1) {
        throw Error(ErrorCode::PhaseStarved, "lowest point is at the window edge; no bounce in view");
    }
    if (nd + nu < 3 || na + nu < 3 || nd + na + nu < 6) {
        throw Error(ErrorCode::PhaseStarved, "descending=" + std::to_string(nd) + " ascending=" +
                                                 std::to_string(na) + " uncertain=" + std::to_string(nu));
    }

    double xmin = lab.x[0];
    double xmax = lab.x[0];
    for (double v : lab.x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    lab.mode = (xmax - xmin) >= 1.5 * static_cast<double>(n) ? AbscissaMode::X : AbscissaMode::T;
    lab.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        lab.u[i] = lab.mode == AbscissaMode::X ? lab.x[i] : static_cast<double>(lab.frames[i]);
    }
    return lab;
}

// ---------------------------------------------------------------------------

namespace {

// Phase of every point under an assignment.
std::vector<Phase> resolve(const PhaseLabeling& lab, const Assignment& asg) {
    std::vector<Phase> out = lab.labels;
    int j = 0;
    for (auto& p : out) {
        if (p == Phase::Uncertain) p = asg.phase(j++);
    }
    return out;
}

QuadraticFit<double> fit_phase(const PhaseLabeling& lab, const std::vector<Phase>& phases, Phase which) {
    std::vector<double> u;
    std::vector<double> y;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i] == which) {
            u.push_back(lab.u[i]);
            y.push_back(lab.y[i]);
        }
    }
    using Map = Eigen::Map<const Eigen::VectorXd>;
    return fit_quadratic(Map(u.data(), static_cast<Eigen::Index>(u.size())),
                         Map(y.data(), static_cast<Eigen::Index>(y.size())));
}

std::pair<int, int> phase_sizes(const PhaseLabeling& lab, const Assignment& asg) {
    const int ones = std::popcount(asg.bits);
    return {lab.count(Phase::Descending) + asg.k - ones, lab.count(Phase::Ascending) + ones};
}

}  // namespace

AssignmentFit evaluate_assignment(const PhaseLabeling& lab, const Assignment& asg) {
    if (asg.k != lab.count(Phase::Uncertain)) {
        throw Error(ErrorCode::BadInput, "assignment size does not match uncertain count");
    }
    const auto [nd, na] = phase_sizes(lab, asg);
    if (nd < 3 || na < 3) {
        throw Error(ErrorCode::NoFeasibleAssignment,
                    "phase sizes " + std::to_string(nd) + "/" + std::to_string(na) + " below 3");
    }
    const auto phases = resolve(lab, asg);
    AssignmentFit fit;
    fit.descending = fit_phase(lab, phases, Phase::Descending);
    fit.ascending = fit_phase(lab, phases, Phase::Ascending);
    fit.combined_mse = (fit.descending.sse + fit.ascending.sse) / (fit.descending.n + fit.ascending.n);
    return fit;
}

std::vector<Assignment> enumerate_assignments(int k, SearchMode mode) {
    if (k < 0 || k > 30) throw Error(ErrorCode::InvalidConfig, "uncertain count out of range");
    std::vector<Assignment> out;
    if (mode == SearchMode::Exhaustive) {
        const std::uint32_t total = 1U << static_cast<unsigned>(k);
        out.reserve(total);
        for (std::uint32_t bits = 0; bits < total; ++bits) out.push_back({bits, k});
    } else {
        // Split s: the first s uncertain points descend, the rest ascend.
        for (int s = 0; s <= k; ++s) {
            const std::uint32_t all = (1U << static_cast<unsigned>(k)) - 1U;
            const std::uint32_t low = (1U << static_cast<unsigned>(s)) - 1U;
            out.push_back({all & ~low, k});
        }
    }
    return out;
}

SearchResult search_min_mse(const PhaseLabeling& lab, SearchMode mode) {
    const int k = lab.count(Phase::Uncertain);
    // Exact fits leave rounding-level mse; compare those against the data's scale.
    double mean_y2 = 0.0;
    for (double y : lab.y) mean_y2 += y * y;
    mean_y2 /= static_cast<double>(std::max<std::size_t>(1, lab.y.size()));
    const double floor = kTieFloor * mean_y2;
    std::optional<SearchResult> best;
    int best_balance = 0;
    for (const Assignment& asg : enumerate_assignments(k, mode)) {
        const auto [nd, na] = phase_sizes(lab, asg);
        if (nd < 3 || na < 3) continue;
        AssignmentFit fit;
        try {
            fit = evaluate_assignment(lab, asg);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Degenerate) continue;
            throw;
        }
        const int balance = std::abs(nd - na);
        if (!best) {
            best = SearchResult{asg, fit};
            best_balance = balance;
            continue;
        }
        const double cur = best->fit.combined_mse;
        const double tol = kTieRelative * std::max(cur, fit.combined_mse) + floor;
        const bool better = fit.combined_mse < cur - tol ||
                            (std::abs(fit.combined_mse - cur) <= tol && balance < best_balance);
        if (better) {
            best = SearchResult{asg, fit};
            best_balance = balance;
        }
    }
    if (!best) throw Error(ErrorCode::NoFeasibleAssignment, "no assignment gives both phases >= 3 fit points");
    return *best;
}

// ---------------------------------------------------------------------------

std::pair<double, double> intersection_bracket(const PhaseLabeling& lab, const Assignment& asg, double margin) {
    const auto phases = resolve(lab, asg);
    std::optional<double> last_d;
    std::optional<double> first_a;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i] == Phase::Descending) last_d = lab.u[i];
        if (phases[i] == Phase::Ascending && !first_a) first_a = lab.u[i];
    }
    if (!last_d || !first_a) throw Error(ErrorCode::NoFeasibleAssignment, "a phase is empty");
    const double lo = std::min(*last_d, *first_a) - margin;
    const double hi = std::max(*last_d, *first_a) + margin;
    return {lo, hi};
}

std::pair<double, double> intersect(const QuadraticFit<double>& fd, const QuadraticFit<double>& fa,
                                    std::pair<double, double> bracket) {
    const auto [lo, hi] = bracket;
    const double mid = 0.5 * (lo + hi);
    // Work in v = u - mid so the root arithmetic stays near the origin.
    auto shifted = [mid](const QuadraticFit<double>& f) {
        return Eigen::Vector3d(f.a(), f.b() + 2.0 * f.a() * mid, f.c() + (f.a() * mid + f.b()) * mid);
    };
    const Eigen::Vector3d sd = shifted(fd);
    const Eigen::Vector3d diff = sd - shifted(fa);
    const double da = diff(0);
    const double db = diff(1);
    const double dc = diff(2);

    auto in_bracket = [&](double v) { return v + mid >= lo && v + mid <= hi; };
    std::optional<double> root;
    if (std::abs(da) < 1e-12) {
        if (std::abs(db) < 1e-12) {
            if (std::abs(dc) <= 1e-9 * std::max(1.0, std::abs(sd(2)))) {
                throw Error(ErrorCode::IdenticalCurves, "descending and ascending fits coincide");
            }
            throw Error(ErrorCode::NoIntersection, "curves differ by a constant");
        }
        const double v = -dc / db;
        if (in_bracket(v)) root = v;
    } else {
        const double disc = db * db - 4.0 * da * dc;
        if (disc < 0.0) throw Error(ErrorCode::NoIntersection, "no real intersection");
        const double q = -0.5 * (db + std::copysign(std::sqrt(disc), db));
        std::vector<double> roots;
        roots.push_back(q / da);
        if (q != 0.0) roots.push_back(dc / q);
        for (double v : roots) {
            if (!in_bracket(v)) continue;
            if (!root || std::abs(v) < std::abs(*root)) root = v;
        }
    }
    if (!root) {
        throw Error(ErrorCode::NoIntersection,
                    "no intersection in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    const double v = *root;
    const double y = (sd(0) * v + sd(1)) * v + sd(2);
    return {v + mid, y};
}

// ---------------------------------------------------------------------------

namespace {

LineFit<double> fit_x_of_t(const PhaseLabeling& lab, const Assignment& asg) {
    const auto phases = resolve(lab, asg);
    std::vector<double> t;
    std::vector<double> x;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i] == Phase::Descending) {
            t.push_back(static_cast<double>(lab.frames[i]));
            x.push_back(lab.x[i]);
        }
    }
    using Map = Eigen::Map<const Eigen::VectorXd>;
    return fit_line(Map(t.data(), static_cast<Eigen::Index>(t.size())),
                    Map(x.data(), static_cast<Eigen::Index>(x.size())));
}

}  // namespace

BouncePrediction predict_bounce(const Trajectory& window, const BounceConfig& cfg) {
    cfg.validate();
    BouncePrediction pred;
    pred.search = cfg.mode;
    SearchResult found;
    try {
        pred.labeling = label_phases(window, cfg.tau_v, cfg.window_frames, cfg.max_uncertain);
        found = search_min_mse(pred.labeling, cfg.mode);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::BadInput) throw;
        throw Error(ErrorCode::AnalysisFailed, e.what());
    }
    const PhaseLabeling& lab = pred.labeling;
    pred.mode = lab.mode;
    pred.assignment = found.assignment;
    pred.fits = found.fit;
    pred.combined_mse = found.fit.combined_mse;
    pred.bracket = intersection_bracket(lab, found.assignment, cfg.bracket_margin);
    if (lab.mode == AbscissaMode::T) pred.x_of_t = fit_x_of_t(lab, found.assignment);

    auto fall_back = [&](const std::string& why) {
        pred.confident = false;
        pred.fallback_reason = why;
        pred.point = Point2(lab.x[lab.anchor], lab.y[lab.anchor]);
        pred.u_star = lab.u[lab.anchor];
    };

    try {
        const auto [u_star, y_star] = intersect(found.fit.descending, found.fit.ascending, pred.bracket);
        pred.u_star = u_star;
        const double x_star = lab.mode == AbscissaMode::X ? u_star : (*pred.x_of_t)(u_star);
        pred.point = Point2(x_star, y_star);
        pred.confident = true;
        if (cfg.frame_size) {
            const double w = cfg.frame_size->first;
            const double h = cfg.frame_size->second;
            if (x_star < -0.1 * w || x_star > 1.1 * w || y_star < -0.1 * h || y_star > 1.1 * h) {
                fall_back("intersection outside frame");
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoIntersection && e.code() != ErrorCode::IdenticalCurves) throw;
        fall_back(e.what());
    }
    return pred;
}

}  // namespace elc
