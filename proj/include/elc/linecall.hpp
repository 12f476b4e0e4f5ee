#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "elc/bounce.hpp"
#include "elc/error.hpp"

namespace elc {

/// Signed perpendicular distance from `p` to the infinite line through
/// p0 -> p1, positive to the side where cross(p1 - p0, p - p0) > 0.
template <typename Scalar>
Scalar point_line_signed_distance(const Eigen::Matrix<Scalar, 2, 1>& p, const Eigen::Matrix<Scalar, 2, 1>& p0,
                                  const Eigen::Matrix<Scalar, 2, 1>& p1) {
    const Eigen::Matrix<Scalar, 2, 1> dir = p1 - p0;
    const Scalar len = dir.norm();
    if (!(len > Scalar(0))) throw Error(ErrorCode::DegenerateLine, "line endpoints coincide");
    const Eigen::Matrix<Scalar, 2, 1> rel = p - p0;
    return (dir.x() * rel.y() - dir.y() * rel.x()) / len;
}

enum class Call : std::uint8_t { In, Out };
std::string_view to_string(Call c) noexcept;
/// Accepts "IN"/"OUT" (case-insensitive). Throws BadInput.
Call parse_call(std::string_view s);

struct CourtLine {
    std::string name;
    Point2 p0 = Point2::Zero();
    Point2 p1 = Point2::Zero();
    double thickness = 0.0;  // px
    int in_side = 1;         // +1: in-bounds where the raw signed distance is positive
};

struct CourtLineSpec {
    std::vector<CourtLine> lines;
    double delta = 0.0;  // px, bias toward IN

    /// Throws DegenerateLine / BadInput.
    void validate() const;
};

struct LineDistance {
    std::string name;
    double distance = 0.0;
};

struct Verdict {
    Call call = Call::In;
    std::string decisive_line;
    double margin = 0.0;  // px, positive inside
    std::vector<LineDistance> per_line;
    bool confident = true;
};

/// Distance from the outer edge of the painted line, positive in-bounds:
/// any point touching the paint has distance >= 0.
[[nodiscard]] double signed_distance(const Point2& p, const CourtLine& line);

/// The decisive line carries the smallest signed distance (smallest name on
/// ties, so line order does not matter); the call is OUT iff that margin is below -delta.
[[nodiscard]] Verdict call_point(const Point2& p, const CourtLineSpec& court, double delta, bool confident = true);
[[nodiscard]] Verdict call(const BouncePrediction& bounce, const CourtLineSpec& court, double delta);

}  // namespace elc
