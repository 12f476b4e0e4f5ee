#include "elc/linecall.hpp"

#include <algorithm>
#include <cctype>

namespace elc {

std::string_view to_string(Call c) noexcept { return c == Call::In ? "IN" : "OUT"; }

Call parse_call(std::string_view s) {
    std::string up(s);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (up == "IN") return Call::In;
    if (up == "OUT") return Call::Out;
    throw Error(ErrorCode::BadInput, "call must be IN or OUT, got '" + std::string(s) + "'");
}

void CourtLineSpec::validate() const {
    if (lines.empty()) throw Error(ErrorCode::BadInput, "court needs at least one line");
    for (const CourtLine& l : lines) {
        if (l.p0 == l.p1) throw Error(ErrorCode::DegenerateLine, "line '" + l.name + "' has p0 == p1");
        if (!(l.thickness >= 0.0)) throw Error(ErrorCode::BadInput, "line '" + l.name + "' has negative thickness");
        if (l.in_side != 1 && l.in_side != -1) {
            throw Error(ErrorCode::BadInput, "line '" + l.name + "' in_side must be +1 or -1");
        }
    }
}

double signed_distance(const Point2& p, const CourtLine& line) {
    return line.in_side * point_line_signed_distance<double>(p, line.p0, line.p1) + 0.5 * line.thickness;
}

Verdict call_point(const Point2& p, const CourtLineSpec& court, double delta, bool confident) {
    court.validate();
    Verdict v;
    v.confident = confident;
    for (const CourtLine& line : court.lines) {
        const double d = signed_distance(p, line);
        v.per_line.push_back({line.name, d});
        if (v.per_line.size() == 1 || d < v.margin || (d == v.margin && line.name < v.decisive_line)) {
            v.margin = d;
            v.decisive_line = line.name;
        }
    }
    v.call = v.margin < -delta ? Call::Out : Call::In;
    return v;
}

Verdict call(const BouncePrediction& bounce, const CourtLineSpec& court, double delta) {
    return call_point(bounce.point, court, delta, bounce.confident);
}

}  // namespace elc
