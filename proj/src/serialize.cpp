#include "elc/serialize.hpp"

#include <fstream>
#include <sstream>

namespace elc {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadInput, path.string() + ": " + e.what());
    }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << dump(doc);
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorCode::BadInput, where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw Error(ErrorCode::BadInput, where + ": unknown key '" + key + "'");
    }
}

namespace {

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw Error(ErrorCode::BadInput, where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadInput, where + ": bad '" + key + "': " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Point2 get_point(const json& j, const char* key, const std::string& where) {
    const auto v = get<std::vector<double>>(j, key, where);
    if (v.size() != 2) throw Error(ErrorCode::BadInput, where + ": '" + key + "' must be [x, y]");
    return {v[0], v[1]};
}

json point(const Point2& p) { return json::array({p.x(), p.y()}); }

json detection_json(const BallDetection& d) {
    return {{"frame_index", d.frame_index}, {"x", d.centroid.x()}, {"y", d.centroid.y()},
            {"area", d.area}, {"score", d.score}};
}

BallDetection detection_from(const json& j, const std::string& where) {
    BallDetection d;
    d.frame_index = get<int>(j, "frame_index", where);
    d.centroid = Point2(get<double>(j, "x", where), get<double>(j, "y", where));
    d.area = get_or<double>(j, "area", 0.0, where);
    d.score = get_or<double>(j, "score", 0.0, where);
    return d;
}

}  // namespace

std::vector<BallDetection> DetectionLog::hits() const {
    std::vector<BallDetection> out;
    for (const FrameRecord& f : frames) {
        if (f.detection) out.push_back(*f.detection);
    }
    return out;
}

json to_json(const DetectionLog& log) {
    json frames = json::array();
    for (const FrameRecord& f : log.frames) {
        if (f.detection) {
            frames.push_back(detection_json(*f.detection));
        } else {
            frames.push_back({{"frame_index", f.frame_index}, {"miss", true}});
        }
    }
    return {{"fps", log.fps}, {"width", log.width}, {"height", log.height}, {"frames", frames}};
}

DetectionLog detection_log_from_json(const json& j) {
    const std::string where = "detections";
    require_keys(j, {"fps", "width", "height", "frames", "points"}, where);
    DetectionLog log;
    log.fps = get<double>(j, "fps", where);
    log.width = get_or<int>(j, "width", 0, where);
    log.height = get_or<int>(j, "height", 0, where);
    const char* list_key = j.contains("frames") ? "frames" : "points";
    if (!j.contains(list_key) || !j.at(list_key).is_array()) {
        throw Error(ErrorCode::BadInput, where + ": need a 'frames' or 'points' list");
    }
    for (const auto& rec : j.at(list_key)) {
        require_keys(rec, {"frame_index", "x", "y", "area", "score", "miss"}, where + " record");
        FrameRecord f;
        f.frame_index = get<int>(rec, "frame_index", where);
        if (!get_or<bool>(rec, "miss", false, where)) f.detection = detection_from(rec, where);
        if (!log.frames.empty() && f.frame_index <= log.frames.back().frame_index) {
            throw Error(ErrorCode::BadInput, where + ": frame indices must increase");
        }
        log.frames.push_back(f);
    }
    if (!(log.fps > 0.0)) throw Error(ErrorCode::BadInput, where + ": fps must be positive");
    return log;
}

json to_json(const Trajectory& traj) {
    json pts = json::array();
    for (const BallDetection& d : traj.points) pts.push_back(detection_json(d));
    return {{"fps", traj.fps}, {"points", pts}};
}

Trajectory trajectory_from_json(const json& j) {
    const DetectionLog log = detection_log_from_json(j);
    Trajectory t;
    t.fps = log.fps;
    t.points = log.hits();
    t.validate();
    return t;
}

json to_json(const CourtLineSpec& court) {
    json lines = json::array();
    for (const CourtLine& l : court.lines) {
        lines.push_back({{"name", l.name}, {"p0", point(l.p0)}, {"p1", point(l.p1)},
                         {"thickness", l.thickness}, {"in_side", l.in_side}});
    }
    return {{"lines", lines}, {"delta", court.delta}};
}

CourtLineSpec court_from_json(const json& j) {
    const std::string where = "court";
    require_keys(j, {"lines", "delta"}, where);
    CourtLineSpec court;
    court.delta = get_or<double>(j, "delta", 0.0, where);
    if (!j.contains("lines") || !j.at("lines").is_array()) throw Error(ErrorCode::BadInput, where + ": need 'lines'");
    for (const auto& lj : j.at("lines")) {
        require_keys(lj, {"name", "p0", "p1", "thickness", "in_side"}, where + " line");
        CourtLine l;
        l.name = get<std::string>(lj, "name", where);
        l.p0 = get_point(lj, "p0", where);
        l.p1 = get_point(lj, "p1", where);
        l.thickness = get_or<double>(lj, "thickness", 0.0, where);
        l.in_side = get_or<int>(lj, "in_side", 1, where);
        court.lines.push_back(l);
    }
    court.validate();
    return court;
}

CourtLineSpec load_court(const std::filesystem::path& path) { return court_from_json(read_json_file(path)); }

namespace {

json fit_json(const QuadraticFit<double>& f) {
    return {{"a", f.a()}, {"b", f.b()}, {"c", f.c()}, {"sse", f.sse}, {"n", f.n}};
}

}  // namespace

json to_json(const BouncePrediction& p) {
    json labels = json::array();
    for (Phase ph : p.labeling.labels) labels.push_back(std::string(to_string(ph)));
    json j = {
        {"x", p.point.x()},
        {"y", p.point.y()},
        {"u_star", p.u_star},
        {"combined_mse", p.combined_mse},
        {"confident", p.confident},
        {"assignment_bits", p.assignment.to_string()},
        {"mode", std::string(to_string(p.mode))},
        {"search", std::string(to_string(p.search))},
        {"bracket", json::array({p.bracket.first, p.bracket.second})},
        {"descending_fit", fit_json(p.fits.descending)},
        {"ascending_fit", fit_json(p.fits.ascending)},
        {"labels", labels},
    };
    if (p.x_of_t) j["x_of_t"] = {{"slope", p.x_of_t->slope}, {"intercept", p.x_of_t->intercept}};
    if (!p.fallback_reason.empty()) j["fallback_reason"] = p.fallback_reason;
    return j;
}

json to_json(const Verdict& v) {
    json per = json::array();
    for (const LineDistance& d : v.per_line) per.push_back({{"name", d.name}, {"distance", d.distance}});
    return {{"call", std::string(to_string(v.call))},
            {"decisive_line", v.decisive_line},
            {"margin", v.margin},
            {"confident", v.confident},
            {"per_line", per}};
}

json to_json(const synth::GroundTruth& t) {
    json j = {{"bounce_point", point(t.bounce_point)}, {"bounce_time", t.bounce_time}, {"tag", t.tag}};
    if (t.true_call) j["true_call"] = std::string(to_string(*t.true_call));
    if (t.true_margin) j["true_margin"] = *t.true_margin;
    if (!t.decisive_line.empty()) j["decisive_line"] = t.decisive_line;
    return j;
}

synth::GroundTruth ground_truth_from_json(const json& j) {
    const std::string where = "ground_truth";
    require_keys(j, {"bounce_point", "bounce_time", "tag", "true_call", "true_margin", "decisive_line"}, where);
    synth::GroundTruth t;
    t.bounce_point = get_point(j, "bounce_point", where);
    t.bounce_time = get<double>(j, "bounce_time", where);
    t.tag = get_or<std::string>(j, "tag", "normal", where);
    if (j.contains("true_call")) t.true_call = parse_call(get<std::string>(j, "true_call", where));
    if (j.contains("true_margin")) t.true_margin = get<double>(j, "true_margin", where);
    t.decisive_line = get_or<std::string>(j, "decisive_line", "", where);
    return t;
}

json to_json(const synth::SynthParams& p) {
    return {{"p0", point(p.p0)},
            {"v0", point(p.v0)},
            {"g", p.g},
            {"restitution", p.restitution},
            {"friction", p.friction},
            {"ground_y", p.ground_y},
            {"fps", p.fps},
            {"n_frames", p.n_frames},
            {"start_frame", p.start_frame},
            {"noise_sigma", p.noise_sigma},
            {"dropout_p", p.dropout_p},
            {"ball_radius", p.ball_radius},
            {"seed", p.seed},
            {"width", p.width},
            {"height", p.height}};
}

synth::SynthParams synth_params_from_json(const json& j) {
    const std::string where = "synth params";
    require_keys(j,
                 {"p0", "v0", "g", "restitution", "friction", "ground_y", "fps", "n_frames", "start_frame",
                  "noise_sigma", "dropout_p", "ball_radius", "seed", "width", "height"},
                 where);
    synth::SynthParams p;
    if (j.contains("p0")) p.p0 = get_point(j, "p0", where);
    if (j.contains("v0")) p.v0 = get_point(j, "v0", where);
    p.g = get_or(j, "g", p.g, where);
    p.restitution = get_or(j, "restitution", p.restitution, where);
    p.friction = get_or(j, "friction", p.friction, where);
    p.ground_y = get_or(j, "ground_y", p.ground_y, where);
    p.fps = get_or(j, "fps", p.fps, where);
    p.n_frames = get_or(j, "n_frames", p.n_frames, where);
    p.start_frame = get_or(j, "start_frame", p.start_frame, where);
    p.noise_sigma = get_or(j, "noise_sigma", p.noise_sigma, where);
    p.dropout_p = get_or(j, "dropout_p", p.dropout_p, where);
    p.ball_radius = get_or(j, "ball_radius", p.ball_radius, where);
    p.seed = get_or(j, "seed", p.seed, where);
    p.width = get_or(j, "width", p.width, where);
    p.height = get_or(j, "height", p.height, where);
    p.validate();
    return p;
}

json to_json(const SampleAnnotation& a) {
    json j = {{"id", a.id},
              {"source", a.source.generic_string()},
              {"court", a.court.generic_string()},
              {"gt_call", std::string(to_string(a.gt_call))},
              {"tag", a.tag}};
    if (a.gt_bounce) j["gt_bounce"] = point(*a.gt_bounce);
    return j;
}

SampleAnnotation sample_annotation_from_json(const json& j) {
    const std::string where = "manifest sample";
    require_keys(j, {"id", "source", "court", "gt_call", "gt_bounce", "tag"}, where);
    SampleAnnotation a;
    a.id = get<std::string>(j, "id", where);
    a.source = get<std::string>(j, "source", where);
    a.court = get<std::string>(j, "court", where);
    a.gt_call = parse_call(get<std::string>(j, "gt_call", where));
    if (j.contains("gt_bounce") && !j.at("gt_bounce").is_null()) a.gt_bounce = get_point(j, "gt_bounce", where);
    a.tag = get_or<std::string>(j, "tag", "normal", where);
    if (a.tag != "normal" && a.tag != "confusing") {
        throw Error(ErrorCode::BadInput, where + " '" + a.id + "': tag must be normal or confusing");
    }
    return a;
}

namespace {

json stats_json(const TagStats& s) {
    return {{"number", s.count}, {"success", s.successes}, {"r_suc", s.r_suc}, {"percent", percent(s.r_suc)}};
}

}  // namespace

json to_json(const EvalReport& rep) {
    json records = json::array();
    for (const SampleRecord& r : rep.records) {
        json j = {{"id", r.id}, {"tag", r.tag}, {"L_v", r.l_v}, {"L_v_call", r.l_v_call},
                  {"gt_call", std::string(to_string(r.gt_call))}, {"confident", r.confident}};
        j["call"] = r.call ? json(std::string(to_string(*r.call))) : json(nullptr);
        j["margin"] = r.margin ? json(*r.margin) : json(nullptr);
        j["bounce_err"] = r.bounce_err ? json(*r.bounce_err) : json(nullptr);
        j["L_v_distance"] = r.l_v_distance ? json(*r.l_v_distance) : json(nullptr);
        if (!r.error.empty()) j["error"] = r.error;
        records.push_back(j);
    }
    return {{"config", {{"epsilon", rep.config.epsilon}, {"mode", std::string(to_string(rep.config.mode))}}},
            {"summary",
             {{"normal", stats_json(rep.normal)},
              {"confusing", stats_json(rep.confusing)},
              {"total", stats_json(rep.total)}}},
            {"records", records}};
}

}  // namespace elc
