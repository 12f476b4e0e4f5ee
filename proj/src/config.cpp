#include "elc/config.hpp"

namespace elc {

void PipelineConfig::validate() const {
    if (!(fps > 0.0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
    detector.validate();
    tracker.validate();
    bounce.validate();
    eval.validate();
    (void)format_frame_name(frame_pattern, 0);
}

json to_json(const PipelineConfig& c) {
    const DetectorConfig& d = c.detector;
    const MogParams& m = d.background;
    json j = {
        {"fps", c.fps},
        {"frame_pattern", c.frame_pattern},
        {"detector",
         {{"hue_range", json::array({d.hue_lo, d.hue_hi})},
          {"sat_min", d.sat_min},
          {"val_min", d.val_min},
          {"area_range", json::array({d.area_min_frac, d.area_max_frac})},
          {"morph_radius", d.morph_radius},
          {"gate_radius", d.gate_radius},
          {"warmup_frames", d.warmup_frames},
          {"background",
           {{"K", m.max_modes},
            {"alpha", m.alpha},
            {"T", m.bg_threshold},
            {"lambda", m.match_sigma},
            {"var_init", m.var_init},
            {"var_min", m.var_min}}}}},
        {"tracker",
         {{"max_gap", c.tracker.max_gap},
          {"min_track_len", c.tracker.min_track_len},
          {"window_before", c.tracker.window_before},
          {"window_after", c.tracker.window_after}}},
        {"bounce",
         {{"tau_v", c.bounce.tau_v},
          {"W", c.bounce.window_frames},
          {"K_max", c.bounce.max_uncertain},
          {"mode", std::string(to_string(c.bounce.mode))},
          {"bracket_margin", c.bounce.bracket_margin}}},
        {"eval", {{"epsilon", c.eval.epsilon}, {"mode", std::string(to_string(c.eval.mode))}}},
    };
    j["court"] = c.court ? json(c.court->generic_string()) : json(nullptr);
    return j;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadInput, where + "." + key + ": " + e.what());
    }
}

void read_range(const json& j, const char* key, double& lo, double& hi, const std::string& where) {
    if (!j.contains(key)) return;
    std::vector<double> v;
    read(j, key, v, where);
    if (v.size() != 2) throw Error(ErrorCode::BadInput, where + "." + key + " must be [lo, hi]");
    lo = v[0];
    hi = v[1];
}

}  // namespace

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    require_keys(j, {"fps", "frame_pattern", "detector", "tracker", "bounce", "eval", "court"}, "config");
    read(j, "fps", c.fps, "config");
    read(j, "frame_pattern", c.frame_pattern, "config");

    if (j.contains("detector")) {
        const json& d = j.at("detector");
        const std::string w = "config.detector";
        require_keys(d, {"hue_range", "sat_min", "val_min", "area_range", "morph_radius", "gate_radius",
                         "warmup_frames", "background"}, w);
        read_range(d, "hue_range", c.detector.hue_lo, c.detector.hue_hi, w);
        read(d, "sat_min", c.detector.sat_min, w);
        read(d, "val_min", c.detector.val_min, w);
        read_range(d, "area_range", c.detector.area_min_frac, c.detector.area_max_frac, w);
        read(d, "morph_radius", c.detector.morph_radius, w);
        read(d, "gate_radius", c.detector.gate_radius, w);
        read(d, "warmup_frames", c.detector.warmup_frames, w);
        if (d.contains("background")) {
            const json& b = d.at("background");
            const std::string wb = w + ".background";
            require_keys(b, {"K", "alpha", "T", "lambda", "var_init", "var_min"}, wb);
            MogParams& m = c.detector.background;
            read(b, "K", m.max_modes, wb);
            read(b, "alpha", m.alpha, wb);
            read(b, "T", m.bg_threshold, wb);
            read(b, "lambda", m.match_sigma, wb);
            read(b, "var_init", m.var_init, wb);
            read(b, "var_min", m.var_min, wb);
        }
    }
    if (j.contains("tracker")) {
        const json& t = j.at("tracker");
        const std::string w = "config.tracker";
        require_keys(t, {"max_gap", "min_track_len", "window_before", "window_after"}, w);
        read(t, "max_gap", c.tracker.max_gap, w);
        read(t, "min_track_len", c.tracker.min_track_len, w);
        read(t, "window_before", c.tracker.window_before, w);
        read(t, "window_after", c.tracker.window_after, w);
    }
    if (j.contains("bounce")) {
        const json& b = j.at("bounce");
        const std::string w = "config.bounce";
        require_keys(b, {"tau_v", "W", "K_max", "mode", "bracket_margin"}, w);
        read(b, "tau_v", c.bounce.tau_v, w);
        read(b, "W", c.bounce.window_frames, w);
        read(b, "K_max", c.bounce.max_uncertain, w);
        read(b, "bracket_margin", c.bounce.bracket_margin, w);
        std::string mode = std::string(to_string(c.bounce.mode));
        read(b, "mode", mode, w);
        if (mode == "exhaustive") {
            c.bounce.mode = SearchMode::Exhaustive;
        } else if (mode == "monotone_split") {
            c.bounce.mode = SearchMode::MonotoneSplit;
        } else {
            throw Error(ErrorCode::BadInput, w + ".mode must be exhaustive or monotone_split");
        }
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        const std::string w = "config.eval";
        require_keys(e, {"epsilon", "mode"}, w);
        read(e, "epsilon", c.eval.epsilon, w);
        std::string mode = std::string(to_string(c.eval.mode));
        read(e, "mode", mode, w);
        if (mode == "call_match") {
            c.eval.mode = EvalMode::CallMatch;
        } else if (mode == "distance") {
            c.eval.mode = EvalMode::Distance;
        } else {
            throw Error(ErrorCode::BadInput, w + ".mode must be call_match or distance");
        }
    }
    if (j.contains("court") && !j.at("court").is_null()) {
        std::string p;
        read(j, "court", p, "config");
        std::filesystem::path court = p;
        if (court.is_relative() && !base_dir.empty()) court = base_dir / court;
        c.court = court;
    }
    try {
        c.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::BadInput, e.what());
    }
    return c;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::BadInput, "override must look like key=value: " + assignment);
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw Error(ErrorCode::BadInput, "bad override key: " + key);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
        node = &(*node)[part];
        start = dot + 1;
    }
}

PipelineConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
    json doc = json::object();
    std::filesystem::path base;
    if (file) {
        doc = read_json_file(*file);
        base = file->parent_path();
    }
    for (const std::string& o : overrides) apply_override(doc, o);
    return config_from_json(doc, base);
}

}  // namespace elc
