#include "elc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "elc/serialize.hpp"

namespace elc {

std::string_view to_string(EvalMode m) noexcept { return m == EvalMode::CallMatch ? "call_match" : "distance"; }

void EvalConfig::validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
}

std::vector<SampleAnnotation> load_manifest(const std::filesystem::path& path) {
    const auto doc = read_json_file(path);
    const auto base = path.parent_path();
    const auto& list = doc.is_object() ? doc.at("samples") : doc;
    if (!list.is_array()) throw Error(ErrorCode::BadInput, "manifest must be a list of samples");
    std::vector<SampleAnnotation> out;
    std::set<std::string> ids;
    for (const auto& j : list) {
        SampleAnnotation ann = sample_annotation_from_json(j);
        if (ann.source.is_relative()) ann.source = base / ann.source;
        if (ann.court.is_relative()) ann.court = base / ann.court;
        if (!ids.insert(ann.id).second) throw Error(ErrorCode::BadInput, "duplicate sample id '" + ann.id + "'");
        if (!std::filesystem::exists(ann.source)) {
            throw Error(ErrorCode::BadInput, "sample '" + ann.id + "' source missing: " + ann.source.string());
        }
        out.push_back(std::move(ann));
    }
    return out;
}

int judge_sample(const SampleOutcome& outcome, const SampleAnnotation& ann, const EvalConfig& cfg) {
    if (cfg.mode == EvalMode::CallMatch) return outcome.call == ann.gt_call ? 1 : 0;
    if (!ann.gt_bounce) throw Error(ErrorCode::MissingGroundTruth, "sample '" + ann.id + "' has no gt_bounce");
    return (outcome.point - *ann.gt_bounce).norm() < cfg.epsilon ? 1 : 0;
}

SampleRecord make_record(const SampleAnnotation& ann, const std::optional<SampleOutcome>& outcome,
                         const EvalConfig& cfg, const std::string& error) {
    SampleRecord r;
    r.id = ann.id;
    r.tag = ann.tag;
    r.gt_call = ann.gt_call;
    r.error = error;
    if (!outcome) {
        if (ann.gt_bounce) r.l_v_distance = 0;
        if (cfg.mode == EvalMode::Distance && !ann.gt_bounce) {
            throw Error(ErrorCode::MissingGroundTruth, "sample '" + ann.id + "' has no gt_bounce");
        }
        return r;
    }
    r.call = outcome->call;
    r.margin = outcome->margin;
    r.confident = outcome->confident;
    r.l_v_call = judge_sample(*outcome, ann, EvalConfig{cfg.epsilon, EvalMode::CallMatch});
    if (ann.gt_bounce) {
        r.bounce_err = (outcome->point - *ann.gt_bounce).norm();
        r.l_v_distance = judge_sample(*outcome, ann, EvalConfig{cfg.epsilon, EvalMode::Distance});
    }
    r.l_v = judge_sample(*outcome, ann, cfg);
    return r;
}

namespace {

void finish(TagStats& s) { s.r_suc = s.count > 0 ? static_cast<double>(s.successes) / s.count : 0.0; }

}  // namespace

EvalReport aggregate(std::vector<SampleRecord> records, const EvalConfig& cfg) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "no samples to aggregate");
    std::sort(records.begin(), records.end(), [](const SampleRecord& a, const SampleRecord& b) { return a.id < b.id; });
    EvalReport rep;
    rep.config = cfg;
    for (const SampleRecord& r : records) {
        if (r.l_v != 0 && r.l_v != 1) throw Error(ErrorCode::BadInput, "L_v must be 0 or 1");
        TagStats& s = r.tag == "confusing" ? rep.confusing : rep.normal;
        ++s.count;
        s.successes += r.l_v;
    }
    rep.total.count = rep.normal.count + rep.confusing.count;
    rep.total.successes = rep.normal.successes + rep.confusing.successes;
    finish(rep.normal);
    finish(rep.confusing);
    finish(rep.total);
    rep.records = std::move(records);
    return rep;
}

std::string percent(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * ratio);
    return buf;
}

std::string format_table(const EvalReport& report) {
    std::ostringstream os;
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s\n", "", "Number", "Success", "R_suc");
    os << line;
    auto row = [&](const char* name, const TagStats& s) {
        std::snprintf(line, sizeof(line), "%-10s %8d %8d %8s\n", name, s.count, s.successes, percent(s.r_suc).c_str());
        os << line;
    };
    row("Normal", report.normal);
    row("Confusing", report.confusing);
    row("Total", report.total);
    return os.str();
}

std::string to_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "id,tag,L_v,call,gt_call,margin,bounce_err\n";
    char num[64];
    auto fmt = [&](const std::optional<double>& v) -> std::string {
        if (!v) return "";
        std::snprintf(num, sizeof(num), "%.6f", *v);
        return num;
    };
    for (const SampleRecord& r : report.records) {
        os << r.id << ',' << r.tag << ',' << r.l_v << ',' << (r.call ? std::string(to_string(*r.call)) : "NONE") << ','
           << to_string(r.gt_call) << ',' << fmt(r.margin) << ',' << fmt(r.bounce_err) << '\n';
    }
    return os.str();
}

}  // namespace elc
