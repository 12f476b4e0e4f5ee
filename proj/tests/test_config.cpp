#include <doctest.h>

#include "elc/error.hpp"
#include "elc/config.hpp"
#include "elc/serialize.hpp"
#include "test_util.hpp"

using namespace elc;

TEST_CASE("config defaults round-trip") {
    const PipelineConfig def;
    CHECK(def.fps == 240.0);
    const json j = to_json(def);
    CHECK(to_json(config_from_json(j)) == j);
    CHECK(to_json(config_from_json(json::object())) == j);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS((void)config_from_json(json::parse(R"({"fsp": 240})")), doctest::Contains("fsp"), Error);
    CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"bounce": {"tauv": 2}})")), Error);
    CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"detector": {"background": {"k": 3}}})")), Error);
    CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"bounce": {"mode": "greedy"}})")), Error);
    CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"tracker": {"max_gap": "five"}})")), Error);
}

TEST_CASE("invalid values become BadInput") {
    try {
        (void)config_from_json(json::parse(R"({"detector": {"hue_range": [90, 30]}})"));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadInput);
    }
    CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"eval": {"epsilon": 0}})")), Error);
    CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"fps": -1})")), Error);
}

TEST_CASE("overrides") {
    json doc = to_json(PipelineConfig{});
    apply_override(doc, "bounce.tau_v=2.5");
    apply_override(doc, "bounce.mode=monotone_split");
    apply_override(doc, "detector.hue_range=[20,100]");
    const PipelineConfig c = config_from_json(doc);
    CHECK(c.bounce.tau_v == 2.5);
    CHECK(c.bounce.mode == SearchMode::MonotoneSplit);
    CHECK(c.detector.hue_hi == 100.0);
    CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), Error);

    TempDir dir("config");
    write_json_file(dir / "cfg.json", json::parse(R"({"tracker": {"max_gap": 3}, "court": "court.json"})"));
    const PipelineConfig loaded = load_config(dir / "cfg.json", {"tracker.min_track_len=12", "eval.mode=distance"});
    CHECK(loaded.tracker.max_gap == 3);
    CHECK(loaded.tracker.min_track_len == 12);
    CHECK(loaded.eval.mode == EvalMode::Distance);
    REQUIRE(loaded.court.has_value());
    CHECK(*loaded.court == dir / "court.json");
    CHECK_THROWS_AS((void)load_config(dir / "absent.json"), Error);
    CHECK_THROWS_AS((void)load_config(std::nullopt, {"tracker.bogus=1"}), Error);
}

TEST_CASE("court and detection documents") {
    const json court_doc = json::parse(
        R"({"lines":[{"name":"baseline","p0":[0,250],"p1":[640,230],"thickness":4,"in_side":-1}],"delta":0.5})");
    const CourtLineSpec court = court_from_json(court_doc);
    CHECK(court.lines[0].in_side == -1);
    CHECK(court.delta == 0.5);
    CHECK(to_json(court) == court_doc);
    CHECK_THROWS_AS((void)court_from_json(json::parse(R"({"lines":[]})")), Error);
    CHECK_THROWS_AS((void)court_from_json(json::parse(
                        R"({"lines":[{"name":"x","p0":[1,1],"p1":[1,1],"thickness":0,"in_side":1}]})")),
                    Error);
    CHECK_THROWS_AS((void)court_from_json(json::parse(
                        R"({"lines":[{"name":"x","p0":[0,1],"p1":[1,1],"thickness":0,"in_side":2}]})")),
                    Error);

    DetectionLog log;
    log.width = 640;
    log.height = 360;
    log.frames.push_back({0, std::nullopt});
    log.frames.push_back({1, BallDetection{1, Point2(10.25, 20.5), 30.0, 0.75}});
    const json lj = to_json(log);
    const DetectionLog back = detection_log_from_json(lj);
    CHECK(to_json(back) == lj);
    REQUIRE(back.hits().size() == 1);
    CHECK(back.hits()[0] == log.frames[1].detection.value());

    Trajectory t;
    t.points = {{3, Point2(1, 2), 9, 1}, {4, Point2(2, 3), 9, 1}};
    const DetectionLog from_traj = detection_log_from_json(to_json(t));
    CHECK(from_traj.hits().size() == 2);
    CHECK(trajectory_from_json(to_json(t)).points == t.points);
}

TEST_CASE("prediction record") {
    BouncePrediction p;
    p.point = Point2(1.5, 2.5);
    p.assignment = {0b101, 3};
    const json j = to_json(p);
    for (const char* key : {"x", "y", "u_star", "combined_mse", "confident", "assignment_bits", "mode"})
        CHECK(j.contains(key));
    CHECK(j["assignment_bits"] == "101");
    CHECK(j["mode"] == "t");
}
