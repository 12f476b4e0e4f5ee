#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "elc/error.hpp"
#include "elc/cli.hpp"
#include "elc/image_io.hpp"
#include "elc/overlay.hpp"
#include "elc/pipeline.hpp"
#include "test_util.hpp"

using namespace elc;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "elc");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

synth::Scenario noiseless_scenario(std::uint64_t seed) {
    synth::Scenario sc = synth::make_scenario(synth::ScenarioConfig{}, seed);
    sc.params.noise_sigma = 0.0;
    sc.params.dropout_p = 0.0;
    return sc;
}

FrameProvider clip_provider(const synth::SynthParams& p, const synth::SynthTrajectory& traj,
                            synth::Rgb ball = synth::kOpticYellow) {
    auto f = std::make_shared<int>(0);
    return [&p, &traj, f, ball]() -> std::optional<FrameImage> {
        if (*f >= synth::clip_length(p)) return std::nullopt;
        const int i = (*f)++;
        std::optional<Point2> pos;
        for (const auto& s : traj.observed)
            if (s.frame_index == i) pos = s.position;
        FrameImage img = synth::render_frame(p, pos, synth::kCourtGreen, ball);
        img.set_position(i, i / p.fps);
        return img;
    };
}

bool is(const FrameImage& img, int x, int y, synth::Rgb c) {
    const std::uint8_t* px = img.at(x, y);
    return px[0] == c[0] && px[1] == c[1] && px[2] == c[2];
}

}  // namespace

TEST_CASE("end-to-end on noiseless rendered rallies") {
    const PipelineConfig cfg;
    for (std::uint64_t seed : {0U, 1U, 2U, 3U, 4U}) {
        const synth::Scenario sc = noiseless_scenario(seed);
        const auto traj = synth::generate_trajectory(sc.params, &sc.court);
        const RunResult r = run_pipeline(clip_provider(sc.params, traj), sc.court, cfg);
        CHECK(r.verdict.call == traj.truth.true_call.value());
        CHECK((r.prediction.point - traj.truth.bounce_point).norm() <= 1.5);
        CHECK(r.frames == synth::clip_length(sc.params));
    }
}

TEST_CASE("no ball-coloured blob means no track") {
    const synth::Scenario sc = noiseless_scenario(1);
    const auto traj = synth::generate_trajectory(sc.params, &sc.court);
    CHECK_THROWS_WITH_AS((void)run_pipeline(clip_provider(sc.params, traj, {30, 40, 220}), sc.court, PipelineConfig{}),
                         doctest::Contains("no track"), Error);
}

TEST_CASE("detect then analyze equals run") {
    const synth::Scenario sc = synth::make_scenario(synth::ScenarioConfig{}, 6);
    const auto traj = synth::generate_trajectory(sc.params, &sc.court);
    const PipelineConfig cfg;
    const RunResult full = run_pipeline(clip_provider(sc.params, traj), sc.court, cfg);
    const DetectionLog log = detect(clip_provider(sc.params, traj), cfg);
    const RunResult split = analyze(detection_log_from_json(json::parse(dump(to_json(log)))), sc.court, cfg);
    CHECK(dump(to_json(split)) == dump(to_json(full)));
}

TEST_CASE("overlay contract") {
    const synth::Scenario sc = noiseless_scenario(2);
    const auto traj = synth::generate_trajectory(sc.params, &sc.court);
    const RunResult r = run_pipeline(clip_provider(sc.params, traj), sc.court, PipelineConfig{});
    const FrameImage bg(sc.params.width, sc.params.height, 40, 110, 60);
    const FrameImage ov = render_overlay(bg, r.window, r.prediction, r.verdict);
    CHECK(ov.width() == bg.width());
    CHECK(ov.height() == bg.height());
    for (const auto& d : r.window.points) {
        CHECK(is(ov, static_cast<int>(std::lround(d.centroid.x())), static_cast<int>(std::lround(d.centroid.y())),
                 kOverlayYellow));
    }
    // Cross arms are symmetric about the marker center.
    const int bx = static_cast<int>(std::lround(r.prediction.point.x()));
    const int by = static_cast<int>(std::lround(r.prediction.point.y()));
    CHECK(std::abs(bx - r.prediction.point.x()) <= 0.5);
    CHECK(std::abs(by - r.prediction.point.y()) <= 0.5);
    CHECK(is(ov, bx + 5, by, kOverlayBlue));
    CHECK(is(ov, bx - 5, by, kOverlayBlue));
    CHECK(is(ov, bx, by + 5, kOverlayBlue));
    CHECK(is(ov, bx, by - 5, kOverlayBlue));
    int red = 0;
    for (int y = 0; y < ov.height(); ++y)
        for (int x = 0; x < ov.width(); ++x) red += is(ov, x, y, kOverlayRed) ? 1 : 0;
    CHECK(red > 20);
    CHECK((is(ov, 1, 1, {0, 0, 0}) || is(ov, 1, 1, {255, 255, 255})));  // label box
}

TEST_CASE("cli usage errors") {
    const CliRun none = cli({});
    CHECK(none.code == kExitBadInput);
    const CliRun run = cli({"run", "--frames", "."});
    CHECK(run.code == kExitBadInput);
    CHECK(run.err.find("--court") != std::string::npos);
    CHECK(run.err.find("Usage") != std::string::npos);
    CHECK(cli({"frobnicate"}).code == kExitBadInput);
    CHECK(cli({"analyze", "--court", "c.json"}).code == kExitBadInput);
    CHECK(cli({"--help"}).code == kExitOk);
    CHECK(cli({"analyze", "--detections", "nope.json", "--court", "nope.json"}).code == kExitBadInput);
}

TEST_CASE("cli init-court") {
    TempDir dir("court");
    const CliRun r = cli({"init-court", "--line", "baseline:0,250,640,230:4:-1", "--line", "sideline:520,60,600,360:3",
                          "--delta", "0.5", "--out", (dir / "court.json").string()});
    REQUIRE(r.code == kExitOk);
    const CourtLineSpec c = load_court(dir / "court.json");
    REQUIRE(c.lines.size() == 2);
    CHECK(c.lines[0].in_side == -1);
    CHECK(c.lines[1].thickness == 3.0);
    CHECK(c.lines[1].in_side == 1);
    CHECK(c.delta == 0.5);
    CHECK(cli({"init-court", "--line", "bad:1,2,3"}).code == kExitBadInput);
    CHECK(cli({"init-court", "--line", "dup:1,1,1,1"}).code == kExitBadInput);
    CHECK(cli({"init-court"}).code == kExitBadInput);
}

TEST_CASE("cli synth, eval and analyze") {
    TempDir dir("cli");
    const auto fx = dir / "fixture";
    REQUIRE(cli({"synth", "--out", fx.string(), "--count", "3", "--seed", "0"}).code == kExitOk);
    REQUIRE(std::filesystem::exists(fx / "manifest.json"));
    REQUIRE(std::filesystem::is_directory(fx / "sample_0000" / "frames"));

    const CliRun ev = cli({"eval", "--manifest", (fx / "manifest.json").string(), "--out", (dir / "r1.json").string(),
                           "--csv", (dir / "r1.csv").string()});
    REQUIRE(ev.code == kExitOk);
    const json report = read_json_file(dir / "r1.json");
    CHECK(report["summary"]["total"]["r_suc"] == 1.0);
    CHECK(report["summary"]["total"]["number"] == 3);
    CHECK(ev.out.find("Total") != std::string::npos);

    REQUIRE(cli({"eval", "--manifest", (fx / "manifest.json").string(), "--out", (dir / "r2.json").string(),
                 "--threads", "3"})
                .code == kExitOk);
    CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));

    const std::string frames = (fx / "sample_0000" / "frames").string();
    const std::string court = (fx / "sample_0000" / "court.json").string();
    REQUIRE(cli({"detect", "--frames", frames, "--out", (dir / "d.json").string()}).code == kExitOk);
    const CliRun a1 = cli({"analyze", "--detections", (dir / "d.json").string(), "--court", court});
    const CliRun a2 = cli({"analyze", "--detections", (dir / "d.json").string(), "--court", court});
    REQUIRE(a1.code == kExitOk);
    CHECK(a1.out == a2.out);
    const CliRun run = cli({"run", "--frames", frames, "--court", court, "--overlay", (dir / "ov.png").string()});
    REQUIRE(run.code == kExitOk);
    CHECK(json::parse(run.out)["prediction"] == json::parse(a1.out)["prediction"]);
    CHECK(json::parse(run.out)["verdict"] == json::parse(a1.out)["verdict"]);
    CHECK_FALSE(json::parse(run.out).contains("timings_ms"));
    const FrameImage ov = read_image(dir / "ov.png");
    CHECK(ov.width() == 640);

    const CliRun timed = cli({"run", "--frames", frames, "--court", court, "--timings"});
    CHECK(json::parse(timed.out)["timings_ms"]["detect"].get<double>() > 0.0);

    const CliRun over = cli({"analyze", "--detections", (dir / "d.json").string(), "--court", court, "--overlay",
                             (dir / "ov2.png").string(), "--frame", (fx / "sample_0000" / "frames" / "frame_000050.png").string()});
    CHECK(over.code == kExitOk);
    CHECK(std::filesystem::exists(dir / "ov2.png"));

    // A config typo is bad input; an unanalysable track is an analysis failure.
    CHECK(cli({"analyze", "--detections", (dir / "d.json").string(), "--court", court, "--set", "bounce.tauv=1"}).code ==
          kExitBadInput);
    json d = read_json_file(dir / "d.json");
    json flat = json::array();
    for (int i = 0; i < 20; ++i) flat.push_back({{"frame_index", i}, {"x", 10.0 + i}, {"y", 100.0 + 3 * i}, {"area", 20}, {"score", 1}});
    d["frames"] = flat;
    write_json_file(dir / "mono.json", d);
    CHECK(cli({"analyze", "--detections", (dir / "mono.json").string(), "--court", court}).code == kExitAnalysisFailed);
}

TEST_CASE("cli synth from explicit params and ELC_SEED") {
    TempDir dir("params");
    synth::SynthParams p;
    p.width = 320;
    p.height = 240;
    p.p0 = Point2(40, 40);
    p.v0 = Point2(600, 400);
    p.ground_y = 200;
    p.n_frames = 60;
    p.start_frame = 30;
    p.noise_sigma = 1.0;
    write_json_file(dir / "p.json", to_json(p));
    write_json_file(dir / "court.json", to_json(synth::default_court(320, 240)));
    REQUIRE(cli({"synth", "--params", (dir / "p.json").string(), "--court", (dir / "court.json").string(), "--out",
                 (dir / "one").string(), "--detections-only"})
                .code == kExitOk);
    const json m = read_json_file(dir / "one" / "manifest.json");
    REQUIRE(m["samples"].size() == 1);
    CHECK(std::filesystem::exists(dir / "one" / "detections.json"));
    CHECK(cli({"eval", "--manifest", (dir / "one" / "manifest.json").string()}).code == kExitOk);

    ::setenv("ELC_SEED", "77", 1);
    REQUIRE(cli({"synth", "--out", (dir / "a").string(), "--count", "1", "--detections-only"}).code == kExitOk);
    ::unsetenv("ELC_SEED");
    REQUIRE(cli({"synth", "--out", (dir / "b").string(), "--count", "1", "--seed", "77", "--detections-only"}).code ==
            kExitOk);
    CHECK(slurp(dir / "a" / "sample_0000" / "detections.json") == slurp(dir / "b" / "sample_0000" / "detections.json"));
    ::setenv("ELC_SEED", "x1", 1);
    CHECK(cli({"synth", "--out", (dir / "c").string(), "--count", "1"}).code == kExitBadInput);
    ::unsetenv("ELC_SEED");
}

TEST_CASE("installed binary exit codes") {
    const std::string bin = ELC_CLI_PATH;
    CHECK(WEXITSTATUS(std::system((bin + " run --frames . > /dev/null 2>&1").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((bin + " --help > /dev/null 2>&1").c_str())) == 0);
}
