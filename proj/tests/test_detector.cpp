#include <doctest.h>

#include <random>

#include "elc/error.hpp"
#include "elc/detector.hpp"
#include "elc/synth.hpp"

using namespace elc;

namespace {

void paint_rect(FrameImage& f, int x0, int y0, int w, int h, synth::Rgb c) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) {
            std::uint8_t* p = f.at(x, y);
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
        }
}

BinaryMask rect_mask(int W, int H, int x0, int y0, int w, int h) {
    BinaryMask m(W, H);
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) m.set(x, y);
    return m;
}

Blob blob_at(double x, double y, int area) {
    Blob b;
    b.area = area;
    b.centroid = Point2(x, y);
    b.bbox = {static_cast<int>(x) - 1, static_cast<int>(y) - 1, static_cast<int>(x) + 1, static_cast<int>(y) + 1};
    return b;
}

}  // namespace

TEST_CASE("config validation") {
    DetectorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.hue_lo = 100;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.area_min_frac = cfg.area_max_frac;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.warmup_frames = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("constant scene is background after warmup") {
    BackgroundModel model(64, 48);
    const FrameImage gray(64, 48, 120, 120, 120);
    for (int i = 0; i < 30; ++i) (void)model.update(gray);
    for (int i = 0; i < 10; ++i) CHECK(bg_update_and_classify(model, gray).count() == 0);
}

TEST_CASE("a new colour patch is exactly foreground") {
    BackgroundModel model(64, 48);
    FrameImage frame(64, 48, 120, 120, 120);
    for (int i = 0; i < 30; ++i) (void)model.update(frame);
    paint_rect(frame, 20, 10, 5, 5, {255, 255, 0});
    CHECK(model.update(frame) == rect_mask(64, 48, 20, 10, 5, 5));
}

TEST_CASE("single-mode recursive mean update") {
    MogParams p;
    p.max_modes = 1;
    p.alpha = 0.1;
    p.match_sigma = 10.0;  // wide enough that 140 still matches the 100 mode
    BackgroundModel model(16, 16, p);
    for (int v : {100, 100, 100}) (void)model.update(FrameImage(16, 16, v, v, v));
    CHECK(model.mode(3, 3, 0).mean[0] == doctest::Approx(100.0));
    (void)model.update(FrameImage(16, 16, 140, 140, 140));
    REQUIRE(model.mode_count(3, 3) == 1);
    CHECK(model.mode(3, 3, 0).mean[0] == doctest::Approx(0.9 * 100 + 0.1 * 140).epsilon(1e-6));
}

TEST_CASE("mixture invariants on random video") {
    MogParams p;
    p.max_modes = 3;
    p.alpha = 0.05;
    BackgroundModel model(20, 16, p);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> c(0, 255);
    std::normal_distribution<double> noise(0.0, 4.0);
    std::vector<std::uint8_t> base(20 * 16 * 3);
    for (auto& v : base) v = static_cast<std::uint8_t>(c(rng));
    for (int f = 0; f < 200; ++f) {
        std::vector<std::uint8_t> px = base;
        for (auto& v : px) {
            const double jitter = f % 17 == 0 ? c(rng) : v + noise(rng);
            v = static_cast<std::uint8_t>(std::clamp(jitter, 0.0, 255.0));
        }
        (void)model.update(FrameImage(20, 16, px));
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 20; ++x) {
                const int n = model.mode_count(x, y);
                REQUIRE(n >= 1);
                REQUIRE(n <= p.max_modes);
                double sum = 0.0;
                for (int i = 0; i < n; ++i) {
                    const MogMode& m = model.mode(x, y, i);
                    sum += m.weight;
                    REQUIRE(m.var >= p.var_min - 1e-6);
                    if (i > 0) {
                        const MogMode& prev = model.mode(x, y, i - 1);
                        REQUIRE(prev.weight / std::sqrt(prev.var) >= m.weight / std::sqrt(m.var) - 1e-6);
                    }
                }
                REQUIRE(std::abs(sum - 1.0) <= 1e-6);
            }
        }
    }
}

TEST_CASE("dimension mismatch") {
    BackgroundModel model(32, 32);
    CHECK_THROWS_WITH_AS((void)model.update(FrameImage(32, 33, 0, 0, 0)), doctest::Contains("DimensionMismatch"),
                         Error);
    BallDetector det(32, 32, DetectorConfig{});
    CHECK_THROWS_AS((void)det.process(FrameImage(16, 16, 0, 0, 0)), Error);
}

TEST_CASE("color_area_filter gates") {
    DetectorConfig cfg;
    const int W = 320, H = 240;  // area range [0.384, 38.4] px
    FrameImage frame(W, H, 40, 110, 60);
    // A 3x3 patch opens to itself and dilates to 5x5 = 25 px.
    SUBCASE("yellow-green blob kept") {
        paint_rect(frame, 100, 100, 3, 3, synth::kOpticYellow);
        const auto kept = color_area_filter(frame, rect_mask(W, H, 100, 100, 3, 3), cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].centroid.x() == doctest::Approx(101.0));
    }
    SUBCASE("blue blob rejected") {
        paint_rect(frame, 100, 100, 5, 5, {20, 40, 230});
        CHECK(color_area_filter(frame, rect_mask(W, H, 100, 100, 3, 3), cfg).empty());
    }
    SUBCASE("large blob rejected") {
        paint_rect(frame, 100, 100, 3, 3, synth::kOpticYellow);
        paint_rect(frame, 200, 50, 30, 60, synth::kOpticYellow);
        BinaryMask m = rect_mask(W, H, 100, 100, 3, 3);
        for (int y = 50; y < 110; ++y)
            for (int x = 200; x < 230; ++x) m.set(x, y);
        const auto kept = color_area_filter(frame, m, cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].centroid.y() == doctest::Approx(101.0));
    }
    CHECK_THROWS_AS((void)color_area_filter(frame, BinaryMask(W, H + 1), cfg), Error);
}

TEST_CASE("select_ball") {
    DetectorConfig cfg;
    CHECK_FALSE(select_ball({}, Point2(0, 0), cfg, 0, 640, 360).has_value());

    cfg.gate_radius = 20.0;
    const std::vector<Blob> two = {blob_at(130, 100, 9), blob_at(104, 100, 9)};
    const auto near = select_ball(two, Point2(100, 100), cfg, 3, 640, 360);
    REQUIRE(near);
    CHECK(near->centroid.x() == 104.0);
    CHECK(near->score == doctest::Approx(1.0 - 4.0 / 20.0));
    CHECK(near->frame_index == 3);
    // Exhaustive check against the distance ranking.
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> pos(0, 200);
    for (int t = 0; t < 200; ++t) {
        std::vector<Blob> blobs;
        for (int i = 0; i < 6; ++i) blobs.push_back(blob_at(pos(rng), pos(rng), 9));
        const Point2 pred(pos(rng), pos(rng));
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < blobs.size(); ++i) {
            const double d = (blobs[i].centroid - pred).norm();
            if (d <= cfg.gate_radius && (!best || d < (blobs[*best].centroid - pred).norm())) best = i;
        }
        const auto got = select_ball(blobs, pred, cfg, 0, 640, 360);
        REQUIRE(got.has_value() == best.has_value());
        if (best) CHECK(got->centroid == blobs[*best].centroid);
    }

    const auto solo = select_ball({blob_at(50, 60, 12)}, std::nullopt, cfg, 0, 640, 360);
    REQUIRE(solo);
    CHECK(solo->score == 0.5);
    CHECK(solo->area == 12.0);
}

TEST_CASE("two stages are both needed") {
    const int W = 320, H = 240;
    BallDetector det(W, H, DetectorConfig{});
    const FrameImage bg(W, H, 40, 110, 60);
    for (int i = 0; i < 30; ++i) CHECK_FALSE(det.process(bg).has_value());

    FrameImage frame = bg;
    paint_rect(frame, 60, 60, 4, 4, synth::kOpticYellow);     // ball
    paint_rect(frame, 200, 80, 40, 90, {200, 60, 50});        // player
    frame.set_position(30, 30 / 240.0);
    const auto hit = det.process(frame);
    const auto stage_one = connected_components(det.last_mask());
    CHECK(stage_one.size() == 2);
    const auto stage_two = color_area_filter(frame, det.last_mask(), DetectorConfig{});
    CHECK(stage_two.size() == 1);
    REQUIRE(hit);
    CHECK(hit->centroid.x() == doctest::Approx(61.5));
}

TEST_CASE("detector is deterministic") {
    synth::SynthParams p;
    p.width = 320;
    p.height = 240;
    p.p0 = Point2(40, 40);
    p.v0 = Point2(600, 400);
    p.ground_y = 200;
    p.start_frame = 30;
    p.n_frames = 70;
    p.noise_sigma = 0.5;
    p.ball_radius = 2.0;
    const auto traj = synth::generate_trajectory(p);
    auto run = [&] {
        BallDetector det(p.width, p.height, DetectorConfig{});
        std::vector<std::optional<BallDetection>> out;
        for (int f = 0; f < synth::clip_length(p); ++f) out.push_back(det.process(synth::render_clip_frame(p, traj, f)));
        return out;
    };
    const auto a = run();
    CHECK(a == run());
    CHECK(std::count_if(a.begin(), a.end(), [](const auto& d) { return d.has_value(); }) > 30);
}
