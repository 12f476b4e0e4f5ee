#include <doctest.h>

#include <fstream>
#include <map>
#include <random>

#include "elc/error.hpp"
#include "elc/image_io.hpp"
#include "elc/imaging.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace elc;

namespace {

BinaryMask random_mask(std::mt19937& rng, int w, int h, double p) {
    std::bernoulli_distribution on(p);
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, on(rng));
    return m;
}

std::vector<std::uint8_t> to_vec(const BinaryMask& m) { return {m.bits().begin(), m.bits().end()}; }

}  // namespace

TEST_CASE("FrameImage validates its buffer") {
    CHECK_THROWS_AS(FrameImage(15, 20, std::vector<std::uint8_t>(15 * 20 * 3)), Error);
    CHECK_THROWS_AS(FrameImage(20, 20, std::vector<std::uint8_t>(20 * 20 * 3 - 1)), Error);
    const FrameImage f(16, 16, 1, 2, 3);
    CHECK(f.at(15, 15)[2] == 3);
}

TEST_CASE("rgb_to_hsv known colours") {
    Hsv y = rgb_to_hsv(255, 255, 0);
    CHECK(y.h == doctest::Approx(60.0));
    CHECK(y.s == doctest::Approx(1.0));
    CHECK(y.v == doctest::Approx(1.0));
    Hsv k = rgb_to_hsv(0, 0, 0);
    CHECK(k.h == 0.0);
    CHECK(k.s == 0.0);
    CHECK(k.v == 0.0);
    Hsv g = rgb_to_hsv(128, 128, 128);
    CHECK(g.h == 0.0);
    CHECK(g.s == 0.0);
    CHECK(g.v == doctest::Approx(128.0 / 255.0));
    CHECK(rgb_to_hsv(0, 0, 255).h == doctest::Approx(240.0));
    CHECK(rgb_to_hsv(255, 0, 1).h < 360.0);
}

TEST_CASE("rgb_to_hsv round-trips through a reference inverse") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> c(0, 255);
    int checked = 0;
    for (int i = 0; i < 20000; ++i) {
        const int r = c(rng), g = c(rng), b = c(rng);
        const Hsv hsv = rgb_to_hsv(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                   static_cast<std::uint8_t>(b));
        REQUIRE(hsv.h >= 0.0);
        REQUIRE(hsv.h < 360.0);
        if (hsv.s <= 0.0) continue;
        const auto back = oracle::hsv_to_rgb(hsv.h, hsv.s, hsv.v);
        CHECK(std::abs(back[0] - r) <= 1.0);
        CHECK(std::abs(back[1] - g) <= 1.0);
        CHECK(std::abs(back[2] - b) <= 1.0);
        ++checked;
    }
    CHECK(checked > 19000);
}

TEST_CASE("morph_open_dilate examples") {
    std::mt19937 rng(1);
    const BinaryMask any = random_mask(rng, 40, 30, 0.3);
    CHECK(morph_open_dilate(any, 0) == any);

    BinaryMask single(20, 20);
    single.set(10, 10);
    CHECK(morph_open_dilate(single, 1).count() == 0);

    BinaryMask square(30, 30);
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x) square.set(x, y);
    const BinaryMask out = morph_open_dilate(square, 1);
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x) CHECK(out.get(x, y));
    CHECK(out.count() == 12 * 12);

    CHECK_THROWS_AS((void)morph_open_dilate(square, -1), Error);
}

TEST_CASE("morph_open_dilate matches direct-definition morphology") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const int w = 17 + trial % 7;
        const int h = 16 + trial % 5;
        const int r = 1 + trial % 3;
        const BinaryMask m = random_mask(rng, w, h, trial % 2 ? 0.6 : 0.3);
        auto v = oracle::square_morph(to_vec(m), w, h, r, true);
        v = oracle::square_morph(v, w, h, r, false);
        v = oracle::square_morph(v, w, h, r, false);
        CHECK(to_vec(morph_open_dilate(m, r)) == v);
    }
}

TEST_CASE("morph_open_dilate keeps only components that survive erosion") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 1 + trial % 2;
        const BinaryMask out = morph_open_dilate(random_mask(rng, 48, 40, 0.45), r);
        const ComponentLabels comps = label_components(out);
        const auto eroded = oracle::square_morph(to_vec(out), 48, 40, r, true);
        for (std::size_t b = 0; b < comps.blobs.size(); ++b) {
            bool survives = false;
            for (std::size_t i = 0; i < eroded.size(); ++i)
                if (eroded[i] && comps.labels[i] == static_cast<int>(b)) survives = true;
            CHECK(survives);
        }
    }
}

TEST_CASE("connected_components examples") {
    CHECK(connected_components(BinaryMask(20, 20)).empty());

    BinaryMask sq(20, 20);
    for (int y = 10; y < 13; ++y)
        for (int x = 10; x < 13; ++x) sq.set(x, y);
    auto blobs = connected_components(sq);
    REQUIRE(blobs.size() == 1);
    CHECK(blobs[0].area == 9);
    CHECK(blobs[0].centroid.x() == doctest::Approx(11.0));
    CHECK(blobs[0].centroid.y() == doctest::Approx(11.0));

    BinaryMask diag(20, 20);
    diag.set(4, 4);
    diag.set(5, 5);
    CHECK(connected_components(diag).size() == 1);
}

TEST_CASE("connected_components agrees with union-find and conserves area") {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 16 + trial, h = 16 + trial / 2;
        const BinaryMask m = random_mask(rng, w, h, 0.1 + 0.02 * (trial % 20));
        const ComponentLabels comps = label_components(m);
        const auto ref = oracle::union_find_labels(to_vec(m), w, h);

        std::size_t total = 0;
        for (const Blob& b : comps.blobs) {
            total += static_cast<std::size_t>(b.area);
            CHECK(b.area >= 1);
            CHECK(b.centroid.x() >= b.bbox.min_x);
            CHECK(b.centroid.x() <= b.bbox.max_x);
            CHECK(b.centroid.y() >= b.bbox.min_y);
            CHECK(b.centroid.y() <= b.bbox.max_y);
            CHECK(b.bbox.min_x >= 0);
            CHECK(b.bbox.max_x < w);
        }
        CHECK(total == m.count());
        // Same partition: labels correspond one-to-one.
        std::map<int, int> fwd, back;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (ref[i] < 0) {
                CHECK(comps.labels[i] == -1);
                continue;
            }
            auto [it, fresh] = fwd.emplace(comps.labels[i], ref[i]);
            CHECK(it->second == ref[i]);
            auto [it2, fresh2] = back.emplace(ref[i], comps.labels[i]);
            CHECK(it2->second == comps.labels[i]);
        }
    }
}

TEST_CASE("connected_components is translation equivariant") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = random_mask(rng, 30, 30, 0.25);
        const int dx = trial % 9, dy = trial % 7;
        BinaryMask shifted(30 + dx, 30 + dy);
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 30; ++x) shifted.set(x + dx, y + dy, m.get(x, y));
        const auto a = connected_components(m);
        const auto b = connected_components(shifted);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(b[i].area == a[i].area);
            CHECK(b[i].centroid.x() - a[i].centroid.x() == doctest::Approx(dx).epsilon(1e-12));
            CHECK(b[i].centroid.y() - a[i].centroid.y() == doctest::Approx(dy).epsilon(1e-12));
        }
    }
}

TEST_CASE("frame sequences on disk") {
    TempDir dir("frames");
    SUBCASE("missing directory") {
        CHECK_THROWS_WITH_AS((void)list_frames(dir / "nope"), doctest::Contains("MissingDirectory"), Error);
    }
    SUBCASE("empty directory") {
        CHECK_THROWS_WITH_AS((void)load_frame_sequence(dir.path(), "frame_%06d.png", 240.0),
                             doctest::Contains("MissingFrames"), Error);
    }
    SUBCASE("timestamps from fps") {
        for (int i = 0; i < 3; ++i)
            write_png(dir / format_frame_name("frame_%06d.png", i), FrameImage(16, 16, 9, 9, 9));
        const FrameSequence seq = load_frame_sequence(dir.path(), "frame_%06d.png", 240.0);
        REQUIRE(seq.frames.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(seq.frames[i].frame_index() == i);
            CHECK(seq.frames[i].timestamp() == doctest::Approx(i / 240.0));
        }
        CHECK(seq.gaps.empty());
    }
    SUBCASE("gap recorded") {
        for (int i : {0, 1, 5, 6})
            write_png(dir / format_frame_name("frame_%06d.png", i), FrameImage(16, 16, 9, 9, 9));
        const FrameSequence seq = load_frame_sequence(dir.path(), "frame_%06d.png", 240.0);
        CHECK(seq.frames.size() == 4);
        REQUIRE(seq.gaps.size() == 1);
        CHECK(seq.gaps[0] == std::make_pair(2, 4));
        CHECK(seq.frames[2].frame_index() == 5);
    }
    SUBCASE("mixed dimensions") {
        write_png(dir / "frame_000000.png", FrameImage(16, 16, 9, 9, 9));
        write_png(dir / "frame_000001.png", FrameImage(20, 16, 9, 9, 9));
        CHECK_THROWS_WITH_AS((void)load_frame_sequence(dir.path(), "frame_%06d.png", 240.0),
                             doctest::Contains("MixedDimensions"), Error);
    }
    SUBCASE("undecodable frame names the file") {
        std::ofstream(dir / "frame_000000.png") << "not an image";
        CHECK_THROWS_WITH_AS((void)load_frame_sequence(dir.path(), "frame_%06d.png", 240.0),
                             doctest::Contains("frame_000000.png"), Error);
    }
    SUBCASE("ppm fallback and png round trip") {
        std::vector<std::uint8_t> px(16 * 17 * 3);
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(i * 31);
        const FrameImage img(16, 17, px);
        write_ppm(dir / "a.ppm", img);
        write_png(dir / "a.png", img);
        const FrameImage p = read_image(dir / "a.ppm");
        const FrameImage q = read_image(dir / "a.png");
        CHECK(std::equal(p.pixels().begin(), p.pixels().end(), px.begin()));
        CHECK(std::equal(q.pixels().begin(), q.pixels().end(), px.begin()));
    }
}
