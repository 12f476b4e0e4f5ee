// Detector throughput on synthetic frames: elc_bench_detect [width height frames]
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "elc/detector.hpp"
#include "elc/synth.hpp"

int main(int argc, char** argv) {
    using namespace elc;
    const int w = argc > 1 ? std::atoi(argv[1]) : 1280;
    const int h = argc > 2 ? std::atoi(argv[2]) : 720;
    const int n = argc > 3 ? std::atoi(argv[3]) : 240;

    synth::SynthParams p;
    p.width = w;
    p.height = h;
    p.p0 = Point2(0.1 * w, 0.2 * h);
    p.ground_y = 0.8 * h;
    p.ball_radius = 4.0;

    // Pre-render so only detection is timed.
    std::vector<FrameImage> frames;
    frames.reserve(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) {
        const double t = f / p.fps;
        std::optional<Point2> ball = synth::ideal_position(p, std::fmod(t, 0.2));
        FrameImage img = synth::render_frame(p, ball);
        img.set_position(f, t);
        frames.push_back(std::move(img));
    }

    BallDetector det(w, h, DetectorConfig{});
    int hits = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& f : frames) hits += det.process(f).has_value() ? 1 : 0;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%dx%d  frames=%d  hits=%d  %.1f ms/frame  %.1f fps\n", w, h, n, hits, 1000.0 * s / n, n / s);
    return 0;
}
