#include "elc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "elc/error.hpp"
#include "elc/image_io.hpp"
#include "elc/serialize.hpp"

namespace elc::synth {

void SynthParams::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::BadInput, "synth params: " + m); };
    if (!(fps > 0.0)) bad("fps must be positive");
    if (!(g > 0.0)) bad("g must be positive");
    if (!(restitution > 0.0 && restitution <= 1.0)) bad("restitution must be in (0,1]");
    if (!(friction > 0.0 && friction <= 1.0)) bad("friction must be in (0,1]");
    if (n_frames < 1) bad("n_frames must be >= 1");
    if (start_frame < 0) bad("start_frame must be >= 0");
    if (!(noise_sigma >= 0.0)) bad("noise_sigma must be >= 0");
    if (!(dropout_p >= 0.0 && dropout_p <= 1.0)) bad("dropout_p must be in [0,1]");
    if (!(ball_radius > 0.0)) bad("ball_radius must be positive");
    if (width < FrameImage::kMinSide || height < FrameImage::kMinSide) bad("frame too small");
    if (!(p0.y() < ground_y)) bad("ball must start above the ground line");
}

double landing_time(double y0, double vy, double g, double ground_y) {
    return (-vy + std::sqrt(vy * vy + 2.0 * g * (ground_y - y0))) / g;
}

namespace {

struct Kinematics {
    double t_b;
    Point2 bounce;
    Point2 v_after;
};

Kinematics solve(const SynthParams& p) {
    Kinematics k;
    k.t_b = landing_time(p.p0.y(), p.v0.y(), p.g, p.ground_y);
    k.bounce = Point2(p.p0.x() + p.v0.x() * k.t_b, p.ground_y);
    const double vy_hit = p.v0.y() + p.g * k.t_b;
    k.v_after = Point2(p.friction * p.v0.x(), -p.restitution * vy_hit);
    return k;
}

Point2 position_at(const SynthParams& p, const Kinematics& k, double t) {
    if (t <= k.t_b) {
        return Point2(p.p0.x() + p.v0.x() * t, p.p0.y() + p.v0.y() * t + 0.5 * p.g * t * t);
    }
    const double s = t - k.t_b;
    return Point2(k.bounce.x() + k.v_after.x() * s, k.bounce.y() + k.v_after.y() * s + 0.5 * p.g * s * s);
}

}  // namespace

Point2 ideal_position(const SynthParams& params, double t) { return position_at(params, solve(params), t); }

SynthTrajectory generate_trajectory(const SynthParams& p, const CourtLineSpec* court) {
    p.validate();
    const Kinematics k = solve(p);
    const double t_last = (p.n_frames - 1) / p.fps;
    if (!(k.t_b <= t_last)) {
        throw Error(ErrorCode::NeverLands, "ball lands at t=" + std::to_string(k.t_b) + " s, clip ends at " +
                                               std::to_string(t_last) + " s");
    }
    const double t_second = k.t_b + 2.0 * (-k.v_after.y()) / p.g;
    if (t_second <= t_last) {
        throw Error(ErrorCode::SecondBounce, "second contact at t=" + std::to_string(t_second) + " s");
    }

    SynthTrajectory out;
    out.truth.bounce_point = k.bounce;
    out.truth.bounce_time = p.start_frame / p.fps + k.t_b;
    if (court != nullptr) {
        const Verdict v = call_point(k.bounce, *court, 0.0);
        out.truth.true_call = v.call;
        out.truth.true_margin = v.margin;
        out.truth.decisive_line = v.decisive_line;
        out.truth.tag = std::abs(v.margin) <= 3.0 ? "confusing" : "normal";
    }

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int i = 0; i < p.n_frames; ++i) {
        Sample s;
        s.frame_index = p.start_frame + i;
        s.t = i / p.fps;
        s.position = position_at(p, k, s.t);
        out.ideal.push_back(s);

        // Fixed draw order per frame keeps streams aligned across parameter changes.
        const double nx = normal(rng);
        const double ny = normal(rng);
        const double keep = uniform(rng);
        if (keep < p.dropout_p) continue;
        Sample obs = s;
        obs.position += p.noise_sigma * Point2(nx, ny);
        out.observed.push_back(obs);
    }
    return out;
}

FrameImage render_frame(const SynthParams& p, const std::optional<Point2>& ball, Rgb background, Rgb ball_color) {
    FrameImage img(p.width, p.height, background[0], background[1], background[2]);
    if (!ball) return img;
    const double r = p.ball_radius;
    const int x0 = std::max(0, static_cast<int>(std::floor(ball->x() - r - 1.0)));
    const int x1 = std::min(p.width - 1, static_cast<int>(std::ceil(ball->x() + r + 1.0)));
    const int y0 = std::max(0, static_cast<int>(std::floor(ball->y() - r - 1.0)));
    const int y1 = std::min(p.height - 1, static_cast<int>(std::ceil(ball->y() + r + 1.0)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d = (Point2(x, y) - *ball).norm();
            // Linear edge coverage over a one-pixel ramp.
            const double cover = std::clamp(r + 0.5 - d, 0.0, 1.0);
            if (cover <= 0.0) continue;
            std::uint8_t* px = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = background[static_cast<std::size_t>(c)] * (1.0 - cover) +
                                 ball_color[static_cast<std::size_t>(c)] * cover;
                px[c] = static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
    return img;
}

FrameImage render_clip_frame(const SynthParams& params, const SynthTrajectory& traj, int frame_index,
                             Rgb background) {
    std::optional<Point2> ball;
    const auto it = std::lower_bound(traj.observed.begin(), traj.observed.end(), frame_index,
                                     [](const Sample& s, int f) { return s.frame_index < f; });
    if (it != traj.observed.end() && it->frame_index == frame_index) ball = it->position;
    FrameImage img = render_frame(params, ball, background);
    img.set_position(frame_index, frame_index / params.fps);
    return img;
}

GroundTruth render_frames(const SynthParams& params, Rgb background, const std::filesystem::path& out_dir,
                          const CourtLineSpec* court) {
    const SynthTrajectory traj = generate_trajectory(params, court);
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "frames", ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + (out_dir / "frames").string() + ": " + ec.message());
    for (int f = 0; f < clip_length(params); ++f) {
        write_png(out_dir / "frames" / format_frame_name("frame_%06d.png", f),
                  render_clip_frame(params, traj, f, background));
    }
    write_json_file(out_dir / "ground_truth.json", to_json(traj.truth));
    return traj.truth;
}

// ---------------------------------------------------------------------------

CourtLineSpec default_court(int width, int height) {
    const double sx = width / 640.0;
    const double sy = height / 360.0;
    CourtLineSpec court;
    court.lines.push_back({"baseline", Point2(0.0, 250.0 * sy), Point2(640.0 * sx, 230.0 * sy), 4.0, -1});
    court.lines.push_back({"sideline", Point2(520.0 * sx, 60.0 * sy), Point2(600.0 * sx, 360.0 * sy), 3.0, +1});
    court.delta = 0.0;
    return court;
}

namespace {

Point2 unit_inward_normal(const CourtLine& line) {
    const Point2 dir = (line.p1 - line.p0).normalized();
    // Positive raw signed distance lies along (-dir.y, dir.x).
    return line.in_side * Point2(-dir.y(), dir.x());
}

}  // namespace

Scenario make_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    // Separate stream from the observation noise, which uses `seed` directly.
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto draw = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };

    Scenario sc;
    sc.court = default_court(cfg.width, cfg.height);
    const double margin_x = 0.1 * cfg.width;
    const double top = 0.4 * cfg.height;
    const double bottom = cfg.height - 0.08 * cfg.height;

    Point2 bounce;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 10000) throw Error(ErrorCode::BadInput, "scenario: cannot place bounce in frame");
        const std::size_t li = static_cast<std::size_t>(uni(rng) * static_cast<double>(sc.court.lines.size()));
        const CourtLine& line = sc.court.lines[std::min(li, sc.court.lines.size() - 1)];
        double margin;
        if (uni(rng) < cfg.confusing_fraction) {
            margin = draw(-cfg.confusing_margin, cfg.confusing_margin);
        } else {
            margin = draw(cfg.confusing_margin, cfg.normal_margin_max);
            if (margin <= cfg.confusing_margin) continue;
            if (uni(rng) < 0.5) margin = -margin;
        }
        const double s = uni(rng);
        const Point2 on_line = line.p0 + s * (line.p1 - line.p0);
        // Outer edge sits thickness/2 beyond the centerline.
        bounce = on_line + (margin - 0.5 * line.thickness) * unit_inward_normal(line);
        if (bounce.x() < margin_x || bounce.x() > cfg.width - margin_x || bounce.y() < top || bounce.y() > bottom) {
            continue;
        }
        bool clear = true;
        for (const CourtLine& other : sc.court.lines) {
            // The target line must stay decisive, so others sit at least as far inside.
            if (other.name != line.name && signed_distance(bounce, other) < std::max(cfg.clearance, margin)) {
                clear = false;
            }
        }
        if (!clear) continue;
        sc.target_margin = margin;
        sc.target_line = line.name;
        break;
    }

    SynthParams& p = sc.params;
    p.width = cfg.width;
    p.height = cfg.height;
    p.fps = cfg.fps;
    p.g = draw(2000.0, 3000.0);
    p.restitution = draw(0.6, 0.8);
    p.friction = draw(0.7, 0.9);
    const double vx = draw(300.0, 700.0) * (uni(rng) < 0.5 ? -1.0 : 1.0);
    const double vy_hit = draw(900.0, 1500.0);
    const double t_b = (cfg.frames_before + uni(rng)) / cfg.fps;
    p.v0 = Point2(vx, vy_hit - p.g * t_b);
    p.p0 = Point2(bounce.x() - vx * t_b, bounce.y() - (vy_hit * t_b - 0.5 * p.g * t_b * t_b));
    p.ground_y = bounce.y();
    p.n_frames = cfg.frames_before + 1 + cfg.frames_after;
    p.start_frame = cfg.lead_in;
    p.noise_sigma = cfg.noise_sigma;
    p.dropout_p = cfg.dropout_p;
    p.ball_radius = cfg.ball_radius;
    p.seed = seed;
    return sc;
}

}  // namespace elc::synth
