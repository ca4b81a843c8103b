#include "mpntrack/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpntrack/encoders.hpp"
#include "mpntrack/rng.hpp"

namespace mpntrack {

namespace {

}  // namespace

AppearanceProvider synthetic_appearance_provider(SyntheticConfig const & config) {
    return AppearanceProvider::synthetic(config.appearance_dim, config.appearance_sigma,
                                         config.seed ^ 0xFACEull);
}

namespace {

int poisson_draw(Rng & rng, double lambda) {
    if (lambda <= 0.0) return 0;
    double const limit = std::exp(-lambda);
    double product = 1.0;
    int count = -1;
    do {
        product *= rng.uniform();
        ++count;
    } while (product > limit);
    return count;
}

}  // namespace

SyntheticData generate_synthetic(SyntheticConfig const & config) {
    if (config.n_tracks < 1 || config.n_frames < 1)
        throw std::invalid_argument("generate_synthetic: need at least one track and one frame");

    SyntheticData data;
    data.native_fps = config.native_fps;
    Rng motion = Rng::substream(config.seed, 1);
    Rng sensor = Rng::substream(config.seed, 2);
    Rng fp_rng = Rng::substream(config.seed, 3);

    struct TrackState {
        double x, y, vx, vy, w, h;
    };
    std::vector<TrackState> tracks(static_cast<std::size_t>(config.n_tracks));
    data.ground_truth.resize(tracks.size());
    for (std::size_t t = 0; t < tracks.size(); ++t) {
        TrackState & s = tracks[t];
        s.w = motion.uniform(config.min_box_width, config.max_box_width);
        s.h = s.w * motion.uniform(1.8, 2.2);
        s.x = motion.uniform(0.0, std::max(1.0, config.image_width - s.w));
        s.y = motion.uniform(0.0, std::max(1.0, config.image_height - s.h));
        double const speed = motion.uniform(config.min_speed, config.max_speed);
        double const angle = motion.uniform(0.0, 2.0 * 3.14159265358979323846);
        s.vx = speed * std::cos(angle);
        s.vy = speed * std::sin(angle);
        data.ground_truth[t].id = static_cast<int>(t);
    }

    struct PendingDet {
        int frame;
        int track;  // -1 for false positives
        Box box;
        double conf;
    };
    std::vector<PendingDet> pending;

    for (int frame = 0; frame < config.n_frames; ++frame) {
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            TrackState & s = tracks[t];

            Detection gt;
            gt.id = 0;  // assigned later
            gt.frame = frame;
            gt.source_frame = frame;
            gt.box = Box{s.x, s.y, s.w, s.h};
            gt.gt_track = static_cast<int>(t);
            data.ground_truth[t].detections.push_back(gt);

            bool const missed = sensor.uniform() < config.miss_prob;
            double const jx = config.box_jitter * s.w * sensor.normal();
            double const jy = config.box_jitter * s.h * sensor.normal();
            double const conf = sensor.uniform(0.7, 1.0);
            if (!missed)
                pending.push_back(PendingDet{frame, static_cast<int>(t),
                                             Box{s.x + jx, s.y + jy, s.w, s.h}, conf});

            // Advance: constant velocity + acceleration noise, reflect at bounds.
            double const speed = std::hypot(s.vx, s.vy);
            s.vx += config.accel_sigma * speed * motion.normal();
            s.vy += config.accel_sigma * speed * motion.normal();
            s.x += s.vx;
            s.y += s.vy;
            if (s.x < 0.0) { s.x = -s.x; s.vx = -s.vx; }
            if (s.y < 0.0) { s.y = -s.y; s.vy = -s.vy; }
            double const max_x = std::max(1.0, config.image_width - s.w);
            double const max_y = std::max(1.0, config.image_height - s.h);
            if (s.x > max_x) { s.x = 2.0 * max_x - s.x; s.vx = -s.vx; }
            if (s.y > max_y) { s.y = 2.0 * max_y - s.y; s.vy = -s.vy; }
            s.x = std::clamp(s.x, 0.0, max_x);
            s.y = std::clamp(s.y, 0.0, max_y);
        }

        int const n_fp = poisson_draw(fp_rng, config.fp_rate);
        for (int f = 0; f < n_fp; ++f) {
            double const w = fp_rng.uniform(config.min_box_width, config.max_box_width);
            double const h = w * fp_rng.uniform(1.8, 2.2);
            Box const box{fp_rng.uniform(0.0, std::max(1.0, config.image_width - w)),
                          fp_rng.uniform(0.0, std::max(1.0, config.image_height - h)), w, h};
            pending.push_back(PendingDet{frame, -1, box, fp_rng.uniform(0.5, 0.8)});
        }
    }

    std::stable_sort(pending.begin(), pending.end(), [](PendingDet const & a, PendingDet const & b) {
        return a.frame < b.frame;
    });

    AppearanceProvider const provider = synthetic_appearance_provider(config);
    for (auto const & p : pending) {
        Detection d;
        d.id = static_cast<int>(data.detections.size());
        d.frame = p.frame;
        d.source_frame = p.frame;
        d.box = p.box;
        d.confidence = p.conf;
        if (p.track >= 0) d.gt_track = p.track;
        d.appearance = provider.vector_for(d);
        data.detections.push_back(std::move(d));
    }
    return data;
}

}  // namespace mpntrack
