#pragma once

#include <cstdint>
#include <vector>

#include "mpntrack/encoders.hpp"
#include "mpntrack/types.hpp"

namespace mpntrack {

// Desk-scale stand-in for benchmark data: constant-velocity tracks with
// Gaussian acceleration noise and reflective image bounds, per-frame
// misses, injected false positives, box jitter and synthetic appearance.
struct SyntheticConfig {
    int n_tracks = 10;
    int n_frames = 100;
    double native_fps = 6.0;
    double miss_prob = 0.0;
    double fp_rate = 0.0;             // expected false positives per frame (Poisson)
    double appearance_sigma = 0.1;
    int appearance_dim = 32;
    double box_jitter = 0.0;          // detection box shift stddev, fraction of size
    double image_width = 1280.0;
    double image_height = 720.0;
    double min_speed = 1.0;           // px per frame
    double max_speed = 6.0;
    double min_box_width = 25.0;
    double max_box_width = 60.0;
    double accel_sigma = 0.05;        // velocity noise, fraction of speed
    std::uint64_t seed = 7;
};

struct SyntheticData {
    std::vector<Detection> detections;       // the observed stream (gt_track set on true detections)
    std::vector<Trajectory> ground_truth;    // exact boxes, one per track per frame
    double native_fps = 6.0;
};

SyntheticData generate_synthetic(SyntheticConfig const & config);

// The appearance source used by the generator, exposed so ground-truth
// boxes (training input) can be embedded consistently with the detections.
AppearanceProvider synthetic_appearance_provider(SyntheticConfig const & config);

}  // namespace mpntrack
