#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpntrack/encoders.hpp"
#include "mpntrack/graph.hpp"
#include "mpntrack/mpn.hpp"

namespace mpntrack {

// One annotated sequence: detections carry gt_track (nullopt marks a false
// positive) and appearance vectors.
struct Sequence {
    std::vector<Detection> detections;
    double native_fps = 6.0;
    bool moving_camera = false;
};

struct TrainConfig {
    int iterations = 15000;
    double learning_rate = 3e-4;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int batch_graphs = 8;
    int clip_frames = 15;
    double fps_static = 6.0;
    double fps_moving = 9.0;
    int message_steps = 12;          // L
    int supervise_from = -1;         // l0; -1 = ceil(L/2) + 1
    UpdateMode mode = UpdateMode::TimeAware;
    FeatureSet feature_set = FeatureSet::TimePosApp;
    bool shared_weights = true;
    int max_frame_gap = 15;
    int knn = 50;
    double drop_prob = 0.1;
    double jitter_scale = 0.05;      // box shift stddev as fraction of size
    double positive_weight_override = 0.0;  // 0 = negatives/positives per batch
    double holdout_fraction = 0.2;   // trailing frames reserved for monitoring
    int log_interval = 200;
    std::uint64_t seed = 1;
};

// A sampled training graph: clip-local frames, ground-truth labels, and the
// parameters needed to rebuild it after augmentation.
struct ClipGraph {
    TrackingGraph graph;
    EdgeLabels labels;
    double fps = 6.0;       // effective fps after stride subsampling
    int max_frame_gap = 15;
    int knn = 50;
};

// Uniformly samples a clip start, subsamples frames at the target fps
// (stride = round(native / target)), and builds graph plus labels.
ClipGraph sample_clip(Sequence const & sequence, TrainConfig const & config, Rng & rng);

// Random node drops (simulated misses) and box shifts proportional to box
// size; graph and labels are rebuilt so gap-spanning edges become positive.
// A fully emptied clip is redrawn; if that keeps failing the original clip
// is returned.
ClipGraph augment(ClipGraph const & clip, Rng & rng, double drop_prob, double jitter_scale);

// Weighted multi-step binary cross-entropy, normalized by |E| only.
double bce_loss(EdgeScores const & scores, EdgeLabels const & labels, double w);

// Same value, and accumulates d(loss)/d(score) * scale into the tape
// adjoints of every supervised score.
double bce_loss_and_seed(Tape & tape, EdgeScores const & scores, EdgeLabels const & labels, double w,
                         double scale = 1.0);

// negatives / positives over a batch of labels; falls back to 1 (with
// warned set) when either class is absent.
double positive_weight(std::vector<EdgeLabels const *> const & batch, bool * warned = nullptr);

struct TrainLogRow {
    int iteration = 0;
    double loss = 0.0;
    double edge_accuracy = 0.0;
    double constraint_satisfaction = 0.0;
    std::int64_t wall_ms = 0;
};

struct TrainResult {
    Model model;       // final parameters
    Model best;        // highest held-out edge accuracy seen
    double best_edge_accuracy = 0.0;
    std::vector<TrainLogRow> log;
};

// Full training loop: batches of augmented clips, Adam updates, periodic
// held-out monitoring. Throws if the loss diverges to NaN.
TrainResult train(std::vector<Sequence> const & dataset, TrainConfig const & config);

// Held-out evaluation used by the trainer and the ablation drivers:
// step-L scores thresholded at 0.5 against ground-truth labels.
struct EdgeEval {
    double accuracy = 0.0;
    double constraint_satisfaction = 1.0;
    std::int64_t edges = 0;
};

EdgeEval evaluate_edges(Model & model, std::vector<ClipGraph> const & clips);

// Deterministic non-augmented clips tiling the trailing holdout_fraction of
// each sequence (for monitoring and ablation evaluation).
std::vector<ClipGraph> holdout_clips(std::vector<Sequence> const & dataset, TrainConfig const & config);

// Halves the classifier output layer until every supervised score on the
// clip lies strictly inside (lo, hi). Finite-difference gradient checks
// need an operating point away from the clamp plateaus of the loss, where
// it is not differentiable.
void scale_classifier_into_band(Model & model, ClipGraph const & clip, double lo = 0.02,
                                double hi = 0.98);

}  // namespace mpntrack
