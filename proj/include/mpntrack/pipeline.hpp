#pragma once

#include <cstdint>
#include <vector>

#include "mpntrack/encoders.hpp"
#include "mpntrack/model.hpp"
#include "mpntrack/types.hpp"

namespace mpntrack {

struct PipelineConfig {
    enum class Rounding { Greedy, Exact };

    int window_frames = 15;
    int overlap_frames = 14;
    double fps = 6.0;            // target sampling rate
    int knn = 50;
    int max_frame_gap = 15;
    double threshold_t = 0.5;
    Rounding rounding = Rounding::Exact;
    double conf_min = 0.5;
    double nms_iou = 0.85;
    bool interpolate = true;
    bool drop_singletons = true;
};

struct SequenceDiagnostics {
    int windows = 0;
    std::int64_t union_edges = 0;
    std::int64_t averaged_edges = 0;  // edges scored by more than one window
    double constraint_satisfaction = 1.0;  // union graph at 0.5, before rounding

    // Raw per-window numbers: every window graph thresholded at 0.5 and
    // audited before any averaging, the paper-style view of how feasible
    // the classifier output itself is.
    std::int64_t window_constraints = 0;
    std::int64_t window_violations = 0;
    double window_constraint_satisfaction = 1.0;
};

struct SequenceResult {
    std::vector<Trajectory> trajectories;
    SequenceDiagnostics diagnostics;
    // The solved union problem (nodes carry subsampled step indices); kept
    // for debug dumps and the scored-edge export.
    TrackingGraph union_graph;
    std::vector<double> averaged_scores;
};

// Confidence floor plus per-frame greedy NMS (score order, suppress at
// IoU > nms_iou).
std::vector<Detection> prefilter(std::vector<Detection> detections, double conf_min, double nms_iou);

// Full offline inference: fps subsampling, sliding windows with per-window
// forward passes, score averaging for edges shared between windows, one
// rounding pass over the union graph, trajectory extraction and
// post-processing.
SequenceResult track_sequence(std::vector<Detection> const & detections, double native_fps,
                              Model & model, PipelineConfig const & config);

// Linear interpolation of box coordinates over missing intermediate frames.
Trajectory interpolate_trajectory(Trajectory const & trajectory);

// Drops singleton trajectories (when configured), interpolates gaps, and
// renumbers identities consecutively in first-appearance order.
std::vector<Trajectory> postprocess(std::vector<Trajectory> trajectories, PipelineConfig const & config);

}  // namespace mpntrack
