#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mpntrack/graph.hpp"
#include "mpntrack/model.hpp"
#include "mpntrack/types.hpp"

namespace mpntrack {

// MOTChallenge CSV layout: frame,id,bb_left,bb_top,bb_width,bb_height,conf
// plus three placeholder fields. Files are 1-based in frame; everything
// internal is 0-based.

// Parses a detection file; ids are assigned by line order (the id column of
// raw detections is -1 by convention). Malformed lines raise errors with
// line numbers.
std::vector<Detection> read_detections(std::string const & path);

// Parses an annotation/result file and groups records into trajectories by
// id, sorted by frame.
std::vector<Trajectory> read_ground_truth(std::string const & path);

void write_detections(std::string const & path, std::vector<Detection> const & detections);

// One line per (frame, id) box, conf 1, trailing fields -1, sorted by frame
// then id.
void write_results(std::string const & path, std::vector<Trajectory> const & trajectories);

// Appearance vectors: "id,v0,v1,..." with full double precision; ids follow
// the detection-file line order.
void write_appearance(std::string const & path, std::vector<Detection> const & detections);

// Versioned binary checkpoint: architecture metadata, every network's
// shapes and row-major weights, plus Adam state and the step counter.
void save_checkpoint(std::string const & path, Model const & model);
Model load_checkpoint(std::string const & path);

// Scored-edge text file for the round subcommand and violated-subgraph
// dumps: "node_i node_j frame_i frame_j score [label]".
struct ScoredEdgeFile {
    TrackingGraph graph;
    std::vector<double> scores;
};

ScoredEdgeFile read_scored_edges(std::string const & path);
void write_scored_edges(std::string const & path, TrackingGraph const & graph,
                        std::vector<double> const & scores,
                        std::vector<std::uint8_t> const & labels = {});

// Detections with gt_track attached, built from annotated trajectories
// (training consumes ground truth plus augmentation).
std::vector<Detection> detections_from_ground_truth(std::vector<Trajectory> const & trajectories);

}  // namespace mpntrack
