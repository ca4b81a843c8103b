#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpntrack/types.hpp"

namespace mpntrack {

// Candidate association between two detections; src is always the
// earlier-frame endpoint.
struct Edge {
    int src = 0;
    int dst = 0;
};

// Detections plus directed-in-time candidate edges. Immutable after
// construction; adjacency lists hold edge ids sorted by neighbor node id.
struct TrackingGraph {
    std::vector<Detection> nodes;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> past_edges;    // per node: edges (j, i) from earlier frames
    std::vector<std::vector<int>> future_edges;  // per node: edges (i, k) to later frames

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_edges() const { return edges.size(); }

    // Maximum number of candidate edges incident to any node.
    int max_degree() const;
};

// Binary labels aligned with TrackingGraph::edges.
struct EdgeLabels {
    std::vector<std::uint8_t> values;
};

// Per-node flow-conservation audit; two constraints per node (in/out).
struct ConstraintReport {
    enum class Direction { In, Out };
    std::int64_t total_constraints = 0;
    std::int64_t violated = 0;
    double satisfaction_ratio = 1.0;
    std::vector<std::pair<int, Direction>> violated_nodes;
};

// Sparse 0/1 matrix with rows 2i (incoming constraint of node i) and
// 2i + 1 (outgoing), one column per edge.
struct ConstraintMatrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> entries;  // (row, col)

    // A * y for a binary vector y.
    std::vector<int> multiply(std::vector<std::uint8_t> const & y) const;
};

// Builds the pruned tracking graph: edges connect detections in different
// frames with frame gap <= max_frame_gap, kept only when the endpoints are
// reciprocal k-nearest appearance neighbors. Nearest neighbors are ranked
// per (node, other frame), distances tie-broken by lower detection id.
TrackingGraph build_graph(std::vector<Detection> const & detections, int max_frame_gap, int k);

// Assembles a graph from an explicit edge list (windowed union graphs,
// scored-edge files). Pairs are reordered so the earlier frame comes first.
TrackingGraph graph_from_edges(std::vector<Detection> nodes,
                               std::vector<std::pair<int, int>> const & pairs);

// Label(i, j) = 1 iff both detections carry the same ground-truth track and
// no detection of that track sits at a strictly intermediate frame in the
// graph, so removed detections yield gap-spanning positives.
EdgeLabels ground_truth_labels(TrackingGraph const & graph);

// Evaluates the 2|V| flow-conservation constraints (at most one active
// incoming and one active outgoing edge per node).
ConstraintReport check_flow_constraints(TrackingGraph const & graph, EdgeLabels const & labels);

ConstraintMatrix constraint_matrix(TrackingGraph const & graph);

}  // namespace mpntrack
