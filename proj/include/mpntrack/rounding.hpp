#pragma once

#include <cstdint>
#include <vector>

#include "mpntrack/graph.hpp"
#include "mpntrack/types.hpp"

namespace mpntrack {

// Fractional per-edge scores in [0, 1], aligned with TrackingGraph::edges.
using FractionalSolution = std::vector<double>;

struct BinarySolution {
    std::vector<std::uint8_t> labels;
    bool feasible = false;
};

struct ThresholdResult {
    BinarySolution solution;
    ConstraintReport report;
};

struct RoundingStats {
    std::uint64_t ops = 0;  // per-edge primitive steps
};

// Edges of the thresholded solution that occupy a violated in/out slot,
// i.e. the only region where rounding still has work to do. Complement
// edges keep their thresholded labels.
struct ViolatedSubgraph {
    std::vector<int> edge_ids;   // into the parent graph's edge list
    std::vector<double> scores;  // restriction of the fractional solution
};

ThresholdResult threshold(FractionalSolution const & scores, TrackingGraph const & graph, double t = 0.5);

ViolatedSubgraph violated_subgraph(FractionalSolution const & scores, TrackingGraph const & graph,
                                   double t = 0.5);

// Thresholds at 0.5, then per violated constraint keeps only the
// highest-scoring active edge (ties to the lower edge id). Always feasible;
// only ever deactivates edges.
BinarySolution greedy_round(FractionalSolution const & scores, TrackingGraph const & graph,
                            RoundingStats * stats = nullptr);

// Binary minimizer of sum_e (1 - 2*score_e) * y_e subject to the per-node
// capacity constraints. Thresholding fixes everything outside the violated
// subgraph; the remainder is solved exactly as a min-cost bipartite
// matching between out-slots and in-slots.
BinarySolution exact_round(FractionalSolution const & scores, TrackingGraph const & graph);

// Objective value sum_e (1 - 2*score_e) * label_e.
double rounding_objective(FractionalSolution const & scores, std::vector<std::uint8_t> const & labels);

// Maximal chains of active edges; isolated nodes become singletons.
// Requires a feasible solution.
std::vector<Trajectory> extract_trajectories(TrackingGraph const & graph, BinarySolution const & solution);

}  // namespace mpntrack
