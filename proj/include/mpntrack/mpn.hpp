#pragma once

#include <cstdint>
#include <vector>

#include "mpntrack/graph.hpp"
#include "mpntrack/model.hpp"

namespace mpntrack {

// Node and edge embeddings per message passing step, held as tape value
// ids so one reverse sweep differentiates the full propagation.
struct EmbeddingState {
    std::vector<std::vector<int>> node_ids;  // [step][node]
    std::vector<std::vector<int>> edge_ids;  // [step][edge]
    std::uint64_t mlp_applications = 0;      // instrumentation

    int steps() const { return static_cast<int>(node_ids.size()) - 1; }
};

// Sigmoid classifier outputs for steps l0..L.
struct EdgeScores {
    int l0 = 0;
    int L = 0;
    std::vector<std::vector<double>> scores;     // [l - l0][edge]
    std::vector<std::vector<int>> value_ids;     // tape ids, for loss seeding

    std::vector<double> const & at_step(int l) const { return scores[static_cast<std::size_t>(l - l0)]; }
    std::vector<double> const & final_step() const { return scores.back(); }
};

// (v -> e): every edge embedding is recomputed from both endpoints'
// current embeddings plus the step-0 skip connections; input width
// 4*node_dim + 2*edge_dim.
void edge_update(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int l);

// (e -> v), order-invariant sum over all incident messages.
void node_update_vanilla(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int l);

// (e -> v), past and future neighborhoods aggregated separately and fused
// by a final MLP; empty neighborhoods contribute zero vectors.
void node_update_time_aware(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int l);

// Runs L alternating (v->e), (e->v) rounds on top of the step-0 state.
// L = 0 returns the state unchanged.
void propagate(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int L);

// Applies the sigmoid head to edge embeddings of steps l0..L.
EdgeScores classify_edges(Tape & tape, EmbeddingState const & state, Model & model, int l0, int L);

}  // namespace mpntrack
