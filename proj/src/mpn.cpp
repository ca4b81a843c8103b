#include "mpntrack/mpn.hpp"

#include <array>
#include <stdexcept>

namespace mpntrack {

void edge_update(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int l) {
    if (l < 1 || l >= static_cast<int>(state.edge_ids.size()))
        throw std::invalid_argument("edge_update: step out of range");
    Mlp & net = step_net(model, "edge_update", l);
    auto const & prev_nodes = state.node_ids[static_cast<std::size_t>(l - 1)];
    auto const & prev_edges = state.edge_ids[static_cast<std::size_t>(l - 1)];
    auto & out = state.edge_ids[static_cast<std::size_t>(l)];
    out.resize(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        int const i = graph.edges[e].src;
        int const j = graph.edges[e].dst;
        std::array<int, 6> const parts{prev_nodes[static_cast<std::size_t>(i)],
                                       prev_nodes[static_cast<std::size_t>(j)],
                                       prev_edges[e],
                                       state.node_ids[0][static_cast<std::size_t>(i)],
                                       state.node_ids[0][static_cast<std::size_t>(j)],
                                       state.edge_ids[0][e]};
        out[e] = mlp_forward(net, tape, tape.concat(parts));
        ++state.mlp_applications;
    }
}

namespace {

// Message for node i along edge e: [h_i^(l-1), h_e^(l), h_i^(0)].
int message_input(Tape & tape, EmbeddingState const & state, int i, int e, int l) {
    std::array<int, 3> const parts{state.node_ids[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(i)],
                                   state.edge_ids[static_cast<std::size_t>(l)][static_cast<std::size_t>(e)],
                                   state.node_ids[0][static_cast<std::size_t>(i)]};
    return tape.concat(parts);
}

}  // namespace

void node_update_vanilla(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int l) {
    Mlp & msg_net = step_net(model, "msg_update", l);
    auto & out = state.node_ids[static_cast<std::size_t>(l)];
    out.resize(graph.nodes.size());
    std::vector<int> messages;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        messages.clear();
        for (int e : graph.past_edges[i]) {
            messages.push_back(mlp_forward(msg_net, tape, message_input(tape, state, static_cast<int>(i), e, l)));
            ++state.mlp_applications;
        }
        for (int e : graph.future_edges[i]) {
            messages.push_back(mlp_forward(msg_net, tape, message_input(tape, state, static_cast<int>(i), e, l)));
            ++state.mlp_applications;
        }
        out[i] = tape.sum(messages, model.config.node_dim);
    }
}

void node_update_time_aware(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int l) {
    Mlp & past_net = step_net(model, "past_update", l);
    Mlp & fut_net = step_net(model, "fut_update", l);
    Mlp & node_net = step_net(model, "node_update", l);
    auto & out = state.node_ids[static_cast<std::size_t>(l)];
    out.resize(graph.nodes.size());
    std::vector<int> past_msgs, fut_msgs;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        past_msgs.clear();
        fut_msgs.clear();
        for (int e : graph.past_edges[i]) {
            past_msgs.push_back(mlp_forward(past_net, tape, message_input(tape, state, static_cast<int>(i), e, l)));
            ++state.mlp_applications;
        }
        for (int e : graph.future_edges[i]) {
            fut_msgs.push_back(mlp_forward(fut_net, tape, message_input(tape, state, static_cast<int>(i), e, l)));
            ++state.mlp_applications;
        }
        int const h_past = tape.sum(past_msgs, model.config.node_dim);
        int const h_fut = tape.sum(fut_msgs, model.config.node_dim);
        std::array<int, 2> const both{h_past, h_fut};
        out[i] = mlp_forward(node_net, tape, tape.concat(both));
        ++state.mlp_applications;
    }
}

void propagate(Tape & tape, EmbeddingState & state, TrackingGraph const & graph, Model & model, int L) {
    if (L < 0) throw std::invalid_argument("propagate: L must be >= 0");
    if (state.node_ids.empty()) throw std::invalid_argument("propagate: missing step-0 state");
    state.node_ids.resize(static_cast<std::size_t>(L) + 1);
    state.edge_ids.resize(static_cast<std::size_t>(L) + 1);
    for (int l = 1; l <= L; ++l) {
        edge_update(tape, state, graph, model, l);
        if (model.config.mode == UpdateMode::TimeAware)
            node_update_time_aware(tape, state, graph, model, l);
        else
            node_update_vanilla(tape, state, graph, model, l);
    }
}

EdgeScores classify_edges(Tape & tape, EmbeddingState const & state, Model & model, int l0, int L) {
    if (l0 > L) throw std::invalid_argument("classify_edges: l0 > L");
    if (L >= 1 && l0 < 1) throw std::invalid_argument("classify_edges: l0 must be >= 1 when L >= 1");
    if (L >= static_cast<int>(state.edge_ids.size()))
        throw std::invalid_argument("classify_edges: state does not cover step L");
    Mlp & head = model.params.net("classifier");
    EdgeScores result;
    result.l0 = l0;
    result.L = L;
    for (int l = l0; l <= L; ++l) {
        auto const & edges = state.edge_ids[static_cast<std::size_t>(l)];
        std::vector<double> s(edges.size());
        std::vector<int> ids(edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            ids[e] = mlp_forward(head, tape, edges[e]);
            s[e] = tape.value(ids[e])[0];
        }
        result.scores.push_back(std::move(s));
        result.value_ids.push_back(std::move(ids));
    }
    return result;
}

}  // namespace mpntrack
