#include "mpntrack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mpntrack {

namespace {

double appearance_sqdist(std::vector<double> const & a, std::vector<double> const & b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        double const diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

void finalize_adjacency(TrackingGraph & g) {
    g.past_edges.assign(g.nodes.size(), {});
    g.future_edges.assign(g.nodes.size(), {});
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        g.future_edges[g.edges[e].src].push_back(e);
        g.past_edges[g.edges[e].dst].push_back(e);
    }
    // Canonical aggregation order: ascending neighbor detection id, so node
    // updates are exactly reproducible under input permutations.
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        auto by_neighbor = [&](std::vector<int> & list, bool past) {
            std::sort(list.begin(), list.end(), [&](int a, int b) {
                int const na = past ? g.edges[a].src : g.edges[a].dst;
                int const nb = past ? g.edges[b].src : g.edges[b].dst;
                if (g.nodes[na].id != g.nodes[nb].id) return g.nodes[na].id < g.nodes[nb].id;
                if (na != nb) return na < nb;
                return a < b;
            });
        };
        by_neighbor(g.past_edges[i], true);
        by_neighbor(g.future_edges[i], false);
    }
}

}  // namespace

int TrackingGraph::max_degree() const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        d = std::max(d, past_edges[i].size() + future_edges[i].size());
    return static_cast<int>(d);
}

std::vector<int> ConstraintMatrix::multiply(std::vector<std::uint8_t> const & y) const {
    if (static_cast<std::int64_t>(y.size()) != cols)
        throw std::invalid_argument("constraint matrix multiply: size mismatch");
    std::vector<int> out(static_cast<std::size_t>(rows), 0);
    for (auto const & [r, c] : entries) out[static_cast<std::size_t>(r)] += y[static_cast<std::size_t>(c)];
    return out;
}

TrackingGraph build_graph(std::vector<Detection> const & detections, int max_frame_gap, int k) {
    if (detections.empty()) throw std::invalid_argument("build_graph: empty input");
    if (k < 1) throw std::invalid_argument("build_graph: k must be >= 1");
    if (max_frame_gap < 1) throw std::invalid_argument("build_graph: max_frame_gap must be >= 1");

    TrackingGraph g;
    g.nodes = detections;
    int const n = static_cast<int>(g.nodes.size());

    std::map<int, std::vector<int>> by_frame;
    for (int i = 0; i < n; ++i) by_frame[g.nodes[i].frame].push_back(i);

    // rank_ok[i] holds, per reachable other frame, the ids of i's k nearest
    // detections in that frame (Euclidean appearance distance, ties to the
    // lower detection id).
    auto knn_in_frame = [&](int i, std::vector<int> const & frame_nodes) {
        std::vector<std::pair<double, int>> cand;
        cand.reserve(frame_nodes.size());
        for (int j : frame_nodes)
            cand.emplace_back(appearance_sqdist(g.nodes[i].appearance, g.nodes[j].appearance), j);
        std::sort(cand.begin(), cand.end(), [&](auto const & a, auto const & b) {
            if (a.first != b.first) return a.first < b.first;
            return g.nodes[a.second].id < g.nodes[b.second].id;
        });
        std::vector<int> keep;
        for (int r = 0; r < static_cast<int>(cand.size()) && r < k; ++r) keep.push_back(cand[r].second);
        return keep;
    };

    std::vector<Edge> edges;
    for (auto it = by_frame.begin(); it != by_frame.end(); ++it) {
        for (auto jt = std::next(it); jt != by_frame.end(); ++jt) {
            if (jt->first - it->first > max_frame_gap) break;
            // Mutual k-NN between the two frames.
            std::map<int, std::vector<int>> fwd;  // earlier node -> its kept later nodes
            for (int i : it->second) fwd[i] = knn_in_frame(i, jt->second);
            for (int j : jt->second) {
                std::vector<int> const back = knn_in_frame(j, it->second);
                for (int i : back) {
                    auto const & kept = fwd[i];
                    if (std::find(kept.begin(), kept.end(), j) != kept.end())
                        edges.push_back(Edge{i, j});
                }
            }
        }
    }

    std::sort(edges.begin(), edges.end(), [](Edge const & a, Edge const & b) {
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
    g.edges = std::move(edges);
    finalize_adjacency(g);
    return g;
}

TrackingGraph graph_from_edges(std::vector<Detection> nodes,
                               std::vector<std::pair<int, int>> const & pairs) {
    TrackingGraph g;
    g.nodes = std::move(nodes);
    g.edges.reserve(pairs.size());
    for (auto const & [a, b] : pairs) {
        if (g.nodes[a].frame == g.nodes[b].frame)
            throw std::invalid_argument("graph_from_edges: same-frame edge");
        if (g.nodes[a].frame < g.nodes[b].frame)
            g.edges.push_back(Edge{a, b});
        else
            g.edges.push_back(Edge{b, a});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](Edge const & a, Edge const & b) {
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end(),
                              [](Edge const & a, Edge const & b) {
                                  return a.src == b.src && a.dst == b.dst;
                              }),
                  g.edges.end());
    finalize_adjacency(g);
    return g;
}

EdgeLabels ground_truth_labels(TrackingGraph const & graph) {
    // Frames occupied by each track among the nodes actually in the graph.
    std::map<int, std::vector<int>> track_frames;
    for (auto const & det : graph.nodes)
        if (det.gt_track) track_frames[*det.gt_track].push_back(det.frame);
    for (auto & [track, frames] : track_frames) std::sort(frames.begin(), frames.end());

    EdgeLabels labels;
    labels.values.assign(graph.edges.size(), 0);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        Detection const & a = graph.nodes[graph.edges[e].src];
        Detection const & b = graph.nodes[graph.edges[e].dst];
        if (!a.gt_track || !b.gt_track || *a.gt_track != *b.gt_track) continue;
        auto const & frames = track_frames[*a.gt_track];
        auto lo = std::upper_bound(frames.begin(), frames.end(), a.frame);
        bool const intermediate = lo != frames.end() && *lo < b.frame;
        if (!intermediate) labels.values[e] = 1;
    }
    return labels;
}

ConstraintReport check_flow_constraints(TrackingGraph const & graph, EdgeLabels const & labels) {
    if (labels.values.size() != graph.edges.size())
        throw std::invalid_argument("check_flow_constraints: label/edge size mismatch");
    ConstraintReport report;
    report.total_constraints = 2 * static_cast<std::int64_t>(graph.nodes.size());
    for (int i = 0; i < static_cast<int>(graph.nodes.size()); ++i) {
        int in_active = 0;
        for (int e : graph.past_edges[i]) in_active += labels.values[e];
        if (in_active > 1) {
            ++report.violated;
            report.violated_nodes.emplace_back(i, ConstraintReport::Direction::In);
        }
        int out_active = 0;
        for (int e : graph.future_edges[i]) out_active += labels.values[e];
        if (out_active > 1) {
            ++report.violated;
            report.violated_nodes.emplace_back(i, ConstraintReport::Direction::Out);
        }
    }
    report.satisfaction_ratio =
        report.total_constraints == 0
            ? 1.0
            : 1.0 - static_cast<double>(report.violated) / static_cast<double>(report.total_constraints);
    return report;
}

ConstraintMatrix constraint_matrix(TrackingGraph const & graph) {
    ConstraintMatrix m;
    m.rows = 2 * static_cast<std::int64_t>(graph.nodes.size());
    m.cols = static_cast<std::int64_t>(graph.edges.size());
    m.entries.reserve(2 * graph.edges.size());
    for (std::int64_t e = 0; e < m.cols; ++e) {
        Edge const & edge = graph.edges[static_cast<std::size_t>(e)];
        m.entries.emplace_back(2 * static_cast<std::int64_t>(edge.dst), e);      // incoming row of dst
        m.entries.emplace_back(2 * static_cast<std::int64_t>(edge.src) + 1, e);  // outgoing row of src
    }
    return m;
}

}  // namespace mpntrack
