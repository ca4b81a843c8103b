#include "mpntrack/rounding.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace mpntrack {

namespace {

void require_aligned(FractionalSolution const & scores, TrackingGraph const & graph) {
    if (scores.size() != graph.edges.size())
        throw std::invalid_argument("rounding: score/edge size mismatch");
}

EdgeLabels as_edge_labels(std::vector<std::uint8_t> const & labels) {
    EdgeLabels l;
    l.values = labels;
    return l;
}

}  // namespace

ThresholdResult threshold(FractionalSolution const & scores, TrackingGraph const & graph, double t) {
    require_aligned(scores, graph);
    if (t <= 0.0 || t >= 1.0) throw std::invalid_argument("threshold: t must be in (0, 1)");
    ThresholdResult result;
    result.solution.labels.resize(scores.size());
    for (std::size_t e = 0; e < scores.size(); ++e)
        result.solution.labels[e] = scores[e] >= t ? 1 : 0;
    result.report = check_flow_constraints(graph, as_edge_labels(result.solution.labels));
    result.solution.feasible = result.report.violated == 0;
    return result;
}

ViolatedSubgraph violated_subgraph(FractionalSolution const & scores, TrackingGraph const & graph,
                                   double t) {
    require_aligned(scores, graph);
    auto const thr = threshold(scores, graph, t);
    auto const & labels = thr.solution.labels;

    std::vector<int> in_active(graph.nodes.size(), 0), out_active(graph.nodes.size(), 0);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (!labels[e]) continue;
        ++out_active[static_cast<std::size_t>(graph.edges[e].src)];
        ++in_active[static_cast<std::size_t>(graph.edges[e].dst)];
    }

    ViolatedSubgraph sub;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (!labels[e]) continue;
        bool const violated = out_active[static_cast<std::size_t>(graph.edges[e].src)] > 1 ||
                              in_active[static_cast<std::size_t>(graph.edges[e].dst)] > 1;
        if (violated) {
            sub.edge_ids.push_back(static_cast<int>(e));
            sub.scores.push_back(scores[e]);
        }
    }
    return sub;
}

BinarySolution greedy_round(FractionalSolution const & scores, TrackingGraph const & graph,
                            RoundingStats * stats) {
    require_aligned(scores, graph);
    BinarySolution sol;
    sol.labels.resize(scores.size());
    for (std::size_t e = 0; e < scores.size(); ++e) sol.labels[e] = scores[e] >= 0.5 ? 1 : 0;

    std::uint64_t ops = 0;
    auto fix_direction = [&](std::vector<int> const & incident) {
        int active = 0;
        for (int e : incident) {
            ++ops;
            active += sol.labels[static_cast<std::size_t>(e)];
        }
        if (active <= 1) return;
        // Keep only the max-score active edge; ties go to the lower edge id.
        int best = -1;
        for (int e : incident) {
            ++ops;
            if (!sol.labels[static_cast<std::size_t>(e)]) continue;
            if (best == -1 || scores[static_cast<std::size_t>(e)] > scores[static_cast<std::size_t>(best)])
                best = e;
        }
        for (int e : incident)
            if (e != best) sol.labels[static_cast<std::size_t>(e)] = 0;
    };

    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        fix_direction(graph.past_edges[i]);
        fix_direction(graph.future_edges[i]);
    }
    sol.feasible = true;
    if (stats) stats->ops = ops;
    return sol;
}

namespace {

// Min-cost bipartite matching (out-slots vs in-slots) by successive
// shortest augmenting paths. Candidate costs are 1 - 2*score <= 0; the
// search stops once no augmenting path improves the objective, so the
// matching size itself is optimized. Bellman-Ford tolerates the negative
// arcs; subgraphs here are tiny.
struct SubEdge {
    int edge_id;
    int left;   // out-slot index
    int right;  // in-slot index
    double cost;
};

std::vector<int> solve_min_cost_matching(std::vector<SubEdge> const & sub_edges, int n_left, int n_right) {
    double const inf = std::numeric_limits<double>::infinity();

    std::vector<int> match_left(static_cast<std::size_t>(n_left), -1);   // sub-edge index or -1
    std::vector<int> match_right(static_cast<std::size_t>(n_right), -1);

    // Adjacency of candidate edges per endpoint.
    std::vector<std::vector<int>> left_edges(static_cast<std::size_t>(n_left));
    for (std::size_t s = 0; s < sub_edges.size(); ++s)
        left_edges[static_cast<std::size_t>(sub_edges[s].left)].push_back(static_cast<int>(s));

    while (true) {
        // Queue-based Bellman-Ford over the residual graph: forward arcs
        // left -> right for unmatched edges (cost), backward right -> left
        // for matched ones (-cost). Negative arcs are fine, the SSP
        // invariant rules out negative cycles.
        std::vector<double> dist_l(static_cast<std::size_t>(n_left), inf);
        std::vector<double> dist_r(static_cast<std::size_t>(n_right), inf);
        std::vector<int> via(static_cast<std::size_t>(n_right), -1);  // sub-edge into this right slot
        std::vector<char> queued(static_cast<std::size_t>(n_left), 0);
        std::deque<int> queue;
        for (int l = 0; l < n_left; ++l)
            if (match_left[static_cast<std::size_t>(l)] == -1) {
                dist_l[static_cast<std::size_t>(l)] = 0.0;
                queue.push_back(l);
                queued[static_cast<std::size_t>(l)] = 1;
            }
        while (!queue.empty()) {
            int const l = queue.front();
            queue.pop_front();
            queued[static_cast<std::size_t>(l)] = 0;
            for (int s : left_edges[static_cast<std::size_t>(l)]) {
                SubEdge const & se = sub_edges[static_cast<std::size_t>(s)];
                if (match_left[static_cast<std::size_t>(l)] == s) continue;  // not a forward arc
                double const cand = dist_l[static_cast<std::size_t>(l)] + se.cost;
                if (cand >= dist_r[static_cast<std::size_t>(se.right)] - 1e-15) continue;
                dist_r[static_cast<std::size_t>(se.right)] = cand;
                via[static_cast<std::size_t>(se.right)] = s;
                // Relax the backward arc of the slot's current assignment.
                int const back = match_right[static_cast<std::size_t>(se.right)];
                if (back == -1) continue;
                SubEdge const & be = sub_edges[static_cast<std::size_t>(back)];
                double const cand_l = cand - be.cost;
                if (cand_l >= dist_l[static_cast<std::size_t>(be.left)] - 1e-15) continue;
                dist_l[static_cast<std::size_t>(be.left)] = cand_l;
                if (!queued[static_cast<std::size_t>(be.left)]) {
                    queue.push_back(be.left);
                    queued[static_cast<std::size_t>(be.left)] = 1;
                }
            }
        }

        double best = -1e-12;
        int best_right = -1;
        for (int r = 0; r < n_right; ++r) {
            if (match_right[static_cast<std::size_t>(r)] != -1) continue;
            if (dist_r[static_cast<std::size_t>(r)] < best) {
                best = dist_r[static_cast<std::size_t>(r)];
                best_right = r;
            }
        }
        if (best_right == -1) break;

        // Flip matched/unmatched along the path, walking back from the
        // cheapest free right slot.
        int r = best_right;
        while (r != -1) {
            int const s = via[static_cast<std::size_t>(r)];
            SubEdge const & se = sub_edges[static_cast<std::size_t>(s)];
            int const prev_on_left = match_left[static_cast<std::size_t>(se.left)];
            match_left[static_cast<std::size_t>(se.left)] = s;
            match_right[static_cast<std::size_t>(r)] = s;
            if (prev_on_left == -1) {
                r = -1;
            } else {
                // The left slot was previously matched; that assignment was
                // undone, continue from its right endpoint.
                SubEdge const & prev = sub_edges[static_cast<std::size_t>(prev_on_left)];
                r = prev.right;
                match_right[static_cast<std::size_t>(prev.right)] = -1;
            }
        }
    }

    std::vector<int> chosen;
    for (int l = 0; l < n_left; ++l)
        if (match_left[static_cast<std::size_t>(l)] != -1)
            chosen.push_back(sub_edges[static_cast<std::size_t>(match_left[static_cast<std::size_t>(l)])].edge_id);
    return chosen;
}

}  // namespace

BinarySolution exact_round(FractionalSolution const & scores, TrackingGraph const & graph) {
    require_aligned(scores, graph);
    auto thr = threshold(scores, graph, 0.5);
    BinarySolution sol = std::move(thr.solution);
    if (thr.report.violated == 0) {
        sol.feasible = true;
        return sol;
    }

    ViolatedSubgraph const sub = violated_subgraph(scores, graph, 0.5);
    std::map<int, int> left_ids, right_ids;  // node -> slot index
    std::vector<SubEdge> sub_edges;
    for (std::size_t s = 0; s < sub.edge_ids.size(); ++s) {
        int const e = sub.edge_ids[s];
        sol.labels[static_cast<std::size_t>(e)] = 0;  // undecided until matched
        Edge const & edge = graph.edges[static_cast<std::size_t>(e)];
        int const l = left_ids.emplace(edge.src, static_cast<int>(left_ids.size())).first->second;
        int const r = right_ids.emplace(edge.dst, static_cast<int>(right_ids.size())).first->second;
        sub_edges.push_back(SubEdge{e, l, r, 1.0 - 2.0 * sub.scores[s]});
    }

    for (int e : solve_min_cost_matching(sub_edges, static_cast<int>(left_ids.size()),
                                         static_cast<int>(right_ids.size())))
        sol.labels[static_cast<std::size_t>(e)] = 1;
    sol.feasible = true;
    return sol;
}

double rounding_objective(FractionalSolution const & scores, std::vector<std::uint8_t> const & labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("rounding_objective: size mismatch");
    double obj = 0.0;
    for (std::size_t e = 0; e < scores.size(); ++e)
        if (labels[e]) obj += 1.0 - 2.0 * scores[e];
    return obj;
}

std::vector<Trajectory> extract_trajectories(TrackingGraph const & graph, BinarySolution const & solution) {
    auto const report = check_flow_constraints(graph, as_edge_labels(solution.labels));
    if (report.violated != 0) throw std::invalid_argument("extract_trajectories: round first");

    int const n = static_cast<int>(graph.nodes.size());
    std::vector<int> next(static_cast<std::size_t>(n), -1), prev(static_cast<std::size_t>(n), -1);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (!solution.labels[e]) continue;
        next[static_cast<std::size_t>(graph.edges[e].src)] = graph.edges[e].dst;
        prev[static_cast<std::size_t>(graph.edges[e].dst)] = graph.edges[e].src;
    }

    std::vector<Trajectory> trajectories;
    for (int i = 0; i < n; ++i) {
        if (prev[static_cast<std::size_t>(i)] != -1) continue;  // not a chain head
        Trajectory traj;
        traj.id = static_cast<int>(trajectories.size());
        for (int cur = i; cur != -1; cur = next[static_cast<std::size_t>(cur)])
            traj.detections.push_back(graph.nodes[static_cast<std::size_t>(cur)]);
        trajectories.push_back(std::move(traj));
    }
    return trajectories;
}

}  // namespace mpntrack
