#include "mpntrack/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mpntrack/mpn.hpp"
#include "mpntrack/rounding.hpp"

namespace mpntrack {

std::vector<Detection> prefilter(std::vector<Detection> detections, double conf_min, double nms_iou) {
    std::vector<Detection> kept;
    for (auto & d : detections)
        if (d.confidence >= conf_min) kept.push_back(std::move(d));

    std::map<int, std::vector<int>> by_frame;
    for (int i = 0; i < static_cast<int>(kept.size()); ++i) by_frame[kept[i].frame].push_back(i);

    std::vector<char> suppressed(kept.size(), 0);
    for (auto & [frame, idxs] : by_frame) {
        std::sort(idxs.begin(), idxs.end(), [&](int a, int b) {
            if (kept[a].confidence != kept[b].confidence) return kept[a].confidence > kept[b].confidence;
            return kept[a].id < kept[b].id;
        });
        for (std::size_t a = 0; a < idxs.size(); ++a) {
            if (suppressed[idxs[a]]) continue;
            for (std::size_t b = a + 1; b < idxs.size(); ++b) {
                if (suppressed[idxs[b]]) continue;
                if (iou(kept[idxs[a]].box, kept[idxs[b]].box) > nms_iou) suppressed[idxs[b]] = 1;
            }
        }
    }

    std::vector<Detection> out;
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (!suppressed[i]) out.push_back(std::move(kept[i]));
    return out;
}

Trajectory interpolate_trajectory(Trajectory const & trajectory) {
    if (trajectory.detections.size() < 2) return trajectory;
    Trajectory out;
    out.id = trajectory.id;
    for (std::size_t d = 0; d + 1 < trajectory.detections.size(); ++d) {
        Detection const & a = trajectory.detections[d];
        Detection const & b = trajectory.detections[d + 1];
        out.detections.push_back(a);
        for (int f = a.frame + 1; f < b.frame; ++f) {
            double const alpha = static_cast<double>(f - a.frame) / static_cast<double>(b.frame - a.frame);
            Detection filled;
            filled.id = -1;
            filled.frame = f;
            filled.source_frame = f;
            filled.box = Box{a.box.x + alpha * (b.box.x - a.box.x), a.box.y + alpha * (b.box.y - a.box.y),
                             a.box.w + alpha * (b.box.w - a.box.w), a.box.h + alpha * (b.box.h - a.box.h)};
            filled.confidence = 1.0;
            out.detections.push_back(std::move(filled));
        }
    }
    out.detections.push_back(trajectory.detections.back());
    return out;
}

std::vector<Trajectory> postprocess(std::vector<Trajectory> trajectories, PipelineConfig const & config) {
    std::vector<Trajectory> out;
    for (auto & traj : trajectories) {
        if (config.drop_singletons && traj.detections.size() < 2) continue;
        out.push_back(std::move(traj));
    }
    if (config.interpolate)
        for (auto & traj : out) traj = interpolate_trajectory(traj);

    std::sort(out.begin(), out.end(), [](Trajectory const & a, Trajectory const & b) {
        int const fa = a.detections.empty() ? 0 : a.detections.front().frame;
        int const fb = b.detections.empty() ? 0 : b.detections.front().frame;
        if (fa != fb) return fa < fb;
        int const ia = a.detections.empty() ? 0 : a.detections.front().id;
        int const ib = b.detections.empty() ? 0 : b.detections.front().id;
        return ia < ib;
    });
    for (std::size_t t = 0; t < out.size(); ++t) out[t].id = static_cast<int>(t);
    return out;
}

SequenceResult track_sequence(std::vector<Detection> const & detections, double native_fps,
                              Model & model, PipelineConfig const & config) {
    if (config.window_frames < 2) throw std::invalid_argument("track_sequence: window_frames must be >= 2");
    if (config.overlap_frames < 0 || config.overlap_frames >= config.window_frames)
        throw std::invalid_argument("track_sequence: overlap must be in [0, window)");
    if (!model.params.has("node_enc") || !model.params.has("classifier"))
        throw std::invalid_argument("track_sequence: model is missing networks");

    SequenceResult result;
    std::vector<Detection> filtered = prefilter(detections, config.conf_min, config.nms_iou);
    if (filtered.empty()) return result;

    int min_frame = filtered.front().frame;
    for (auto const & d : filtered) min_frame = std::min(min_frame, d.frame);

    // fps subsampling onto consecutive step indices.
    int const stride = std::max(1, static_cast<int>(std::lround(native_fps / config.fps)));
    double const eff_fps = native_fps / stride;
    std::vector<Detection> sub;
    for (auto const & d : filtered) {
        int const rel = d.frame - min_frame;
        if (rel % stride != 0) continue;
        Detection copy = d;
        copy.source_frame = d.frame;
        copy.frame = rel / stride;
        sub.push_back(std::move(copy));
    }
    if (sub.empty()) return result;
    std::sort(sub.begin(), sub.end(), [](Detection const & a, Detection const & b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.id < b.id;
    });

    int n_steps = 0;
    for (auto const & d : sub) n_steps = std::max(n_steps, d.frame + 1);

    // Window starts; the stride is window - overlap (1 by default).
    std::vector<int> starts;
    if (n_steps <= config.window_frames) {
        starts.push_back(0);
    } else {
        int const step = config.window_frames - config.overlap_frames;
        for (int s = 0; s + config.window_frames <= n_steps; s += step) starts.push_back(s);
        if (starts.back() + config.window_frames < n_steps) starts.push_back(n_steps - config.window_frames);
    }
    result.diagnostics.windows = static_cast<int>(starts.size());

    int const L = model.config.message_steps;
    int const gap = std::min(config.max_frame_gap, config.window_frames);

    // Per-edge score accumulation keyed by global node indices.
    std::map<std::pair<int, int>, std::pair<double, int>> accum;
    for (int start : starts) {
        std::vector<Detection> local;
        std::vector<int> global_ids;
        for (int g = 0; g < static_cast<int>(sub.size()); ++g) {
            if (sub[g].frame < start || sub[g].frame >= start + config.window_frames) continue;
            Detection copy = sub[g];
            copy.frame -= start;
            local.push_back(std::move(copy));
            global_ids.push_back(g);
        }
        if (local.empty()) continue;
        TrackingGraph const wg = build_graph(local, gap, config.knn);
        if (wg.edges.empty()) continue;
        Tape tape;
        EmbeddingState state = encode_initial(tape, wg, nullptr, model, eff_fps);
        propagate(tape, state, wg, model, L);
        EdgeScores const scores = classify_edges(tape, state, model, L == 0 ? 0 : L, L);
        auto const & final_scores = scores.final_step();
        auto const window_thr = threshold(final_scores, wg, config.threshold_t);
        result.diagnostics.window_constraints += window_thr.report.total_constraints;
        result.diagnostics.window_violations += window_thr.report.violated;
        for (std::size_t e = 0; e < wg.edges.size(); ++e) {
            std::pair<int, int> const key{global_ids[wg.edges[e].src], global_ids[wg.edges[e].dst]};
            auto & slot = accum[key];
            slot.first += final_scores[e];
            slot.second += 1;
        }
    }
    if (result.diagnostics.window_constraints > 0)
        result.diagnostics.window_constraint_satisfaction =
            1.0 - static_cast<double>(result.diagnostics.window_violations) /
                      static_cast<double>(result.diagnostics.window_constraints);

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(accum.size());
    for (auto const & [key, sum_count] : accum) {
        pairs.push_back(key);
        if (sum_count.second > 1) ++result.diagnostics.averaged_edges;
    }
    result.diagnostics.union_edges = static_cast<std::int64_t>(pairs.size());

    TrackingGraph const union_graph = graph_from_edges(sub, pairs);
    FractionalSolution avg(union_graph.edges.size(), 0.0);
    for (std::size_t e = 0; e < union_graph.edges.size(); ++e) {
        auto const & edge = union_graph.edges[e];
        auto const & slot = accum.at({edge.src, edge.dst});
        avg[e] = slot.first / static_cast<double>(slot.second);
    }

    if (!union_graph.edges.empty()) {
        auto const thr = threshold(avg, union_graph, config.threshold_t);
        result.diagnostics.constraint_satisfaction = thr.report.satisfaction_ratio;
    }

    BinarySolution const solution = config.rounding == PipelineConfig::Rounding::Greedy
                                        ? greedy_round(avg, union_graph)
                                        : exact_round(avg, union_graph);
    std::vector<Trajectory> trajectories = extract_trajectories(union_graph, solution);

    // Back to source frames for output and evaluation.
    for (auto & traj : trajectories)
        for (auto & d : traj.detections) d.frame = d.source_frame;
    result.trajectories = postprocess(std::move(trajectories), config);
    result.union_graph = union_graph;
    result.averaged_scores = std::move(avg);
    return result;
}

}  // namespace mpntrack
