#include "mpntrack/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace mpntrack {

namespace {

constexpr double kScoreClamp = 1e-7;

struct FrameSpan {
    int min_frame = 0;
    int max_frame = 0;
};

FrameSpan frame_span(std::vector<Detection> const & dets) {
    FrameSpan s{dets.front().frame, dets.front().frame};
    for (auto const & d : dets) {
        s.min_frame = std::min(s.min_frame, d.frame);
        s.max_frame = std::max(s.max_frame, d.frame);
    }
    return s;
}

int stride_for(double native_fps, double target_fps) {
    return std::max(1, static_cast<int>(std::lround(native_fps / target_fps)));
}

// Clip-local detections for frames start, start + stride, ... Remaps frame
// to the step index and keeps the source frame.
std::vector<Detection> gather_clip(std::vector<Detection> const & dets, int start, int stride,
                                   int n_steps) {
    std::vector<Detection> out;
    for (auto const & d : dets) {
        int const rel = d.frame - start;
        if (rel < 0 || rel % stride != 0) continue;
        int const step = rel / stride;
        if (step >= n_steps) continue;
        Detection copy = d;
        copy.source_frame = d.frame;
        copy.frame = step;
        out.push_back(std::move(copy));
    }
    return out;
}

ClipGraph make_clip(std::vector<Detection> dets, double fps, TrainConfig const & config) {
    ClipGraph clip;
    clip.fps = fps;
    clip.max_frame_gap = std::min(config.max_frame_gap, config.clip_frames);
    clip.knn = config.knn;
    clip.graph = build_graph(dets, clip.max_frame_gap, clip.knn);
    clip.labels = ground_truth_labels(clip.graph);
    return clip;
}

}  // namespace

ClipGraph sample_clip(Sequence const & sequence, TrainConfig const & config, Rng & rng) {
    if (sequence.detections.empty()) throw std::invalid_argument("sample_clip: empty sequence");
    double const target = sequence.moving_camera ? config.fps_moving : config.fps_static;
    int const stride = stride_for(sequence.native_fps, target);
    double const eff_fps = sequence.native_fps / stride;
    int const span = (config.clip_frames - 1) * stride;

    FrameSpan const fs = frame_span(sequence.detections);
    if (fs.max_frame - fs.min_frame < span)
        throw std::invalid_argument("sample_clip: sequence too short for clip span");

    for (int attempt = 0; attempt < 100; ++attempt) {
        int const start = rng.uniform_int(fs.min_frame, fs.max_frame - span);
        auto dets = gather_clip(sequence.detections, start, stride, config.clip_frames);
        if (dets.empty()) continue;
        return make_clip(std::move(dets), eff_fps, config);
    }
    throw std::runtime_error("sample_clip: no detections in any sampled clip");
}

ClipGraph augment(ClipGraph const & clip, Rng & rng, double drop_prob, double jitter_scale) {
    if (drop_prob < 0.0 || drop_prob > 1.0)
        throw std::invalid_argument("augment: drop_prob must be in [0, 1]");
    for (int attempt = 0; attempt < 20; ++attempt) {
        std::vector<Detection> kept;
        for (auto const & d : clip.graph.nodes)
            if (!(rng.uniform() < drop_prob)) kept.push_back(d);
        if (kept.empty()) continue;  // fully emptied clip: redraw
        for (auto & d : kept) {
            d.box.x += jitter_scale * d.box.w * rng.normal();
            d.box.y += jitter_scale * d.box.h * rng.normal();
        }
        ClipGraph out;
        out.fps = clip.fps;
        out.max_frame_gap = clip.max_frame_gap;
        out.knn = clip.knn;
        out.graph = build_graph(kept, clip.max_frame_gap, clip.knn);
        out.labels = ground_truth_labels(out.graph);
        return out;
    }
    return clip;
}

double bce_loss(EdgeScores const & scores, EdgeLabels const & labels, double w) {
    if (w <= 0.0) throw std::invalid_argument("bce_loss: w must be positive");
    std::size_t const n_edges = labels.values.size();
    if (n_edges == 0) return 0.0;
    double total = 0.0;
    for (auto const & step : scores.scores) {
        if (step.size() != n_edges) throw std::invalid_argument("bce_loss: score/label size mismatch");
        for (std::size_t e = 0; e < n_edges; ++e) {
            double const y = labels.values[e] ? 1.0 : 0.0;
            double const s = std::clamp(step[e], kScoreClamp, 1.0 - kScoreClamp);
            total += -(w * y * std::log(s) + (1.0 - y) * std::log(1.0 - s));
        }
    }
    return total / static_cast<double>(n_edges);
}

double bce_loss_and_seed(Tape & tape, EdgeScores const & scores, EdgeLabels const & labels, double w,
                         double scale) {
    double const loss = bce_loss(scores, labels, w);
    std::size_t const n_edges = labels.values.size();
    if (n_edges == 0) return loss;
    double const inv_e = 1.0 / static_cast<double>(n_edges);
    for (std::size_t step = 0; step < scores.value_ids.size(); ++step) {
        for (std::size_t e = 0; e < n_edges; ++e) {
            double const y = labels.values[e] ? 1.0 : 0.0;
            double const s = scores.scores[step][e];
            // Where the clamp binds the computed loss is constant in the
            // score, so a saturated edge contributes no gradient.
            if (s <= kScoreClamp || s >= 1.0 - kScoreClamp) continue;
            double const g = inv_e * (-w * y / s + (1.0 - y) / (1.0 - s));
            tape.seed_scalar(scores.value_ids[step][e], g * scale);
        }
    }
    return loss;
}

double positive_weight(std::vector<EdgeLabels const *> const & batch, bool * warned) {
    std::int64_t pos = 0, neg = 0;
    for (auto const * labels : batch)
        for (auto v : labels->values) (v ? pos : neg) += 1;
    if (warned) *warned = false;
    if (pos == 0 || neg == 0) {
        if (warned) *warned = true;
        std::cerr << "positive_weight: degenerate batch (" << pos << " positive, " << neg
                  << " negative), falling back to w = 1\n";
        return 1.0;
    }
    return static_cast<double>(neg) / static_cast<double>(pos);
}

std::vector<ClipGraph> holdout_clips(std::vector<Sequence> const & dataset, TrainConfig const & config) {
    std::vector<ClipGraph> clips;
    for (auto const & seq : dataset) {
        if (seq.detections.empty()) continue;
        double const target = seq.moving_camera ? config.fps_moving : config.fps_static;
        int const stride = stride_for(seq.native_fps, target);
        FrameSpan const fs = frame_span(seq.detections);
        int const n_frames = fs.max_frame - fs.min_frame + 1;
        int const holdout_start =
            fs.min_frame + static_cast<int>(std::floor((1.0 - config.holdout_fraction) * n_frames));
        int const steps = (fs.max_frame - holdout_start) / stride + 1;
        if (steps < 2) continue;
        auto dets = gather_clip(seq.detections, holdout_start, stride, steps);
        if (dets.empty()) continue;
        ClipGraph clip;
        clip.fps = seq.native_fps / stride;
        clip.max_frame_gap = std::min(config.max_frame_gap, config.clip_frames);
        clip.knn = config.knn;
        clip.graph = build_graph(dets, clip.max_frame_gap, clip.knn);
        clip.labels = ground_truth_labels(clip.graph);
        if (!clip.graph.edges.empty()) clips.push_back(std::move(clip));
    }
    return clips;
}

EdgeEval evaluate_edges(Model & model, std::vector<ClipGraph> const & clips) {
    EdgeEval eval;
    std::int64_t correct = 0;
    std::int64_t violated = 0, constraints = 0;
    int const L = model.config.message_steps;
    for (auto const & clip : clips) {
        Tape tape;
        EmbeddingState state = encode_initial(tape, clip.graph, nullptr, model, clip.fps);
        propagate(tape, state, clip.graph, model, L);
        EdgeScores scores = classify_edges(tape, state, model, L == 0 ? 0 : L, L);
        auto const & final_scores = scores.final_step();
        EdgeLabels predicted;
        predicted.values.resize(final_scores.size());
        for (std::size_t e = 0; e < final_scores.size(); ++e) {
            predicted.values[e] = final_scores[e] >= 0.5 ? 1 : 0;
            if (predicted.values[e] == clip.labels.values[e]) ++correct;
        }
        eval.edges += static_cast<std::int64_t>(final_scores.size());
        auto const report = check_flow_constraints(clip.graph, predicted);
        violated += report.violated;
        constraints += report.total_constraints;
    }
    eval.accuracy = eval.edges > 0 ? static_cast<double>(correct) / static_cast<double>(eval.edges) : 0.0;
    eval.constraint_satisfaction =
        constraints > 0 ? 1.0 - static_cast<double>(violated) / static_cast<double>(constraints) : 1.0;
    return eval;
}

void scale_classifier_into_band(Model & model, ClipGraph const & clip, double lo, double hi) {
    int const L = model.config.message_steps;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Tape tape;
        EmbeddingState state = encode_initial(tape, clip.graph, nullptr, model, clip.fps);
        propagate(tape, state, clip.graph, model, L);
        EdgeScores const scores = classify_edges(tape, state, model, L == 0 ? 0 : 1, L);
        bool inside = true;
        for (auto const & step : scores.scores)
            for (double s : step) inside = inside && s > lo && s < hi;
        if (inside) return;
        DenseLayer & head = model.params.net("classifier").layers.back();
        for (double & w : head.w) w *= 0.5;
        for (double & b : head.b) b *= 0.5;
    }
    throw std::runtime_error("scale_classifier_into_band: could not reach the target band");
}

TrainResult train(std::vector<Sequence> const & dataset, TrainConfig const & config) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    for (auto const & seq : dataset)
        if (seq.detections.empty()) throw std::invalid_argument("train: empty sequence");

    int appearance_dim = 0;
    for (auto const & seq : dataset)
        for (auto const & det : seq.detections) {
            if (appearance_dim == 0) appearance_dim = static_cast<int>(det.appearance.size());
            if (static_cast<int>(det.appearance.size()) != appearance_dim)
                throw std::invalid_argument("train: inconsistent appearance dimension");
        }
    if (appearance_dim == 0)
        throw std::invalid_argument("train: detections carry no appearance vectors");

    ModelConfig mc;
    mc.mode = config.mode;
    mc.feature_set = config.feature_set;
    mc.appearance_dim = appearance_dim;
    mc.message_steps = config.message_steps;
    mc.supervise_from = config.supervise_from;
    mc.shared_weights = config.shared_weights;

    Rng init_rng = Rng::substream(config.seed, 0);
    TrainResult result{make_model(mc, init_rng), Model{}, 0.0, {}};
    result.best = result.model;
    if (config.iterations == 0) return result;

    // Training clips come from the leading (1 - holdout) part of each
    // sequence; the trailing part is only ever used for monitoring.
    std::vector<Sequence> train_split;
    for (auto const & seq : dataset) {
        FrameSpan const fs = frame_span(seq.detections);
        int const n_frames = fs.max_frame - fs.min_frame + 1;
        int const cut =
            fs.min_frame + static_cast<int>(std::floor((1.0 - config.holdout_fraction) * n_frames));
        Sequence s;
        s.native_fps = seq.native_fps;
        s.moving_camera = seq.moving_camera;
        for (auto const & d : seq.detections)
            if (d.frame < cut) s.detections.push_back(d);
        if (!s.detections.empty()) train_split.push_back(std::move(s));
    }
    if (train_split.empty()) throw std::invalid_argument("train: holdout split left no training data");

    std::vector<ClipGraph> const monitor = holdout_clips(dataset, config);
    int const L = config.message_steps;
    int const l0 = result.model.config.default_l0();

    auto const t_start = std::chrono::steady_clock::now();
    auto wall_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                     t_start)
            .count();
    };

    for (int iter = 1; iter <= config.iterations; ++iter) {
        std::vector<ClipGraph> batch;
        for (int b = 0; b < config.batch_graphs; ++b) {
            std::uint64_t const clip_index =
                static_cast<std::uint64_t>(iter - 1) * static_cast<std::uint64_t>(config.batch_graphs) +
                static_cast<std::uint64_t>(b);
            Rng rng = Rng::substream(config.seed + 1, clip_index);
            for (int attempt = 0; attempt < 20; ++attempt) {
                std::size_t const seq_idx =
                    train_split.size() == 1
                        ? 0
                        : static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(train_split.size()) - 1));
                ClipGraph clip = augment(sample_clip(train_split[seq_idx], config, rng), rng,
                                         config.drop_prob, config.jitter_scale);
                if (!clip.graph.edges.empty()) {
                    batch.push_back(std::move(clip));
                    break;
                }
            }
        }
        if (batch.empty()) throw std::runtime_error("train: could not sample any usable clip");

        std::vector<EdgeLabels const *> label_ptrs;
        for (auto const & clip : batch) label_ptrs.push_back(&clip.labels);
        double const w = config.positive_weight_override > 0.0 ? config.positive_weight_override
                                                               : positive_weight(label_ptrs);

        double loss = 0.0;
        double const scale = 1.0 / static_cast<double>(batch.size());
        for (auto const & clip : batch) {
            Tape tape;
            EmbeddingState state = encode_initial(tape, clip.graph, nullptr, result.model, clip.fps);
            propagate(tape, state, clip.graph, result.model, L);
            EdgeScores scores = classify_edges(tape, state, result.model, l0, L);
            loss += scale * bce_loss_and_seed(tape, scores, clip.labels, w, scale);
            tape.backward();
        }
        if (!std::isfinite(loss))
            throw std::runtime_error("train: loss diverged (NaN/inf) at iteration " + std::to_string(iter));

        adam_step(result.model.params, config.learning_rate, config.beta1, config.beta2, 1e-8,
                  config.weight_decay);

        if (iter % config.log_interval == 0 || iter == config.iterations) {
            EdgeEval const eval = evaluate_edges(result.model, monitor);
            result.log.push_back(TrainLogRow{iter, loss, eval.accuracy, eval.constraint_satisfaction,
                                             wall_ms()});
            if (eval.accuracy > result.best_edge_accuracy) {
                result.best_edge_accuracy = eval.accuracy;
                result.best = result.model;
            }
        }
    }
    if (result.best_edge_accuracy == 0.0) result.best = result.model;
    return result;
}

}  // namespace mpntrack
