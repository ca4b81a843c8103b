#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpntrack/ablation.hpp"
#include "mpntrack/encoders.hpp"
#include "mpntrack/io.hpp"
#include "mpntrack/metrics.hpp"
#include "mpntrack/pipeline.hpp"
#include "mpntrack/rounding.hpp"
#include "mpntrack/synthetic.hpp"
#include "mpntrack/trainer.hpp"

namespace {

constexpr char kVersion[] = "0.1.0";

using nlohmann::json;
using namespace mpntrack;

// Every command that writes outputs drops a sidecar with the full
// configuration echo, so runs can be reproduced from the artifacts alone.
void write_run_info(std::string const & out_path, std::string const & command, json config) {
    config["command"] = command;
    config["version"] = kVersion;
    std::ofstream out(out_path + ".run.json");
    out << config.dump(2) << "\n";
}

json pipeline_json(PipelineConfig const & cfg) {
    return json{{"window_frames", cfg.window_frames},
                {"overlap_frames", cfg.overlap_frames},
                {"fps", cfg.fps},
                {"knn", cfg.knn},
                {"max_frame_gap", cfg.max_frame_gap},
                {"threshold", cfg.threshold_t},
                {"rounding", cfg.rounding == PipelineConfig::Rounding::Greedy ? "greedy" : "exact"},
                {"conf_min", cfg.conf_min},
                {"nms_iou", cfg.nms_iou},
                {"interpolate", cfg.interpolate},
                {"drop_singletons", cfg.drop_singletons}};
}

json train_json(TrainConfig const & cfg) {
    return json{{"iterations", cfg.iterations},
                {"learning_rate", cfg.learning_rate},
                {"weight_decay", cfg.weight_decay},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"batch_graphs", cfg.batch_graphs},
                {"clip_frames", cfg.clip_frames},
                {"fps_static", cfg.fps_static},
                {"fps_moving", cfg.fps_moving},
                {"message_steps", cfg.message_steps},
                {"supervise_from", cfg.supervise_from},
                {"mode", to_string(cfg.mode)},
                {"feature_set", to_string(cfg.feature_set)},
                {"max_frame_gap", cfg.max_frame_gap},
                {"knn", cfg.knn},
                {"drop_prob", cfg.drop_prob},
                {"jitter_scale", cfg.jitter_scale},
                {"holdout_fraction", cfg.holdout_fraction},
                {"log_interval", cfg.log_interval},
                {"seed", cfg.seed}};
}

// Key=value config file mirroring the training flags; command-line values
// win over file values.
void apply_config_file(std::string const & path, TrainConfig & cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config line missing '=': " + line);
        std::string const key = line.substr(0, eq);
        std::string const value = line.substr(eq + 1);
        if (key == "iterations") cfg.iterations = std::stoi(value);
        else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
        else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
        else if (key == "beta1") cfg.beta1 = std::stod(value);
        else if (key == "beta2") cfg.beta2 = std::stod(value);
        else if (key == "batch_graphs") cfg.batch_graphs = std::stoi(value);
        else if (key == "clip_frames") cfg.clip_frames = std::stoi(value);
        else if (key == "fps_static") cfg.fps_static = std::stod(value);
        else if (key == "fps_moving") cfg.fps_moving = std::stod(value);
        else if (key == "message_steps") cfg.message_steps = std::stoi(value);
        else if (key == "supervise_from") cfg.supervise_from = std::stoi(value);
        else if (key == "mode") cfg.mode = update_mode_from_string(value);
        else if (key == "feature_set") cfg.feature_set = feature_set_from_string(value);
        else if (key == "max_frame_gap") cfg.max_frame_gap = std::stoi(value);
        else if (key == "knn") cfg.knn = std::stoi(value);
        else if (key == "drop_prob") cfg.drop_prob = std::stod(value);
        else if (key == "jitter_scale") cfg.jitter_scale = std::stod(value);
        else if (key == "holdout_fraction") cfg.holdout_fraction = std::stod(value);
        else if (key == "log_interval") cfg.log_interval = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else throw std::runtime_error("unknown config key: " + key);
    }
}

void write_train_log(std::string const & path, std::vector<TrainLogRow> const & rows) {
    std::ofstream out(path);
    out << "iteration,loss,edge_accuracy,constraint_satisfaction,wall_ms\n";
    char buf[160];
    for (auto const & r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.8f,%.6f,%.6f,%lld\n", r.iteration, r.loss,
                      r.edge_accuracy, r.constraint_satisfaction, static_cast<long long>(r.wall_ms));
        out << buf;
    }
}

AppearanceProvider make_provider(std::string const & appearance_file, int synthetic_dim,
                                 double synthetic_sigma, std::uint64_t seed) {
    if (!appearance_file.empty()) return AppearanceProvider::from_file(appearance_file);
    return AppearanceProvider::synthetic(synthetic_dim, synthetic_sigma, seed);
}

void print_metrics_table(std::vector<std::pair<std::string, EvalResult>> const & rows,
                         std::vector<double> const & constr, std::ostream & out) {
    out << "sequence        MOTA    IDF1      MT    ML      FP      FN   IDSW  Constr\n";
    char buf[200];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto const & [name, r] = rows[i];
        std::string cs = "     -";
        if (i < constr.size() && constr[i] >= 0.0) {
            char tmp[16];
            std::snprintf(tmp, sizeof(tmp), "%6.1f", 100.0 * constr[i]);
            cs = tmp;
        }
        std::snprintf(buf, sizeof(buf), "%-12s %7.1f %7.1f %7d %5d %7lld %7lld %6lld  %s\n", name.c_str(),
                      100.0 * r.mota, 100.0 * r.idf1, r.mt, r.ml, static_cast<long long>(r.fp),
                      static_cast<long long>(r.fn), static_cast<long long>(r.idsw), cs.c_str());
        out << buf;
    }
}

void write_metrics_csv(std::string const & path, std::vector<std::pair<std::string, EvalResult>> const & rows,
                       std::vector<double> const & constr) {
    std::ofstream out(path);
    out << "sequence,mota,idf1,mt,ml,fp,fn,idsw,constr\n";
    char buf[240];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto const & [name, r] = rows[i];
        std::string cs;
        if (i < constr.size() && constr[i] >= 0.0) {
            char tmp[24];
            std::snprintf(tmp, sizeof(tmp), "%.4f", constr[i]);
            cs = tmp;
        }
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%d,%d,%lld,%lld,%lld,%s\n", name.c_str(), r.mota,
                      r.idf1, r.mt, r.ml, static_cast<long long>(r.fp), static_cast<long long>(r.fn),
                      static_cast<long long>(r.idsw), cs.c_str());
        out << buf;
    }
}

int cmd_synth(std::string const & out_dir, SyntheticConfig const & cfg) {
    std::filesystem::create_directories(out_dir);
    auto const data = generate_synthetic(cfg);
    auto const det_path = out_dir + "/det.txt";
    write_detections(det_path, data.detections);
    write_results(out_dir + "/gt.txt", data.ground_truth);
    write_appearance(out_dir + "/appearance.csv", data.detections);

    // Embeddings for the ground-truth boxes, keyed by the id order that
    // reading gt.txt back produces; this is the training-time counterpart
    // of appearance.csv.
    auto gt_dets = detections_from_ground_truth(data.ground_truth);
    synthetic_appearance_provider(cfg).apply(gt_dets);
    write_appearance(out_dir + "/gt_appearance.csv", gt_dets);

    json meta{{"n_tracks", cfg.n_tracks},      {"n_frames", cfg.n_frames},
              {"native_fps", cfg.native_fps},  {"miss_prob", cfg.miss_prob},
              {"fp_rate", cfg.fp_rate},        {"appearance_sigma", cfg.appearance_sigma},
              {"appearance_dim", cfg.appearance_dim}, {"box_jitter", cfg.box_jitter},
              {"image_width", cfg.image_width}, {"image_height", cfg.image_height},
              {"seed", cfg.seed}};
    std::ofstream(out_dir + "/meta.json") << meta.dump(2) << "\n";
    write_run_info(det_path, "synth", meta);
    std::cout << "wrote " << data.detections.size() << " detections / " << data.ground_truth.size()
              << " tracks to " << out_dir << "\n";
    return 0;
}

int cmd_train(std::string const & gt_path, std::string const & appearance_file, double native_fps,
              bool moving, TrainConfig const & cfg, int synthetic_dim, double synthetic_sigma,
              std::string const & out_path, std::string const & log_path) {
    auto const gt = read_ground_truth(gt_path);
    if (gt.empty()) throw std::runtime_error("train: ground truth is empty");
    Sequence seq;
    seq.detections = detections_from_ground_truth(gt);
    seq.native_fps = native_fps;
    seq.moving_camera = moving;
    auto const provider = make_provider(appearance_file, synthetic_dim, synthetic_sigma, cfg.seed);
    provider.apply(seq.detections);

    auto const result = train({seq}, cfg);
    save_checkpoint(out_path, result.best);
    save_checkpoint(out_path + ".final", result.model);
    if (!log_path.empty()) write_train_log(log_path, result.log);
    write_run_info(out_path, "train", train_json(cfg));
    std::cout << "trained " << cfg.iterations << " iterations; best held-out edge accuracy "
              << result.best_edge_accuracy << "\n";
    return 0;
}

int cmd_track(std::string const & det_path, std::string const & appearance_file,
              std::string const & params_path, std::string const & out_path, double native_fps,
              PipelineConfig const & cfg, double synthetic_sigma, std::uint64_t seed,
              std::string const & diagnostics_path, std::string const & dump_edges) {
    auto detections = read_detections(det_path);
    Model model = load_checkpoint(params_path);
    auto const provider =
        make_provider(appearance_file, model.config.appearance_dim, synthetic_sigma, seed);
    provider.apply(detections);

    auto const result = track_sequence(detections, native_fps, model, cfg);
    write_results(out_path, result.trajectories);

    json diag{{"windows", result.diagnostics.windows},
              {"union_edges", result.diagnostics.union_edges},
              {"averaged_edges", result.diagnostics.averaged_edges},
              {"constraint_satisfaction", result.diagnostics.constraint_satisfaction},
              {"window_constraint_satisfaction",
               result.diagnostics.window_constraint_satisfaction},
              {"window_constraints", result.diagnostics.window_constraints},
              {"window_violations", result.diagnostics.window_violations},
              {"trajectories", result.trajectories.size()}};
    if (!diagnostics_path.empty()) std::ofstream(diagnostics_path) << diag.dump(2) << "\n";
    if (!dump_edges.empty())
        write_scored_edges(dump_edges, result.union_graph, result.averaged_scores);

    json info = pipeline_json(cfg);
    info["detections"] = det_path;
    info["params"] = params_path;
    info["native_fps"] = native_fps;
    info["seed"] = seed;
    write_run_info(out_path, "track", info);
    std::cout << "tracked " << result.trajectories.size() << " trajectories over "
              << result.diagnostics.windows << " windows (constraint satisfaction "
              << result.diagnostics.constraint_satisfaction << ")\n";
    return 0;
}

int cmd_eval(std::string const & gt_path, std::string const & pred_path, double iou_min,
             std::string const & csv_path, std::string const & diagnostics_path) {
    auto const gt = read_ground_truth(gt_path);
    auto const pred = read_ground_truth(pred_path);
    auto const r = evaluate(gt, pred, iou_min);
    double constr = -1.0;
    if (!diagnostics_path.empty()) {
        std::ifstream in(diagnostics_path);
        if (!in) throw std::runtime_error("cannot open diagnostics: " + diagnostics_path);
        json diag = json::parse(in);
        constr = diag.value("constraint_satisfaction", -1.0);
    }
    std::vector<std::pair<std::string, EvalResult>> rows{{"overall", r}};
    print_metrics_table(rows, {constr}, std::cout);
    if (!csv_path.empty()) write_metrics_csv(csv_path, rows, {constr});
    return 0;
}

int cmd_round(std::string const & edges_path, std::string const & method, std::string const & out_path,
              std::string const & dump_violated) {
    auto const input = read_scored_edges(edges_path);
    BinarySolution const sol = method == "greedy" ? greedy_round(input.scores, input.graph)
                                                  : exact_round(input.scores, input.graph);
    if (!dump_violated.empty()) {
        // Violated subgraph with the labels the rounder finally chose.
        auto const sub = violated_subgraph(input.scores, input.graph);
        std::vector<std::pair<int, int>> pairs;
        for (int e : sub.edge_ids)
            pairs.emplace_back(input.graph.edges[e].src, input.graph.edges[e].dst);
        auto const sub_graph = graph_from_edges(input.graph.nodes, pairs);
        // graph_from_edges re-sorts; restore scores/labels by key lookup.
        std::vector<double> sub_scores(sub_graph.edges.size(), 0.0);
        std::vector<std::uint8_t> sub_labels(sub_graph.edges.size(), 0);
        for (std::size_t s = 0; s < sub.edge_ids.size(); ++s) {
            auto const & e = input.graph.edges[sub.edge_ids[s]];
            for (std::size_t k = 0; k < sub_graph.edges.size(); ++k)
                if (sub_graph.edges[k].src == e.src && sub_graph.edges[k].dst == e.dst) {
                    sub_scores[k] = sub.scores[s];
                    sub_labels[k] = sol.labels[static_cast<std::size_t>(sub.edge_ids[s])];
                }
        }
        write_scored_edges(dump_violated, sub_graph, sub_scores, sub_labels);
    }
    write_scored_edges(out_path, input.graph, input.scores, sol.labels);
    write_run_info(out_path, "round", json{{"edges", edges_path}, {"method", method}});
    std::cout << "rounded " << input.graph.edges.size() << " edges (objective "
              << rounding_objective(input.scores, sol.labels) << ")\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, int samples, double h, double tolerance) {
    SyntheticConfig scfg;
    scfg.n_tracks = 3;
    scfg.n_frames = 8;
    scfg.appearance_sigma = 0.2;
    scfg.appearance_dim = 8;
    scfg.seed = seed;
    auto const data = generate_synthetic(scfg);
    Sequence seq;
    seq.detections = data.detections;
    seq.native_fps = 6.0;

    bool ok = true;
    for (UpdateMode mode : {UpdateMode::TimeAware, UpdateMode::Vanilla}) {
        TrainConfig tcfg;
        tcfg.clip_frames = 4;
        tcfg.max_frame_gap = 3;
        tcfg.knn = 3;
        tcfg.message_steps = 2;
        tcfg.mode = mode;
        Rng rng(seed + 1);
        auto const clip = sample_clip(seq, tcfg, rng);

        ModelConfig mc;
        mc.mode = mode;
        mc.appearance_dim = 8;
        mc.message_steps = 2;
        mc.supervise_from = 1;
        Rng init(seed + 2);
        Model model = make_model(mc, init);
        perturb_biases(model.params, 1e-3, seed + 3);
        scale_classifier_into_band(model, clip);

        auto loss_fn = [&](bool want_grad) {
            Tape tape;
            EmbeddingState state = encode_initial(tape, clip.graph, nullptr, model, clip.fps);
            propagate(tape, state, clip.graph, model, 2);
            EdgeScores scores = classify_edges(tape, state, model, 1, 2);
            if (!want_grad) return bce_loss(scores, clip.labels, 3.0);
            double const loss = bce_loss_and_seed(tape, scores, clip.labels, 3.0);
            tape.backward();
            return loss;
        };
        auto const report = grad_check(model.params, loss_fn, static_cast<std::size_t>(samples), h);
        bool const pass = report.max_rel_error <= tolerance;
        ok = ok && pass;
        std::printf("%-10s max rel error %.3e (abs %.3e, %zu checked, %zu kink-skipped): %s\n",
                    to_string(mode).c_str(), report.max_rel_error, report.max_abs_error, report.checked,
                    report.skipped_kinks, pass ? "PASS" : "FAIL");
    }
    return ok ? 0 : 1;
}

int cmd_ablate(std::string const & mode, std::string const & out_dir, std::uint64_t dataset_seed,
               int iterations, int n_seeds, std::vector<int> const & l_values) {
    std::filesystem::create_directories(out_dir);
    auto const bench = ablation_benchmark_config(dataset_seed);
    auto const dataset = make_ablation_dataset(bench, 0.2);
    auto const pipe = ablation_pipeline_config();

    auto run_one = [&](TrainConfig cfg) {
        cfg.iterations = iterations;
        return run_ablation(dataset, cfg, pipe);
    };

    if (mode == "arch") {
        std::string const csv = out_dir + "/ablation_arch.csv";
        std::ofstream out(csv);
        out << "arch,seed,mota,idf1,idsw,constr,edge_accuracy\n";
        for (int s = 0; s < n_seeds; ++s)
            for (UpdateMode m : {UpdateMode::Vanilla, UpdateMode::TimeAware}) {
                auto const r = run_one(ablation_train_config(m, 100 + static_cast<std::uint64_t>(s)));
                char buf[200];
                std::snprintf(buf, sizeof(buf), "%s,%d,%.4f,%.4f,%lld,%.4f,%.4f\n", to_string(m).c_str(),
                              s, r.tracking.mota, r.tracking.idf1, static_cast<long long>(r.tracking.idsw),
                              r.constraint_satisfaction, r.edge_accuracy);
                out << buf;
                std::cout << to_string(m) << " seed " << s << ": MOTA " << r.tracking.mota << " IDF1 "
                          << r.tracking.idf1 << " IDSW " << r.tracking.idsw << " Constr "
                          << r.constraint_satisfaction << "\n";
            }
        write_run_info(csv, "ablate", json{{"mode", mode}, {"dataset_seed", dataset_seed},
                                           {"iterations", iterations}, {"seeds", n_seeds}});
    } else if (mode == "depth") {
        std::string const csv = out_dir + "/ablation_depth.csv";
        std::ofstream out(csv);
        out << "L,mota,idf1,idsw,edge_accuracy\n";
        for (int L : l_values) {
            TrainConfig cfg = ablation_train_config(UpdateMode::TimeAware, 100);
            cfg.message_steps = L;
            auto const r = run_one(cfg);
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%d,%.4f,%.4f,%lld,%.4f\n", L, r.tracking.mota,
                          r.tracking.idf1, static_cast<long long>(r.tracking.idsw), r.edge_accuracy);
            out << buf;
            std::cout << "L=" << L << ": MOTA " << r.tracking.mota << " IDF1 " << r.tracking.idf1
                      << " edge accuracy " << r.edge_accuracy << "\n";
        }
        write_run_info(csv, "ablate", json{{"mode", mode}, {"dataset_seed", dataset_seed},
                                           {"iterations", iterations}, {"L", l_values}});
    } else if (mode == "features") {
        std::string const csv = out_dir + "/ablation_features.csv";
        std::ofstream out(csv);
        out << "features,mota,idf1,idsw,edge_accuracy\n";
        for (FeatureSet fs : {FeatureSet::Time, FeatureSet::TimePos, FeatureSet::TimePosApp}) {
            TrainConfig cfg = ablation_train_config(UpdateMode::TimeAware, 100);
            cfg.feature_set = fs;
            auto const r = run_one(cfg);
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%lld,%.4f\n", to_string(fs).c_str(),
                          r.tracking.mota, r.tracking.idf1, static_cast<long long>(r.tracking.idsw),
                          r.edge_accuracy);
            out << buf;
            std::cout << to_string(fs) << ": MOTA " << r.tracking.mota << " IDF1 " << r.tracking.idf1
                      << " IDSW " << r.tracking.idsw << "\n";
        }
        write_run_info(csv, "ablate", json{{"mode", mode}, {"dataset_seed", dataset_seed},
                                           {"iterations", iterations}});
    } else {
        throw std::runtime_error("unknown ablate mode: " + mode);
    }
    return 0;
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Graph-based multi-object tracking via message passing edge classification"};
    app.require_subcommand(1);

    // synth
    auto * synth = app.add_subcommand("synth", "Generate a synthetic labeled sequence");
    std::string synth_out = "dataset";
    SyntheticConfig scfg;
    synth->add_option("--out-dir", synth_out, "Output directory");
    synth->add_option("--tracks", scfg.n_tracks);
    synth->add_option("--frames", scfg.n_frames);
    synth->add_option("--fps", scfg.native_fps);
    synth->add_option("--miss", scfg.miss_prob);
    synth->add_option("--fp-rate", scfg.fp_rate);
    synth->add_option("--sigma", scfg.appearance_sigma);
    synth->add_option("--app-dim", scfg.appearance_dim);
    synth->add_option("--jitter", scfg.box_jitter);
    synth->add_option("--width", scfg.image_width);
    synth->add_option("--height", scfg.image_height);
    synth->add_option("--seed", scfg.seed);

    // train
    auto * tr = app.add_subcommand("train", "Train a model on annotated trajectories");
    std::string train_gt, train_app, train_out = "model.ckpt", train_log, train_config_file;
    double train_fps = 6.0, train_syn_sigma = 0.1;
    int train_syn_dim = 32;
    bool train_moving = false;
    TrainConfig tcfg;
    tr->add_option("--gt", train_gt, "Ground-truth MOT file")->required();
    tr->add_option("--appearance", train_app, "Appearance CSV (omit for synthetic embeddings)");
    tr->add_option("--out", train_out, "Checkpoint path (best model; .final is also written)");
    tr->add_option("--log", train_log, "Training log CSV");
    tr->add_option("--config", train_config_file, "key=value config file");
    tr->add_option("--native-fps", train_fps);
    tr->add_flag("--moving", train_moving, "Sequence has a moving camera");
    tr->add_option("--synthetic-dim", train_syn_dim, "Synthetic appearance dimension");
    tr->add_option("--synthetic-sigma", train_syn_sigma, "Synthetic appearance noise");
    tr->add_option("--iterations", tcfg.iterations);
    tr->add_option("--lr", tcfg.learning_rate);
    tr->add_option("--weight-decay", tcfg.weight_decay);
    tr->add_option("--batch-graphs", tcfg.batch_graphs);
    tr->add_option("--clip-frames", tcfg.clip_frames);
    tr->add_option("--fps-static", tcfg.fps_static);
    tr->add_option("--fps-moving", tcfg.fps_moving);
    tr->add_option("-L,--message-steps", tcfg.message_steps);
    tr->add_option("--l0,--supervise-from", tcfg.supervise_from);
    std::string train_mode = "time_aware", train_features = "time+pos+app";
    tr->add_option("--mode", train_mode, "vanilla | time_aware");
    tr->add_option("--features", train_features, "time | time+pos | time+pos+app");
    tr->add_option("--gap", tcfg.max_frame_gap);
    tr->add_option("--knn", tcfg.knn);
    tr->add_option("--drop-prob", tcfg.drop_prob);
    tr->add_option("--jitter", tcfg.jitter_scale);
    tr->add_option("--holdout", tcfg.holdout_fraction);
    tr->add_option("--log-interval", tcfg.log_interval);
    tr->add_option("--seed", tcfg.seed);

    // track
    auto * tk = app.add_subcommand("track", "Run inference over a detection file");
    std::string track_det, track_app, track_params, track_out = "results.txt", track_diag, track_dump;
    double track_fps = 6.0, track_syn_sigma = 0.1;
    std::uint64_t track_seed = 7;
    std::string track_rounding = "exact";
    PipelineConfig pcfg;
    tk->add_option("--in,--det", track_det, "Detection MOT file")->required();
    tk->add_option("--appearance", track_app, "Appearance CSV (omit for synthetic embeddings)");
    tk->add_option("--params", track_params, "Checkpoint")->required();
    tk->add_option("--out", track_out, "Results MOT file");
    tk->add_option("--native-fps", track_fps);
    tk->add_option("--fps", pcfg.fps, "Target sampling fps");
    tk->add_option("--window", pcfg.window_frames);
    tk->add_option("--overlap", pcfg.overlap_frames);
    tk->add_option("--knn", pcfg.knn);
    tk->add_option("--gap", pcfg.max_frame_gap);
    tk->add_option("--threshold", pcfg.threshold_t);
    tk->add_option("--rounding", track_rounding, "greedy | exact");
    tk->add_option("--conf-min", pcfg.conf_min);
    tk->add_option("--nms-iou", pcfg.nms_iou);
    bool no_interp = false, keep_singletons = false;
    tk->add_flag("--no-interpolate", no_interp);
    tk->add_flag("--keep-singletons", keep_singletons);
    tk->add_option("--diagnostics", track_diag, "Diagnostics JSON path");
    tk->add_option("--dump-edges", track_dump, "Write the averaged scored-edge file");
    tk->add_option("--synthetic-sigma", track_syn_sigma);
    tk->add_option("--seed", track_seed);

    // eval
    auto * ev = app.add_subcommand("eval", "Evaluate a result file against ground truth");
    std::string eval_gt, eval_pred, eval_csv, eval_diag;
    double eval_iou = 0.5;
    ev->add_option("--gt", eval_gt)->required();
    ev->add_option("--pred", eval_pred)->required();
    ev->add_option("--iou", eval_iou);
    ev->add_option("--csv", eval_csv, "Also write the table as CSV");
    ev->add_option("--diagnostics", eval_diag, "Tracker diagnostics JSON (fills the Constr column)");

    // round
    auto * rd = app.add_subcommand("round", "Round a scored-edge file into a feasible labeling");
    std::string round_in, round_out = "rounded.txt", round_method = "exact", round_dump;
    rd->add_option("--edges", round_in)->required();
    rd->add_option("--method", round_method, "greedy | exact");
    rd->add_option("--out", round_out);
    rd->add_option("--dump-violated", round_dump, "Write the violated subgraph edge list");

    // gradcheck
    auto * gc = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    std::uint64_t gc_seed = 5;
    int gc_samples = 60;
    double gc_h = 1e-5, gc_tol = 1e-4;
    gc->add_option("--seed", gc_seed);
    gc->add_option("--samples", gc_samples, "Probes per network");
    gc->add_option("--fd-step", gc_h, "Finite-difference step");
    gc->add_option("--tolerance", gc_tol);

    // ablate
    auto * ab = app.add_subcommand("ablate", "Run the experiment sweeps");
    std::string ab_mode = "arch", ab_out = "ablation";
    std::uint64_t ab_dataset_seed = 1;
    int ab_iterations = 3000, ab_seeds = 3;
    std::vector<int> ab_l{0, 1, 2, 4, 6, 8, 12};
    ab->add_option("--mode", ab_mode, "arch | depth | features")->required();
    ab->add_option("--out-dir", ab_out);
    ab->add_option("--dataset-seed", ab_dataset_seed);
    ab->add_option("--iterations", ab_iterations);
    ab->add_option("--seeds", ab_seeds, "Seeds for the arch comparison");
    ab->add_option("--L-list", ab_l, "Message-passing depths for the sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(synth_out, scfg);
        if (*tr) {
            if (!train_config_file.empty()) apply_config_file(train_config_file, tcfg);
            tcfg.mode = update_mode_from_string(train_mode);
            tcfg.feature_set = feature_set_from_string(train_features);
            return cmd_train(train_gt, train_app, train_fps, train_moving, tcfg, train_syn_dim,
                             train_syn_sigma, train_out, train_log);
        }
        if (*tk) {
            pcfg.rounding = track_rounding == "greedy" ? PipelineConfig::Rounding::Greedy
                                                       : PipelineConfig::Rounding::Exact;
            pcfg.interpolate = !no_interp;
            pcfg.drop_singletons = !keep_singletons;
            return cmd_track(track_det, track_app, track_params, track_out, track_fps, pcfg,
                             track_syn_sigma, track_seed, track_diag, track_dump);
        }
        if (*ev) return cmd_eval(eval_gt, eval_pred, eval_iou, eval_csv, eval_diag);
        if (*rd) return cmd_round(round_in, round_method, round_out, round_dump);
        if (*gc) return cmd_gradcheck(gc_seed, gc_samples, gc_h, gc_tol);
        if (*ab) return cmd_ablate(ab_mode, ab_out, ab_dataset_seed, ab_iterations, ab_seeds, ab_l);
    } catch (std::exception const & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
