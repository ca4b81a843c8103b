#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "mpntrack/encoders.hpp"
#include "mpntrack/io.hpp"
#include "mpntrack/metrics.hpp"
#include "mpntrack/rounding.hpp"
#include "mpntrack/synthetic.hpp"

using namespace mpntrack;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("mpntrack_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(std::string const & name) const { return (path / name).string(); }
    static int & counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(std::string const & path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("read_detections maps MOT fields and assigns sequential ids") {
    TempDir dir;
    {
        std::ofstream out(dir.file("det.txt"));
        out << "1,-1,10,20,30,60,0.9,-1,-1,-1\n";
        out << "2,-1,11,21,30,60,0.8,-1,-1,-1\n";
    }
    auto const dets = read_detections(dir.file("det.txt"));
    REQUIRE(dets.size() == 2);
    CHECK(dets[0].id == 0);
    CHECK(dets[0].frame == 0);  // 1-based file -> 0-based
    CHECK(dets[0].box.x == 10.0);
    CHECK(dets[0].box.y == 20.0);
    CHECK(dets[0].box.w == 30.0);
    CHECK(dets[0].box.h == 60.0);
    CHECK(dets[0].confidence == 0.9);
    CHECK(dets[1].id == 1);
    CHECK(dets[1].frame == 1);
}

TEST_CASE("empty detection files parse to empty lists") {
    TempDir dir;
    { std::ofstream out(dir.file("det.txt")); }
    CHECK(read_detections(dir.file("det.txt")).empty());
}

TEST_CASE("malformed lines report their line number") {
    TempDir dir;
    {
        std::ofstream out(dir.file("det.txt"));
        out << "1,-1,10,20,30,60,0.9,-1,-1,-1\n";
        out << "not,a,number,at,all,x,y\n";
    }
    try {
        read_detections(dir.file("det.txt"));
        FAIL("expected a parse error");
    } catch (std::exception const & e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    CHECK_THROWS(read_detections(dir.file("missing.txt")));
}

TEST_CASE("results roundtrip through write and read") {
    TempDir dir;
    std::vector<Trajectory> trajs(2);
    trajs[0].id = 0;
    trajs[0].detections = {test::det(0, 0, {}, 0, Box{10.25, 20.5, 30.0, 60.0}),
                           test::det(1, 1, {}, 0, Box{11.25, 21.5, 30.0, 60.0})};
    trajs[1].id = 1;
    trajs[1].detections = {test::det(2, 0, {}, 1, Box{100.75, 20.0, 28.0, 55.0})};
    write_results(dir.file("res.txt"), trajs);

    auto const back = read_ground_truth(dir.file("res.txt"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].detections.size() == 2);
    CHECK(back[0].detections[0].frame == 0);
    CHECK(back[0].detections[0].box.x == 10.25);
    CHECK(back[1].detections[0].box.x == 100.75);

    // Byte-identical on rewrite.
    write_results(dir.file("res2.txt"), back);
    CHECK(slurp(dir.file("res.txt")) == slurp(dir.file("res2.txt")));
}

TEST_CASE("single two-frame trajectory writes two sorted lines") {
    TempDir dir;
    std::vector<Trajectory> trajs(1);
    trajs[0].id = 3;
    trajs[0].detections = {test::det(0, 1, {}, 3, Box{1, 2, 3, 4}),
                           test::det(1, 0, {}, 3, Box{0, 2, 3, 4})};
    write_results(dir.file("res.txt"), trajs);
    std::string const text = slurp(dir.file("res.txt"));
    CHECK(text == "1,3,0.00,2.00,3.00,4.00,1,-1,-1,-1\n2,3,1.00,2.00,3.00,4.00,1,-1,-1,-1\n");
}

TEST_CASE("written results evaluate to MOTA 1 against themselves") {
    TempDir dir;
    SyntheticConfig cfg;
    cfg.n_tracks = 4;
    cfg.n_frames = 12;
    cfg.seed = 5;
    auto const data = generate_synthetic(cfg);
    write_results(dir.file("gt.txt"), data.ground_truth);
    auto const back = read_ground_truth(dir.file("gt.txt"));
    auto const r = evaluate(back, back);
    CHECK(r.mota == doctest::Approx(1.0));
    CHECK(r.idf1 == doctest::Approx(1.0));
    CHECK(r.idsw == 0);
}

TEST_CASE("appearance files roundtrip exactly through the provider") {
    TempDir dir;
    SyntheticConfig cfg;
    cfg.n_tracks = 3;
    cfg.n_frames = 5;
    cfg.appearance_dim = 6;
    cfg.appearance_sigma = 0.2;
    cfg.seed = 9;
    auto data = generate_synthetic(cfg);
    write_appearance(dir.file("app.csv"), data.detections);

    auto const provider = AppearanceProvider::from_file(dir.file("app.csv"));
    CHECK(provider.dim() == 6);
    for (auto const & d : data.detections) {
        auto const v = provider.vector_for(d);
        CHECK(v == d.appearance);  // %.17g round-trips doubles exactly
    }
}

TEST_CASE("checkpoints restore the model bit for bit") {
    TempDir dir;
    Rng rng(123);
    ModelConfig mc;
    mc.appearance_dim = 8;
    mc.message_steps = 3;
    mc.mode = UpdateMode::TimeAware;
    Model model = make_model(mc, rng);
    model.params.step = 41;
    save_checkpoint(dir.file("model.ckpt"), model);

    Model loaded = load_checkpoint(dir.file("model.ckpt"));
    CHECK(loaded.params.step == 41);
    CHECK(loaded.config.message_steps == 3);
    CHECK(loaded.config.appearance_dim == 8);
    REQUIRE(loaded.params.nets.size() == model.params.nets.size());
    std::vector<double> a, b;
    for_each_param(model.params, [&](double & v, double &) { a.push_back(v); });
    for_each_param(loaded.params, [&](double & v, double &) { b.push_back(v); });
    CHECK(a == b);

    // Saving the loaded model reproduces the file byte for byte.
    save_checkpoint(dir.file("model2.ckpt"), loaded);
    CHECK(slurp(dir.file("model.ckpt")) == slurp(dir.file("model2.ckpt")));
}

TEST_CASE("checkpoint loading rejects garbage") {
    TempDir dir;
    {
        std::ofstream out(dir.file("bad.ckpt"), std::ios::binary);
        out << "definitely not a checkpoint";
    }
    CHECK_THROWS(load_checkpoint(dir.file("bad.ckpt")));
}

TEST_CASE("scored-edge files roundtrip and drive rounding") {
    TempDir dir;
    std::vector<Detection> dets{test::det(0, 0, {0.0}), test::det(1, 0, {5.0}), test::det(2, 1, {2.5})};
    auto const g = build_graph(dets, 15, 50);
    std::vector<double> const scores{0.9, 0.7};
    write_scored_edges(dir.file("edges.txt"), g, scores);

    auto const back = read_scored_edges(dir.file("edges.txt"));
    REQUIRE(back.graph.edges.size() == 2);
    CHECK(back.scores == scores);
    auto const sol = exact_round(back.scores, back.graph);
    CHECK(sol.feasible);
    int active = 0;
    for (auto v : sol.labels) active += v;
    CHECK(active == 1);
}

TEST_CASE("detections_from_ground_truth labels and orders the boxes") {
    SyntheticConfig cfg;
    cfg.n_tracks = 3;
    cfg.n_frames = 4;
    cfg.seed = 2;
    auto const data = generate_synthetic(cfg);
    auto const dets = detections_from_ground_truth(data.ground_truth);
    REQUIRE(dets.size() == 12);
    for (std::size_t i = 1; i < dets.size(); ++i) CHECK(dets[i - 1].frame <= dets[i].frame);
    for (auto const & d : dets) CHECK(d.gt_track.has_value());
}

TEST_CASE("synthetic generation with zero noise reproduces the ground truth") {
    SyntheticConfig cfg;
    cfg.n_tracks = 3;
    cfg.n_frames = 10;
    cfg.seed = 31;
    auto const data = generate_synthetic(cfg);
    REQUIRE(data.detections.size() == 30);
    std::size_t k = 0;
    for (int frame = 0; frame < 10; ++frame)
        for (int t = 0; t < 3; ++t) {
            auto const & gt = data.ground_truth[static_cast<std::size_t>(t)].detections[static_cast<std::size_t>(frame)];
            auto const & det = data.detections[k++];
            CHECK(det.frame == frame);
            CHECK(det.box.x == gt.box.x);
            CHECK(det.box.y == gt.box.y);
            CHECK(det.gt_track == t);
        }
}

TEST_CASE("synthetic generation is seed-deterministic") {
    SyntheticConfig cfg;
    cfg.n_tracks = 4;
    cfg.n_frames = 8;
    cfg.miss_prob = 0.2;
    cfg.fp_rate = 0.5;
    cfg.box_jitter = 0.05;
    cfg.seed = 77;
    auto const a = generate_synthetic(cfg);
    auto const b = generate_synthetic(cfg);
    REQUIRE(a.detections.size() == b.detections.size());
    for (std::size_t i = 0; i < a.detections.size(); ++i) {
        CHECK(a.detections[i].frame == b.detections[i].frame);
        CHECK(a.detections[i].box.x == b.detections[i].box.x);
        CHECK(a.detections[i].appearance == b.detections[i].appearance);
    }
}

TEST_CASE("empirical miss fraction approaches miss_prob") {
    SyntheticConfig cfg;
    cfg.n_tracks = 10;
    cfg.n_frames = 1000;  // 10k ground-truth boxes
    cfg.miss_prob = 0.15;
    cfg.seed = 13;
    auto const data = generate_synthetic(cfg);
    double const total = 10.0 * 1000.0;
    double const observed = static_cast<double>(data.detections.size());
    double const missed_fraction = 1.0 - observed / total;
    CHECK(missed_fraction == doctest::Approx(0.15).epsilon(0.15));  // within ~2 points
    CHECK(std::abs(missed_fraction - 0.15) < 0.02);
}

TEST_CASE("false positives carry no track label and appear at the configured rate") {
    SyntheticConfig cfg;
    cfg.n_tracks = 2;
    cfg.n_frames = 500;
    cfg.fp_rate = 1.0;
    cfg.seed = 8;
    auto const data = generate_synthetic(cfg);
    std::int64_t fps = 0;
    for (auto const & d : data.detections)
        if (!d.gt_track) ++fps;
    CHECK(fps > 400);
    CHECK(fps < 600);
}
