#include "mpntrack/encoders.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpntrack {

EdgeFeatureVector geometry_features(Detection const & det_i, Detection const & det_j, double fps,
                                    double appearance_dist) {
    if (det_i.frame >= det_j.frame)
        throw std::invalid_argument("geometry_features: detections must be in increasing frame order");
    if (det_i.box.h <= 0.0 || det_j.box.h <= 0.0 || det_i.box.w <= 0.0 || det_j.box.w <= 0.0)
        throw std::invalid_argument("geometry_features: box dimensions must be positive");
    if (fps <= 0.0) throw std::invalid_argument("geometry_features: fps must be positive");

    double const mean_h2 = det_i.box.h + det_j.box.h;
    return EdgeFeatureVector{
        2.0 * (det_j.box.x - det_i.box.x) / mean_h2,
        2.0 * (det_j.box.y - det_i.box.y) / mean_h2,
        std::log(det_i.box.h / det_j.box.h),
        std::log(det_i.box.w / det_j.box.w),
        static_cast<double>(det_j.frame - det_i.frame) / fps,
        appearance_dist,
    };
}

double appearance_distance(std::vector<double> const & a, std::vector<double> const & b) {
    if (a.size() != b.size())
        throw std::invalid_argument("appearance_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double const d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

AppearanceProvider AppearanceProvider::from_file(std::string const & path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("appearance file not found: " + path);
    AppearanceProvider p;
    p.mode_ = Mode::File;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ','))
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed appearance line");
        int const id = std::stoi(field);
        std::vector<double> vec;
        while (std::getline(ss, field, ',')) vec.push_back(std::stod(field));
        if (vec.empty())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty appearance vector");
        if (p.dim_ == 0) p.dim_ = static_cast<int>(vec.size());
        if (static_cast<int>(vec.size()) != p.dim_)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": inconsistent appearance dimension");
        p.by_id_[id] = std::move(vec);
    }
    return p;
}

AppearanceProvider AppearanceProvider::synthetic(int dim, double sigma, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("AppearanceProvider: dim must be >= 1");
    AppearanceProvider p;
    p.mode_ = Mode::Synthetic;
    p.dim_ = dim;
    p.sigma_ = sigma;
    p.seed_ = seed;
    return p;
}

std::vector<double> AppearanceProvider::vector_for(Detection const & det) const {
    if (mode_ == Mode::File) {
        auto it = by_id_.find(det.id);
        if (it == by_id_.end())
            throw std::runtime_error("appearance provider: no vector for detection id " +
                                     std::to_string(det.id));
        return it->second;
    }
    std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
    if (det.gt_track) {
        // Identity prototype from one substream, observation noise from another.
        Rng proto = Rng::substream(seed_, 0x70000000ull + static_cast<std::uint64_t>(*det.gt_track));
        for (double & x : v) x = proto.normal();
    }
    Rng noise = Rng::substream(seed_ ^ 0xA5A5A5A5ull, static_cast<std::uint64_t>(det.id));
    if (det.gt_track) {
        for (double & x : v) x += sigma_ * noise.normal();
    } else {
        // False positives carry no prototype, only noise at unit scale.
        for (double & x : v) x = noise.normal();
    }
    return v;
}

void AppearanceProvider::apply(std::vector<Detection> & detections) const {
    for (auto & det : detections) det.appearance = vector_for(det);
}

EmbeddingState encode_initial(Tape & tape, TrackingGraph const & graph,
                              AppearanceProvider const * provider, Model & model, double fps) {
    Mlp & node_enc = model.params.net("node_enc");
    Mlp & edge_enc = model.params.net("edge_enc");
    FeatureSet const fs = model.config.feature_set;

    EmbeddingState state;
    state.node_ids.resize(1);
    state.edge_ids.resize(1);
    state.node_ids[0].resize(graph.nodes.size());
    state.edge_ids[0].resize(graph.edges.size());

    std::vector<std::vector<double>> appearance(graph.nodes.size());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        appearance[i] = !graph.nodes[i].appearance.empty() || provider == nullptr
                            ? graph.nodes[i].appearance
                            : provider->vector_for(graph.nodes[i]);
        state.node_ids[0][i] = mlp_forward(node_enc, tape, tape.push(appearance[i]));
        ++state.mlp_applications;
    }

    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        int const i = graph.edges[e].src;
        int const j = graph.edges[e].dst;
        double const app_dist = appearance_distance(appearance[static_cast<std::size_t>(i)],
                                                    appearance[static_cast<std::size_t>(j)]);
        EdgeFeatureVector feat = geometry_features(graph.nodes[static_cast<std::size_t>(i)],
                                                   graph.nodes[static_cast<std::size_t>(j)], fps, app_dist);
        if (fs != FeatureSet::TimePosApp) feat[5] = 0.0;
        if (fs == FeatureSet::Time) feat[0] = feat[1] = feat[2] = feat[3] = 0.0;
        state.edge_ids[0][e] = mlp_forward(edge_enc, tape, tape.push(feat));
        ++state.mlp_applications;
    }
    return state;
}

}  // namespace mpntrack
