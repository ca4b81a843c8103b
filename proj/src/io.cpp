#include "mpntrack/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mpntrack {

namespace {

std::vector<double> split_csv_numbers(std::string const & line, std::string const & context) {
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            fields.push_back(std::stod(field));
        } catch (std::exception const &) {
            throw std::runtime_error(context + ": malformed numeric field '" + field + "'");
        }
    }
    return fields;
}

struct MotRecord {
    int frame;
    int id;
    Box box;
    double conf;
};

std::vector<MotRecord> read_mot_file(std::string const & path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<MotRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto const fields = split_csv_numbers(line, path + ":" + std::to_string(line_no));
        if (fields.size() < 7)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected at least 7 comma-separated fields");
        MotRecord r;
        r.frame = static_cast<int>(fields[0]) - 1;  // to 0-based
        r.id = static_cast<int>(fields[1]);
        r.box = Box{fields[2], fields[3], fields[4], fields[5]};
        r.conf = fields[6];
        if (r.frame < 0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": frame must be >= 1");
        records.push_back(r);
    }
    return records;
}

}  // namespace

std::vector<Detection> read_detections(std::string const & path) {
    std::vector<Detection> dets;
    for (auto const & r : read_mot_file(path)) {
        Detection d;
        d.id = static_cast<int>(dets.size());
        d.frame = r.frame;
        d.source_frame = r.frame;
        d.box = r.box;
        d.confidence = r.conf;
        dets.push_back(std::move(d));
    }
    return dets;
}

std::vector<Trajectory> read_ground_truth(std::string const & path) {
    std::map<int, Trajectory> by_id;
    for (auto const & r : read_mot_file(path)) {
        Trajectory & traj = by_id[r.id];
        traj.id = r.id;
        Detection d;
        d.frame = r.frame;
        d.source_frame = r.frame;
        d.box = r.box;
        d.confidence = r.conf;
        d.gt_track = r.id;
        traj.detections.push_back(std::move(d));
    }
    std::vector<Trajectory> out;
    for (auto & [id, traj] : by_id) {
        std::sort(traj.detections.begin(), traj.detections.end(),
                  [](Detection const & a, Detection const & b) { return a.frame < b.frame; });
        out.push_back(std::move(traj));
    }
    return out;
}

void write_detections(std::string const & path, std::vector<Detection> const & detections) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    char buf[256];
    for (auto const & d : detections) {
        std::snprintf(buf, sizeof(buf), "%d,-1,%.2f,%.2f,%.2f,%.2f,%.6f,-1,-1,-1\n", d.frame + 1,
                      d.box.x, d.box.y, d.box.w, d.box.h, d.confidence);
        out << buf;
    }
}

void write_results(std::string const & path, std::vector<Trajectory> const & trajectories) {
    struct Line {
        int frame;
        int id;
        Box box;
    };
    std::vector<Line> lines;
    for (auto const & traj : trajectories)
        for (auto const & d : traj.detections) lines.push_back(Line{d.frame, traj.id, d.box});
    std::sort(lines.begin(), lines.end(), [](Line const & a, Line const & b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.id < b.id;
    });

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    char buf[256];
    for (auto const & l : lines) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,1,-1,-1,-1\n", l.frame + 1, l.id,
                      l.box.x, l.box.y, l.box.w, l.box.h);
        out << buf;
    }
}

void write_appearance(std::string const & path, std::vector<Detection> const & detections) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    char buf[64];
    for (auto const & d : detections) {
        out << d.id;
        for (double v : d.appearance) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << "\n";
    }
}

namespace {

constexpr char kCheckpointMagic[8] = {'M', 'P', 'N', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ofstream & out, T const & v) {
    out.write(reinterpret_cast<char const *>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream & in) {
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint truncated");
    return v;
}

void write_doubles(std::ofstream & out, std::vector<double> const & v) {
    out.write(reinterpret_cast<char const *>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream & in, std::vector<double> & v) {
    in.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint truncated");
}

}  // namespace

void save_checkpoint(std::string const & path, Model const & model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));

    nlohmann::json meta;
    meta["mode"] = to_string(model.config.mode);
    meta["feature_set"] = to_string(model.config.feature_set);
    meta["appearance_dim"] = model.config.appearance_dim;
    meta["node_dim"] = model.config.node_dim;
    meta["edge_dim"] = model.config.edge_dim;
    meta["message_steps"] = model.config.message_steps;
    meta["supervise_from"] = model.config.supervise_from;
    meta["shared_weights"] = model.config.shared_weights;
    std::string const meta_str = meta.dump();
    write_pod(out, static_cast<std::uint32_t>(meta_str.size()));
    out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

    write_pod(out, static_cast<std::int64_t>(model.params.step));
    write_pod(out, static_cast<std::uint32_t>(model.params.nets.size()));
    for (auto const & [name, net] : model.params.nets) {
        write_pod(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod(out, static_cast<std::uint8_t>(net.spec.final_activation));
        write_pod(out, static_cast<std::uint32_t>(net.spec.layer_sizes.size()));
        for (int s : net.spec.layer_sizes) write_pod(out, static_cast<std::uint32_t>(s));
        for (auto const & l : net.layers) {
            write_doubles(out, l.w);
            write_doubles(out, l.b);
            write_doubles(out, l.mw);
            write_doubles(out, l.vw);
            write_doubles(out, l.mb);
            write_doubles(out, l.vb);
        }
    }
}

Model load_checkpoint(std::string const & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);

    auto const meta_len = read_pod<std::uint32_t>(in);
    std::string meta_str(meta_len, '\0');
    in.read(meta_str.data(), meta_len);
    if (!in) throw std::runtime_error("checkpoint truncated");
    auto const meta = nlohmann::json::parse(meta_str);

    Model model;
    model.config.mode = update_mode_from_string(meta.at("mode").get<std::string>());
    model.config.feature_set = feature_set_from_string(meta.at("feature_set").get<std::string>());
    model.config.appearance_dim = meta.at("appearance_dim").get<int>();
    model.config.node_dim = meta.at("node_dim").get<int>();
    model.config.edge_dim = meta.at("edge_dim").get<int>();
    model.config.message_steps = meta.at("message_steps").get<int>();
    model.config.supervise_from = meta.at("supervise_from").get<int>();
    model.config.shared_weights = meta.at("shared_weights").get<bool>();

    model.params.step = read_pod<std::int64_t>(in);
    auto const n_nets = read_pod<std::uint32_t>(in);
    for (std::uint32_t n = 0; n < n_nets; ++n) {
        auto const name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        Mlp net;
        net.spec.final_activation = static_cast<Activation>(read_pod<std::uint8_t>(in));
        auto const n_sizes = read_pod<std::uint32_t>(in);
        for (std::uint32_t s = 0; s < n_sizes; ++s)
            net.spec.layer_sizes.push_back(static_cast<int>(read_pod<std::uint32_t>(in)));
        net.layers.resize(n_sizes - 1);
        for (std::uint32_t l = 0; l < n_sizes - 1; ++l) {
            DenseLayer & layer = net.layers[l];
            layer.in = net.spec.layer_sizes[l];
            layer.out = net.spec.layer_sizes[l + 1];
            std::size_t const wsize = static_cast<std::size_t>(layer.in) * layer.out;
            layer.w.resize(wsize);
            layer.b.resize(static_cast<std::size_t>(layer.out));
            layer.mw.resize(wsize);
            layer.vw.resize(wsize);
            layer.mb.resize(static_cast<std::size_t>(layer.out));
            layer.vb.resize(static_cast<std::size_t>(layer.out));
            read_doubles(in, layer.w);
            read_doubles(in, layer.b);
            read_doubles(in, layer.mw);
            read_doubles(in, layer.vw);
            read_doubles(in, layer.mb);
            read_doubles(in, layer.vb);
            layer.gw.assign(wsize, 0.0);
            layer.gb.assign(static_cast<std::size_t>(layer.out), 0.0);
        }
        model.params.nets.emplace(std::move(name), std::move(net));
    }
    return model;
}

ScoredEdgeFile read_scored_edges(std::string const & path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    struct Row {
        int i, j, fi, fj;
        double score;
    };
    std::vector<Row> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        Row r;
        if (!(ss >> r.i >> r.j >> r.fi >> r.fj >> r.score))
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed edge line");
        rows.push_back(r);
    }

    std::map<int, int> frames;  // node id -> frame
    for (auto const & r : rows) {
        auto check = [&](int node, int frame) {
            auto const [it, inserted] = frames.emplace(node, frame);
            if (!inserted && it->second != frame)
                throw std::runtime_error(path + ": node " + std::to_string(node) +
                                         " listed with conflicting frames");
        };
        check(r.i, r.fi);
        check(r.j, r.fj);
    }

    ScoredEdgeFile out;
    std::map<int, int> index;  // node id -> node idx
    for (auto const & [id, frame] : frames) {
        Detection d;
        d.id = id;
        d.frame = frame;
        d.source_frame = frame;
        d.box = Box{0, 0, 1, 1};
        index[id] = static_cast<int>(out.graph.nodes.size());
        out.graph.nodes.push_back(std::move(d));
    }

    std::vector<std::pair<int, int>> pairs;
    std::vector<std::pair<std::pair<int, int>, double>> keyed;
    for (auto const & r : rows) {
        int a = index[r.i], b = index[r.j];
        if (out.graph.nodes[a].frame > out.graph.nodes[b].frame) std::swap(a, b);
        keyed.push_back({{a, b}, r.score});
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 1; i < keyed.size(); ++i)
        if (keyed[i].first == keyed[i - 1].first)
            throw std::runtime_error(path + ": duplicate edge in scored-edge file");
    for (auto const & [key, score] : keyed) pairs.push_back(key);
    TrackingGraph g = graph_from_edges(out.graph.nodes, pairs);
    out.graph = std::move(g);
    out.scores.reserve(keyed.size());
    for (auto const & [key, score] : keyed) out.scores.push_back(score);
    return out;
}

void write_scored_edges(std::string const & path, TrackingGraph const & graph,
                        std::vector<double> const & scores, std::vector<std::uint8_t> const & labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "# node_i node_j frame_i frame_j score" << (labels.empty() ? "" : " label") << "\n";
    char buf[160];
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        auto const & edge = graph.edges[e];
        std::snprintf(buf, sizeof(buf), "%d %d %d %d %.17g", graph.nodes[edge.src].id,
                      graph.nodes[edge.dst].id, graph.nodes[edge.src].frame, graph.nodes[edge.dst].frame,
                      scores[e]);
        out << buf;
        if (!labels.empty()) out << ' ' << static_cast<int>(labels[e]);
        out << "\n";
    }
}

std::vector<Detection> detections_from_ground_truth(std::vector<Trajectory> const & trajectories) {
    std::vector<Detection> dets;
    for (auto const & traj : trajectories)
        for (auto const & d : traj.detections) {
            Detection copy = d;
            copy.gt_track = traj.id;
            dets.push_back(std::move(copy));
        }
    std::sort(dets.begin(), dets.end(), [](Detection const & a, Detection const & b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return *a.gt_track < *b.gt_track;
    });
    for (std::size_t i = 0; i < dets.size(); ++i) dets[i].id = static_cast<int>(i);
    return dets;
}

}  // namespace mpntrack
