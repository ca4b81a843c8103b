#pragma once

#include <optional>
#include <vector>

#include "mpntrack/graph.hpp"
#include "mpntrack/model.hpp"
#include "mpntrack/types.hpp"

namespace mpntrack::test {

inline Detection det(int id, int frame, std::vector<double> appearance,
                     std::optional<int> gt_track = std::nullopt, Box box = Box{0, 0, 10, 20},
                     double conf = 1.0) {
    Detection d;
    d.id = id;
    d.frame = frame;
    d.source_frame = frame;
    d.box = box;
    d.confidence = conf;
    d.appearance = std::move(appearance);
    d.gt_track = gt_track;
    return d;
}

// Zeroes every parameter of every network.
inline void zero_model(Model & model) {
    for (auto & [name, net] : model.params.nets)
        for (auto & l : net.layers) {
            std::fill(l.w.begin(), l.w.end(), 0.0);
            std::fill(l.b.begin(), l.b.end(), 0.0);
        }
}

inline int edge_index(TrackingGraph const & g, int src, int dst) {
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        if (g.edges[e].src == src && g.edges[e].dst == dst) return e;
    return -1;
}

}  // namespace mpntrack::test
