#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpntrack/mpn.hpp"
#include "mpntrack/types.hpp"

namespace mpntrack {

// (dx_norm, dy_norm, log_h_ratio, log_w_ratio, time_diff, appearance_dist)
using EdgeFeatureVector = std::array<double, 6>;

// Relative box geometry normalized by the mean height, time difference in
// seconds, and the provided appearance distance.
EdgeFeatureVector geometry_features(Detection const & det_i, Detection const & det_j, double fps,
                                    double appearance_dist);

// Euclidean distance between appearance embeddings.
double appearance_distance(std::vector<double> const & a, std::vector<double> const & b);

// Source of per-detection appearance embeddings, standing in for a ReID
// backbone. File mode reads fixed-length vectors keyed by detection id;
// synthetic mode derives identity prototypes plus per-observation noise
// from a seed.
class AppearanceProvider {
public:
    static AppearanceProvider from_file(std::string const & path);
    static AppearanceProvider synthetic(int dim, double sigma, std::uint64_t seed);

    std::vector<double> vector_for(Detection const & det) const;
    // Fills det.appearance for every detection.
    void apply(std::vector<Detection> & detections) const;

    int dim() const { return dim_; }

private:
    AppearanceProvider() = default;

    enum class Mode { File, Synthetic } mode_ = Mode::Synthetic;
    int dim_ = 0;
    double sigma_ = 0.0;
    std::uint64_t seed_ = 0;
    std::unordered_map<int, std::vector<double>> by_id_;
};

// Initial embeddings: node projection of the appearance vector (step-0
// node state) and the edge encoder over masked EdgeFeatureVectors (step-0
// edge state). Detections without an inline appearance vector are resolved
// through the provider.
EmbeddingState encode_initial(Tape & tape, TrackingGraph const & graph,
                              AppearanceProvider const * provider, Model & model, double fps);

}  // namespace mpntrack
