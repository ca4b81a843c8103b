#pragma once

#include <string>

#include "mpntrack/nn.hpp"

namespace mpntrack {

enum class UpdateMode : std::uint8_t { Vanilla, TimeAware };

// Edge feature groups used during encoding; smaller sets zero the
// remaining components so the architecture is unchanged across ablations.
enum class FeatureSet : std::uint8_t { Time, TimePos, TimePosApp };

struct ModelConfig {
    UpdateMode mode = UpdateMode::TimeAware;
    FeatureSet feature_set = FeatureSet::TimePosApp;
    int appearance_dim = 32;
    int node_dim = 32;
    int edge_dim = 16;
    int message_steps = 12;      // L
    int supervise_from = -1;     // l0; -1 = ceil(L/2) + 1, clamped to [.., L]
    bool shared_weights = true;  // one network per role reused across steps

    int default_l0() const;
};

// Learnable networks plus the configuration they were built for.
struct Model {
    ModelConfig config;
    ModelParams params;
};

// Builds the full parameter set: node/edge feature encoders, message
// passing updates for the configured mode, and the sigmoid edge classifier.
Model make_model(ModelConfig const & config, Rng & rng);

// Network for a role at message passing step l (steps share weights unless
// configured otherwise).
Mlp & step_net(Model & model, std::string const & base, int l);

std::string to_string(UpdateMode mode);
std::string to_string(FeatureSet fs);
UpdateMode update_mode_from_string(std::string const & s);
FeatureSet feature_set_from_string(std::string const & s);

}  // namespace mpntrack
