#include "mpntrack/model.hpp"

#include <stdexcept>

namespace mpntrack {

int ModelConfig::default_l0() const {
    if (supervise_from >= 0) {
        if (supervise_from > message_steps)
            throw std::invalid_argument("ModelConfig: supervise_from > message_steps");
        return supervise_from;
    }
    if (message_steps == 0) return 0;
    int const l0 = (message_steps + 1) / 2 + 1;
    return std::min(l0, message_steps);
}

Model make_model(ModelConfig const & config, Rng & rng) {
    Model model;
    model.config = config;
    int const node = config.node_dim;
    int const edge = config.edge_dim;

    auto add = [&](std::string const & name, MlpSpec spec) {
        model.params.nets.emplace(name, make_mlp(std::move(spec), rng));
    };
    auto add_stepped = [&](std::string const & name, MlpSpec const & spec) {
        if (config.shared_weights) {
            add(name, spec);
        } else {
            for (int l = 1; l <= config.message_steps; ++l)
                add(name + "." + std::to_string(l), spec);
        }
    };

    add("node_enc", MlpSpec{{config.appearance_dim, 128, node}, Activation::Relu});
    add("edge_enc", MlpSpec{{6, 18, 18, edge}, Activation::Relu});
    add_stepped("edge_update", MlpSpec{{4 * node + 2 * edge, 80, edge}, Activation::Relu});
    if (config.mode == UpdateMode::TimeAware) {
        add_stepped("past_update", MlpSpec{{2 * node + edge, 56, node}, Activation::Relu});
        add_stepped("fut_update", MlpSpec{{2 * node + edge, 56, node}, Activation::Relu});
        add_stepped("node_update", MlpSpec{{2 * node, node}, Activation::Relu});
    } else {
        add_stepped("msg_update", MlpSpec{{2 * node + edge, 56, node}, Activation::Relu});
    }
    add("classifier", MlpSpec{{edge, 8, 1}, Activation::Sigmoid});
    return model;
}

Mlp & step_net(Model & model, std::string const & base, int l) {
    if (model.config.shared_weights) return model.params.net(base);
    return model.params.net(base + "." + std::to_string(l));
}

std::string to_string(UpdateMode mode) {
    return mode == UpdateMode::Vanilla ? "vanilla" : "time_aware";
}

std::string to_string(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::Time: return "time";
        case FeatureSet::TimePos: return "time+pos";
        default: return "time+pos+app";
    }
}

UpdateMode update_mode_from_string(std::string const & s) {
    if (s == "vanilla") return UpdateMode::Vanilla;
    if (s == "time_aware" || s == "time-aware") return UpdateMode::TimeAware;
    throw std::invalid_argument("unknown update mode: " + s);
}

FeatureSet feature_set_from_string(std::string const & s) {
    if (s == "time") return FeatureSet::Time;
    if (s == "time+pos") return FeatureSet::TimePos;
    if (s == "time+pos+app") return FeatureSet::TimePosApp;
    throw std::invalid_argument("unknown feature set: " + s);
}

}  // namespace mpntrack
