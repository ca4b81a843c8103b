#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mpntrack/rng.hpp"

namespace mpntrack {

enum class Activation : std::uint8_t { Relu, Sigmoid, None };

struct MlpSpec {
    std::vector<int> layer_sizes;  // input -> ... -> output
    Activation final_activation = Activation::Relu;
};

// One fully-connected layer with its gradient accumulators and Adam state.
// Weights are row-major (out x in).
struct DenseLayer {
    int in = 0;
    int out = 0;
    std::vector<double> w, b;
    std::vector<double> gw, gb;
    std::vector<double> mw, vw, mb, vb;
};

struct Mlp {
    MlpSpec spec;
    std::vector<DenseLayer> layers;

    std::size_t num_params() const;
};

Mlp make_mlp(MlpSpec spec, Rng & rng);

// Plain evaluation, no recording.
std::vector<double> mlp_forward(Mlp const & net, std::vector<double> const & input);

// Reverse-mode tape over vector-valued primitives. Values live in one
// contiguous arena; ids index into it. Recording order is a topological
// order, so a single reverse sweep propagates adjoints.
class Tape {
public:
    int push(std::span<double const> v);
    int push_zeros(int len);

    std::span<double const> value(int id) const;
    std::vector<double> value_copy(int id) const;
    int value_len(int id) const { return vals_[static_cast<std::size_t>(id)].len; }

    // Accumulates into the adjoint of a value (the backward seed).
    void seed(int id, std::span<double const> g);
    void seed_scalar(int id, double g);

    std::span<double const> grad_of(int id) const;

    // Recorded primitives; each returns the new value id.
    int affine(DenseLayer * layer, int x);
    int relu(int x);
    int sigmoid(int x);
    int concat(std::span<int const> xs);
    int sum(std::span<int const> xs, int len);  // empty set -> zero vector

    // Reverse sweep; parameter gradients accumulate into the referenced
    // layers' gw/gb. Throws if nothing was recorded.
    void backward();

    std::size_t num_ops() const { return nodes_.size(); }

private:
    enum class Op : std::uint8_t { Affine, Relu, Sigmoid, Concat, Sum };
    struct Val {
        std::size_t off;
        int len;
    };
    struct Node {
        Op op;
        int out;
        int a;          // input id (affine/relu/sigmoid) or args offset (concat/sum)
        int nargs;      // concat/sum arity
        DenseLayer * layer;
    };

    int new_value(int len);

    std::vector<double> data_, grad_;
    std::vector<Val> vals_;
    std::vector<Node> nodes_;
    std::vector<int> args_;
};

// Recorded MLP pass; the result id's value is the network output.
int mlp_forward(Mlp & net, Tape & tape, int input);

// All learnable parameters: named dense networks plus the shared Adam step
// counter. std::map keeps layer addresses stable for tape references.
struct ModelParams {
    std::map<std::string, Mlp> nets;
    std::int64_t step = 0;

    Mlp & net(std::string const & name);
    Mlp const & net(std::string const & name) const;
    bool has(std::string const & name) const { return nets.count(name) != 0; }
    std::size_t num_params() const;
};

void zero_grads(ModelParams & params);

// Deterministic traversal over every scalar parameter and its gradient slot.
void for_each_param(ModelParams & params, std::function<void(double & value, double & grad)> const & fn);

// Adds seeded uniform noise of the given scale to every bias. Freshly
// initialized biases are all zero, which parks many ReLU pre-activations
// razor-close to their kinks; finite-difference verification needs the
// operating point nudged off those edges.
void perturb_biases(ModelParams & params, double scale, std::uint64_t seed);

// Adam with L2-coupled weight decay (decay folded into the weight gradient
// before the moment update; biases are not decayed). Zeroes gradients and
// advances the step counter.
void adam_step(ModelParams & params, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8, double weight_decay = 0.0);

struct GradCheckReport {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_kinks = 0;
};

// Central finite differences against whatever gradients loss_fn(true)
// accumulates. loss_fn(false) must evaluate the loss without touching
// gradients. max_per_net = 0 checks every parameter.
//
// ReLU networks are piecewise smooth; when a kink falls inside the probe
// interval the two one-sided differences disagree and the central estimate
// is meaningless, so such parameters are excluded and counted in
// skipped_kinks instead.
GradCheckReport grad_check(ModelParams & params, std::function<double(bool want_grad)> const & loss_fn,
                           std::size_t max_per_net = 0, double h = 1e-5);

}  // namespace mpntrack
