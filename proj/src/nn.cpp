#include "mpntrack/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace mpntrack {

std::size_t Mlp::num_params() const {
    std::size_t n = 0;
    for (auto const & l : layers) n += l.w.size() + l.b.size();
    return n;
}

Mlp make_mlp(MlpSpec spec, Rng & rng) {
    if (spec.layer_sizes.size() < 2) throw std::invalid_argument("make_mlp: need >= 2 layer sizes");
    for (int s : spec.layer_sizes)
        if (s < 1) throw std::invalid_argument("make_mlp: layer sizes must be >= 1");

    Mlp net;
    net.spec = spec;
    std::size_t const n_layers = spec.layer_sizes.size() - 1;
    net.layers.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        DenseLayer & layer = net.layers[l];
        layer.in = spec.layer_sizes[l];
        layer.out = spec.layer_sizes[l + 1];
        bool const is_last = l + 1 == n_layers;
        // He fan-in for ReLU layers, fan-avg for the sigmoid head.
        double const limit = (is_last && spec.final_activation == Activation::Sigmoid)
                                 ? std::sqrt(6.0 / (layer.in + layer.out))
                                 : std::sqrt(6.0 / layer.in);
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        for (double & v : layer.w) v = rng.uniform(-limit, limit);
        layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
        layer.gw.assign(layer.w.size(), 0.0);
        layer.gb.assign(layer.b.size(), 0.0);
        layer.mw.assign(layer.w.size(), 0.0);
        layer.vw.assign(layer.w.size(), 0.0);
        layer.mb.assign(layer.b.size(), 0.0);
        layer.vb.assign(layer.b.size(), 0.0);
    }
    return net;
}

namespace {

void affine_apply(DenseLayer const & l, double const * x, double * y) {
    for (int o = 0; o < l.out; ++o) {
        double const * row = l.w.data() + static_cast<std::size_t>(o) * l.in;
        double acc = l.b[static_cast<std::size_t>(o)];
        for (int i = 0; i < l.in; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

void apply_activation(Activation act, double * y, int len) {
    switch (act) {
        case Activation::Relu:
            for (int i = 0; i < len; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
            break;
        case Activation::Sigmoid:
            for (int i = 0; i < len; ++i) y[i] = 1.0 / (1.0 + std::exp(-y[i]));
            break;
        case Activation::None:
            break;
    }
}

}  // namespace

std::vector<double> mlp_forward(Mlp const & net, std::vector<double> const & input) {
    if (static_cast<int>(input.size()) != net.spec.layer_sizes.front())
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    std::vector<double> cur = input;
    std::vector<double> next;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        DenseLayer const & layer = net.layers[l];
        next.assign(static_cast<std::size_t>(layer.out), 0.0);
        affine_apply(layer, cur.data(), next.data());
        bool const is_last = l + 1 == net.layers.size();
        apply_activation(is_last ? net.spec.final_activation : Activation::Relu, next.data(), layer.out);
        cur.swap(next);
    }
    return cur;
}

int Tape::new_value(int len) {
    Val v{data_.size(), len};
    data_.resize(data_.size() + static_cast<std::size_t>(len), 0.0);
    grad_.resize(data_.size(), 0.0);
    vals_.push_back(v);
    return static_cast<int>(vals_.size()) - 1;
}

int Tape::push(std::span<double const> v) {
    int const id = new_value(static_cast<int>(v.size()));
    std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(vals_.back().off));
    return id;
}

int Tape::push_zeros(int len) { return new_value(len); }

std::span<double const> Tape::value(int id) const {
    Val const & v = vals_[static_cast<std::size_t>(id)];
    return {data_.data() + v.off, static_cast<std::size_t>(v.len)};
}

std::vector<double> Tape::value_copy(int id) const {
    auto s = value(id);
    return {s.begin(), s.end()};
}

void Tape::seed(int id, std::span<double const> g) {
    Val const & v = vals_[static_cast<std::size_t>(id)];
    if (static_cast<int>(g.size()) != v.len) throw std::invalid_argument("Tape::seed: gradient shape mismatch");
    for (int i = 0; i < v.len; ++i) grad_[v.off + static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
}

void Tape::seed_scalar(int id, double g) {
    Val const & v = vals_[static_cast<std::size_t>(id)];
    if (v.len != 1) throw std::invalid_argument("Tape::seed_scalar: value is not scalar");
    grad_[v.off] += g;
}

std::span<double const> Tape::grad_of(int id) const {
    Val const & v = vals_[static_cast<std::size_t>(id)];
    return {grad_.data() + v.off, static_cast<std::size_t>(v.len)};
}

int Tape::affine(DenseLayer * layer, int x) {
    Val const & vx = vals_[static_cast<std::size_t>(x)];
    if (vx.len != layer->in) throw std::invalid_argument("Tape::affine: input dimension mismatch");
    int const y = new_value(layer->out);
    affine_apply(*layer, data_.data() + vals_[static_cast<std::size_t>(x)].off,
                 data_.data() + vals_.back().off);
    nodes_.push_back(Node{Op::Affine, y, x, 0, layer});
    return y;
}

int Tape::relu(int x) {
    Val const & vx = vals_[static_cast<std::size_t>(x)];
    int const y = new_value(vx.len);
    double const * px = data_.data() + vals_[static_cast<std::size_t>(x)].off;
    double * py = data_.data() + vals_.back().off;
    for (int i = 0; i < vx.len; ++i) py[i] = px[i] > 0.0 ? px[i] : 0.0;
    nodes_.push_back(Node{Op::Relu, y, x, 0, nullptr});
    return y;
}

int Tape::sigmoid(int x) {
    Val const & vx = vals_[static_cast<std::size_t>(x)];
    int const y = new_value(vx.len);
    double const * px = data_.data() + vals_[static_cast<std::size_t>(x)].off;
    double * py = data_.data() + vals_.back().off;
    for (int i = 0; i < vx.len; ++i) py[i] = 1.0 / (1.0 + std::exp(-px[i]));
    nodes_.push_back(Node{Op::Sigmoid, y, x, 0, nullptr});
    return y;
}

int Tape::concat(std::span<int const> xs) {
    int len = 0;
    for (int x : xs) len += vals_[static_cast<std::size_t>(x)].len;
    int const args_off = static_cast<int>(args_.size());
    for (int x : xs) args_.push_back(x);
    int const y = new_value(len);
    double * py = data_.data() + vals_.back().off;
    for (int x : xs) {
        Val const & vx = vals_[static_cast<std::size_t>(x)];
        double const * px = data_.data() + vx.off;
        std::copy(px, px + vx.len, py);
        py += vx.len;
    }
    nodes_.push_back(Node{Op::Concat, y, args_off, static_cast<int>(xs.size()), nullptr});
    return y;
}

int Tape::sum(std::span<int const> xs, int len) {
    int const args_off = static_cast<int>(args_.size());
    for (int x : xs) {
        if (vals_[static_cast<std::size_t>(x)].len != len)
            throw std::invalid_argument("Tape::sum: member shape mismatch");
        args_.push_back(x);
    }
    int const y = new_value(len);
    if (!xs.empty()) {
        double * py = data_.data() + vals_.back().off;
        for (int x : xs) {
            double const * px = data_.data() + vals_[static_cast<std::size_t>(x)].off;
            for (int i = 0; i < len; ++i) py[i] += px[i];
        }
        nodes_.push_back(Node{Op::Sum, y, args_off, static_cast<int>(xs.size()), nullptr});
    }
    // Empty sums are exact zero leaves and contribute no gradient.
    return y;
}

void Tape::backward() {
    if (nodes_.empty()) throw std::logic_error("Tape::backward: backward without forward");
    for (std::size_t n = nodes_.size(); n-- > 0;) {
        Node const & node = nodes_[n];
        Val const & vy = vals_[static_cast<std::size_t>(node.out)];
        double const * gy = grad_.data() + vy.off;
        switch (node.op) {
            case Op::Affine: {
                DenseLayer * l = node.layer;
                Val const & vx = vals_[static_cast<std::size_t>(node.a)];
                double const * x = data_.data() + vx.off;
                double * gx = grad_.data() + vx.off;
                for (int o = 0; o < l->out; ++o) {
                    double const g = gy[o];
                    if (g == 0.0) continue;
                    double const * wrow = l->w.data() + static_cast<std::size_t>(o) * l->in;
                    double * gwrow = l->gw.data() + static_cast<std::size_t>(o) * l->in;
                    for (int i = 0; i < l->in; ++i) {
                        gx[i] += wrow[i] * g;
                        gwrow[i] += x[i] * g;
                    }
                    l->gb[static_cast<std::size_t>(o)] += g;
                }
                break;
            }
            case Op::Relu: {
                Val const & vx = vals_[static_cast<std::size_t>(node.a)];
                double const * x = data_.data() + vx.off;
                double * gx = grad_.data() + vx.off;
                for (int i = 0; i < vx.len; ++i)
                    if (x[i] > 0.0) gx[i] += gy[i];
                break;
            }
            case Op::Sigmoid: {
                Val const & vx = vals_[static_cast<std::size_t>(node.a)];
                double const * y = data_.data() + vy.off;
                double * gx = grad_.data() + vx.off;
                for (int i = 0; i < vx.len; ++i) gx[i] += gy[i] * y[i] * (1.0 - y[i]);
                break;
            }
            case Op::Concat: {
                int off = 0;
                for (int a = 0; a < node.nargs; ++a) {
                    Val const & vx = vals_[static_cast<std::size_t>(args_[static_cast<std::size_t>(node.a + a)])];
                    double * gx = grad_.data() + vx.off;
                    for (int i = 0; i < vx.len; ++i) gx[i] += gy[off + i];
                    off += vx.len;
                }
                break;
            }
            case Op::Sum: {
                for (int a = 0; a < node.nargs; ++a) {
                    Val const & vx = vals_[static_cast<std::size_t>(args_[static_cast<std::size_t>(node.a + a)])];
                    double * gx = grad_.data() + vx.off;
                    for (int i = 0; i < vx.len; ++i) gx[i] += gy[i];
                }
                break;
            }
        }
    }
}

int mlp_forward(Mlp & net, Tape & tape, int input) {
    if (tape.value_len(input) != net.spec.layer_sizes.front())
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    int cur = input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        cur = tape.affine(&net.layers[l], cur);
        bool const is_last = l + 1 == net.layers.size();
        Activation const act = is_last ? net.spec.final_activation : Activation::Relu;
        if (act == Activation::Relu) cur = tape.relu(cur);
        else if (act == Activation::Sigmoid) cur = tape.sigmoid(cur);
    }
    return cur;
}

Mlp & ModelParams::net(std::string const & name) {
    auto it = nets.find(name);
    if (it == nets.end()) throw std::invalid_argument("ModelParams: missing network '" + name + "'");
    return it->second;
}

Mlp const & ModelParams::net(std::string const & name) const {
    auto it = nets.find(name);
    if (it == nets.end()) throw std::invalid_argument("ModelParams: missing network '" + name + "'");
    return it->second;
}

std::size_t ModelParams::num_params() const {
    std::size_t n = 0;
    for (auto const & [name, net] : nets) n += net.num_params();
    return n;
}

void zero_grads(ModelParams & params) {
    for (auto & [name, net] : params.nets)
        for (auto & l : net.layers) {
            std::fill(l.gw.begin(), l.gw.end(), 0.0);
            std::fill(l.gb.begin(), l.gb.end(), 0.0);
        }
}

void for_each_param(ModelParams & params, std::function<void(double &, double &)> const & fn) {
    for (auto & [name, net] : params.nets)
        for (auto & l : net.layers) {
            for (std::size_t i = 0; i < l.w.size(); ++i) fn(l.w[i], l.gw[i]);
            for (std::size_t i = 0; i < l.b.size(); ++i) fn(l.b[i], l.gb[i]);
        }
}

void perturb_biases(ModelParams & params, double scale, std::uint64_t seed) {
    Rng rng(seed);
    for (auto & [name, net] : params.nets)
        for (auto & l : net.layers)
            for (double & b : l.b) b += rng.uniform(-scale, scale);
}

void adam_step(ModelParams & params, double lr, double beta1, double beta2, double eps,
               double weight_decay) {
    if (lr <= 0.0) throw std::invalid_argument("adam_step: learning rate must be positive");
    params.step += 1;
    double const t = static_cast<double>(params.step);
    double const bc1 = 1.0 - std::pow(beta1, t);
    double const bc2 = 1.0 - std::pow(beta2, t);

    auto update = [&](std::vector<double> & theta, std::vector<double> & g, std::vector<double> & m,
                      std::vector<double> & v, bool decay) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double grad = g[i];
            if (decay) grad += weight_decay * theta[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad;
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad * grad;
            double const mhat = m[i] / bc1;
            double const vhat = v[i] / bc2;
            theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
            g[i] = 0.0;
        }
    };

    for (auto & [name, net] : params.nets)
        for (auto & l : net.layers) {
            update(l.w, l.gw, l.mw, l.vw, true);
            update(l.b, l.gb, l.mb, l.vb, false);
        }
}

GradCheckReport grad_check(ModelParams & params, std::function<double(bool)> const & loss_fn,
                           std::size_t max_per_net, double h) {
    zero_grads(params);
    loss_fn(true);

    // Snapshot the analytic gradients, then clear them so probing evals
    // run on clean state.
    std::vector<double> analytic;
    for_each_param(params, [&](double &, double & g) { analytic.push_back(g); });
    zero_grads(params);

    // Collect slots; sampling is stratified per network so every component
    // of the model is exercised.
    std::vector<double *> slots;
    for_each_param(params, [&](double & v, double &) { slots.push_back(&v); });

    std::vector<std::size_t> picked;
    std::size_t base = 0;
    for (auto & [name, net] : params.nets) {
        std::size_t const n = net.num_params();
        if (max_per_net == 0 || n <= max_per_net) {
            for (std::size_t i = 0; i < n; ++i) picked.push_back(base + i);
        } else {
            for (std::size_t s = 0; s < max_per_net; ++s)
                picked.push_back(base + (s * n) / max_per_net);
        }
        base += n;
    }

    GradCheckReport report;
    double const l0 = loss_fn(false);
    for (std::size_t idx : picked) {
        double * theta = slots[idx];
        double const saved = *theta;
        auto eval_at = [&](double offset) {
            *theta = saved + offset;
            double const l = loss_fn(false);
            *theta = saved;
            return l;
        };

        // Piecewise-linear activations put kinks at data-dependent offsets;
        // when the probe interval straddles one, the one-sided slopes (and
        // the two-scale central estimates) disagree. Shrinking h steps over
        // kinks that sit further out than the smaller interval.
        bool measured = false;
        for (double h_try : {h, h / 4.0}) {
            double const lp = eval_at(h_try);
            double const lm = eval_at(-h_try);
            double const lp2 = eval_at(h_try / 2.0);
            double const lm2 = eval_at(-h_try / 2.0);
            double const forward = (lp - l0) / h_try;
            double const backwrd = (l0 - lm) / h_try;
            double const central = (lp - lm) / (2.0 * h_try);
            double const central2 = (lp2 - lm2) / h_try;
            bool const kink_inner = std::abs(forward - backwrd) >
                                    0.05 * std::max({std::abs(forward), std::abs(backwrd), 1e-6});
            bool const kink_outer =
                std::abs(central - central2) > std::max(1e-3 * std::abs(central2), 1e-8);
            if (kink_inner || kink_outer) continue;

            // Below ~1e-3 the FD quotient hits the roundoff floor of a loss
            // computed through thousands of flops, so the comparison
            // degrades gracefully into an absolute one.
            double const abs_err = std::abs(analytic[idx] - central2);
            double const rel_err = abs_err / std::max(std::abs(central2), 1e-3);
            report.max_abs_error = std::max(report.max_abs_error, abs_err);
            report.max_rel_error = std::max(report.max_rel_error, rel_err);
            ++report.checked;
            measured = true;
            break;
        }
        if (!measured) ++report.skipped_kinks;
    }
    return report;
}

}  // namespace mpntrack
