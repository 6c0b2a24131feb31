#include "coldgan/nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coldgan/errors.hpp"

namespace coldgan::nn {

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation: " + s);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

double clamp_prob(double p) { return std::clamp(p, kEps, 1.0 - kEps); }

namespace {

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::identity: return x;
        case Activation::relu: return relu(x);
        case Activation::sigmoid: return sigmoid(x);
    }
    return x;
}

// Derivative in terms of the pre-activation z.
double activation_deriv(Activation a, double z) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: {
            const double s = sigmoid(z);
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

}  // namespace

ForwardCache Mlp::forward(const std::vector<double>& x) const {
    if (layers.empty()) throw DataError("forward: empty network");
    if (x.size() != in_dim())
        throw DataError("forward: input size " + std::to_string(x.size()) +
                        " != expected " + std::to_string(in_dim()));

    ForwardCache cache;
    cache.inputs.reserve(layers.size());
    cache.preacts.reserve(layers.size());

    std::vector<double> cur = x;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const DenseLayer& layer = layers[li];
        if (cur.size() != layer.in_dim())
            throw DataError("forward: layer " + std::to_string(li) + " dimension mismatch");

        cache.inputs.push_back(cur);
        std::vector<double> z = matvec(layer.weights, cur);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += layer.bias[j];

        std::vector<double> a(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            a[j] = apply_activation(layer.activation, z[j]);
            if (!std::isfinite(a[j]))
                throw NumericError("forward: non-finite value at layer " + std::to_string(li));
        }
        cache.preacts.push_back(std::move(z));
        cur = std::move(a);
    }
    cache.output = cur;
    return cache;
}

std::vector<LayerGrads> Mlp::backward(const ForwardCache& cache,
                                      const std::vector<double>& output_grad,
                                      std::vector<double>* input_grad) const {
    if (cache.inputs.size() != layers.size())
        throw DataError("backward: cache does not match network");
    if (output_grad.size() != out_dim()) throw DataError("backward: output gradient shape");

    std::vector<LayerGrads> grads(layers.size());
    std::vector<double> delta = output_grad;

    for (std::size_t li = layers.size(); li-- > 0;) {
        const DenseLayer& layer = layers[li];
        const std::vector<double>& z = cache.preacts[li];
        const std::vector<double>& in = cache.inputs[li];

        // delta currently holds dL/da; fold in the activation derivative.
        for (std::size_t j = 0; j < delta.size(); ++j)
            delta[j] *= activation_deriv(layer.activation, z[j]);

        LayerGrads& g = grads[li];
        g.weights = Matrix(layer.out_dim(), layer.in_dim());
        g.bias = delta;
        for (std::size_t r = 0; r < layer.out_dim(); ++r) {
            double* row = g.weights.data() + r * layer.in_dim();
            const double d = delta[r];
            for (std::size_t c = 0; c < layer.in_dim(); ++c) row[c] = d * in[c];
        }

        if (li > 0 || input_grad) delta = matvec_t(layer.weights, delta);
    }
    if (input_grad) *input_grad = std::move(delta);
    return grads;
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

std::vector<double> Mlp::flatten_params() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto& l : layers) {
        flat.insert(flat.end(), l.weights.raw().begin(), l.weights.raw().end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void Mlp::set_params(const std::vector<double>& flat) {
    if (flat.size() != param_count()) throw DataError("set_params: size mismatch");
    std::size_t off = 0;
    for (auto& l : layers) {
        std::copy_n(flat.begin() + off, l.weights.size(), l.weights.raw().begin());
        off += l.weights.size();
        std::copy_n(flat.begin() + off, l.bias.size(), l.bias.begin());
        off += l.bias.size();
    }
}

std::vector<LayerGrads> zero_grads(const Mlp& net) {
    std::vector<LayerGrads> g(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        g[i].weights = Matrix(net.layers[i].out_dim(), net.layers[i].in_dim());
        g[i].bias.assign(net.layers[i].out_dim(), 0.0);
    }
    return g;
}

void accumulate(std::vector<LayerGrads>& into, const std::vector<LayerGrads>& g) {
    for (std::size_t i = 0; i < into.size(); ++i) {
        auto& w = into[i].weights.raw();
        const auto& gw = g[i].weights.raw();
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += gw[j];
        for (std::size_t j = 0; j < into[i].bias.size(); ++j) into[i].bias[j] += g[i].bias[j];
    }
}

void scale(std::vector<LayerGrads>& g, double s) {
    for (auto& lg : g) {
        for (double& x : lg.weights.raw()) x *= s;
        for (double& x : lg.bias) x *= s;
    }
}

std::vector<double> flatten_grads(const std::vector<LayerGrads>& g) {
    std::vector<double> flat;
    for (const auto& lg : g) {
        flat.insert(flat.end(), lg.weights.raw().begin(), lg.weights.raw().end());
        flat.insert(flat.end(), lg.bias.begin(), lg.bias.end());
    }
    return flat;
}

double bce(const std::vector<double>& prediction, const std::vector<double>& target) {
    if (prediction.size() != target.size()) throw DataError("bce: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double p = clamp_prob(prediction[i]);
        const double t = target[i];
        acc += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
    }
    return acc / static_cast<double>(prediction.size());
}

std::vector<double> bce_grad(const std::vector<double>& prediction,
                             const std::vector<double>& target) {
    if (prediction.size() != target.size()) throw DataError("bce_grad: length mismatch");
    const double n = static_cast<double>(prediction.size());
    std::vector<double> g(prediction.size(), 0.0);
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double p = prediction[i];
        if (p <= kEps || p >= 1.0 - kEps) continue;  // clamp active, no gradient
        g[i] = (-target[i] / p + (1.0 - target[i]) / (1.0 - p)) / n;
    }
    return g;
}

Adam::Adam(const Mlp& net, AdamConfig cfg) : cfg_(cfg), m_(zero_grads(net)), v_(zero_grads(net)) {}

void Adam::step(Mlp& net, const std::vector<LayerGrads>& grads) {
    if (grads.size() != net.layers.size()) throw DataError("adam: gradient shape mismatch");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

    auto update = [&](double& p, double g, double& m, double& v) {
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        p -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    };

    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        auto& w = net.layers[li].weights.raw();
        const auto& gw = grads[li].weights.raw();
        if (gw.size() != w.size()) throw DataError("adam: weight shape mismatch");
        auto& mw = m_[li].weights.raw();
        auto& vw = v_[li].weights.raw();
        for (std::size_t j = 0; j < w.size(); ++j) update(w[j], gw[j], mw[j], vw[j]);

        auto& b = net.layers[li].bias;
        for (std::size_t j = 0; j < b.size(); ++j)
            update(b[j], grads[li].bias[j], m_[li].bias[j], v_[li].bias[j]);
    }
}

Matrix init_glorot(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& x : m.raw()) x = rng.uniform(-bound, bound);
    return m;
}

double grad_check(const std::function<double(const std::vector<double>&)>& loss,
                  const std::vector<double>& params,
                  const std::vector<double>& analytic_grad, double h) {
    if (params.size() != analytic_grad.size()) throw DataError("grad_check: size mismatch");
    double max_err = 0.0;
    std::vector<double> theta = params;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double orig = theta[i];
        theta[i] = orig + h;
        const double lp = loss(theta);
        theta[i] = orig - h;
        const double lm = loss(theta);
        theta[i] = orig;
        const double numeric = (lp - lm) / (2.0 * h);
        const double a = analytic_grad[i];
        const double err = std::abs(a - numeric) /
                           std::max({std::abs(a), std::abs(numeric), 1e-6});
        max_err = std::max(max_err, err);
    }
    return max_err;
}

}  // namespace coldgan::nn
