#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "coldgan/matrix.hpp"
#include "coldgan/rng.hpp"

namespace coldgan::nn {

enum class Activation { identity, relu, sigmoid };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Numerical guard: probabilities are clamped to [kEps, 1-kEps] before any log.
constexpr double kEps = 1e-7;

double sigmoid(double x);
double relu(double x);
double clamp_prob(double p);

struct DenseLayer {
    Matrix weights;             // out x in
    std::vector<double> bias;   // out
    Activation activation = Activation::identity;

    std::size_t in_dim() const { return weights.cols(); }
    std::size_t out_dim() const { return weights.rows(); }
};

struct LayerGrads {
    Matrix weights;
    std::vector<double> bias;
};

// Activations cached by forward(), consumed by backward().
struct ForwardCache {
    std::vector<std::vector<double>> inputs;    // input to each layer
    std::vector<std::vector<double>> preacts;   // affine output of each layer
    std::vector<double> output;
};

struct Mlp {
    std::vector<DenseLayer> layers;

    std::size_t in_dim() const { return layers.front().in_dim(); }
    std::size_t out_dim() const { return layers.back().out_dim(); }

    // Throws NumericError (with layer index) on non-finite intermediates,
    // DataError on dimension mismatch.
    ForwardCache forward(const std::vector<double>& x) const;

    // Reverse-mode gradients of the forward composition. Returns per-layer
    // parameter gradients; input_grad receives dLoss/dx when non-null.
    std::vector<LayerGrads> backward(const ForwardCache& cache,
                                     const std::vector<double>& output_grad,
                                     std::vector<double>* input_grad = nullptr) const;

    std::size_t param_count() const;
    std::vector<double> flatten_params() const;
    void set_params(const std::vector<double>& flat);
};

std::vector<LayerGrads> zero_grads(const Mlp& net);
void accumulate(std::vector<LayerGrads>& into, const std::vector<LayerGrads>& g);
void scale(std::vector<LayerGrads>& g, double s);
std::vector<double> flatten_grads(const std::vector<LayerGrads>& g);

// Mean over elements of -[t log p + (1-t) log(1-p)] with clamped p.
double bce(const std::vector<double>& prediction, const std::vector<double>& target);
// d(bce)/d(prediction); zero where the clamp is active.
std::vector<double> bce_grad(const std::vector<double>& prediction,
                             const std::vector<double>& target);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Bias-corrected Adam over an Mlp's parameters.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, AdamConfig cfg);

    void step(Mlp& net, const std::vector<LayerGrads>& grads);

    std::uint64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

    std::vector<LayerGrads>& first_moments() { return m_; }
    std::vector<LayerGrads>& second_moments() { return v_; }
    void set_step_count(std::uint64_t s) { step_ = s; }

private:
    AdamConfig cfg_;
    std::uint64_t step_ = 0;
    std::vector<LayerGrads> m_;
    std::vector<LayerGrads> v_;
};

Matrix init_glorot(std::size_t rows, std::size_t cols, Rng& rng);

// Central-difference gradient check over a flat parameter vector.
// Returns the max relative error |a-n| / max(|a|, |n|, 1e-6); the floor keeps
// central-difference roundoff noise (~1e-11 at h=1e-5) from dominating
// parameters whose true gradient is exactly zero.
double grad_check(const std::function<double(const std::vector<double>&)>& loss,
                  const std::vector<double>& params,
                  const std::vector<double>& analytic_grad, double h = 1e-5);

}  // namespace coldgan::nn
