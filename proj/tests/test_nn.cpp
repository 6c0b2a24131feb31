#include <doctest.h>

#include <cmath>

#include "coldgan/errors.hpp"
#include "coldgan/nn.hpp"

using namespace coldgan;
using namespace coldgan::nn;

namespace {

Mlp random_net(const std::vector<std::size_t>& dims, Activation hidden, Activation out,
               std::uint64_t seed) {
    Rng rng(seed);
    Mlp net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        DenseLayer l;
        l.weights = init_glorot(dims[i + 1], dims[i], rng);
        l.bias.assign(dims[i + 1], 0.0);
        for (double& b : l.bias) b = rng.uniform(-0.1, 0.1);
        l.activation = (i + 2 == dims.size()) ? out : hidden;
        net.layers.push_back(std::move(l));
    }
    return net;
}

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("forward: identity layer with identity weights") {
    Mlp net;
    DenseLayer l;
    l.weights = Matrix(3, 3);
    for (std::size_t i = 0; i < 3; ++i) l.weights(i, i) = 1.0;
    l.bias.assign(3, 0.0);
    l.activation = Activation::identity;
    net.layers.push_back(l);

    const std::vector<double> x = {1.5, -2.0, 0.25};
    CHECK(net.forward(x).output == x);
}

TEST_CASE("forward: zero sigmoid layer outputs 0.5") {
    Mlp net;
    net.layers.push_back({Matrix(4, 2), std::vector<double>(4, 0.0), Activation::sigmoid});
    const auto out = net.forward({3.0, -1.0}).output;
    for (double y : out) CHECK(y == doctest::Approx(0.5));
}

TEST_CASE("forward: matches a straight-line re-implementation") {
    const Mlp net = random_net({4, 3, 2}, Activation::relu, Activation::identity, 17);
    Rng rng(18);
    const std::vector<double> x = random_vec(4, rng);

    // independent re-computation of the two affine maps
    std::vector<double> h(3, 0.0);
    for (std::size_t r = 0; r < 3; ++r) {
        double acc = net.layers[0].bias[r];
        for (std::size_t c = 0; c < 4; ++c) acc += net.layers[0].weights(r, c) * x[c];
        h[r] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> y(2, 0.0);
    for (std::size_t r = 0; r < 2; ++r) {
        double acc = net.layers[1].bias[r];
        for (std::size_t c = 0; c < 3; ++c) acc += net.layers[1].weights(r, c) * h[c];
        y[r] = acc;
    }

    const auto out = net.forward(x).output;
    REQUIRE(out.size() == 2);
    CHECK(out[0] == doctest::Approx(y[0]).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(y[1]).epsilon(1e-14));
}

TEST_CASE("forward: dimension mismatch throws") {
    const Mlp net = random_net({4, 2}, Activation::relu, Activation::identity, 1);
    CHECK_THROWS_AS(net.forward({1.0, 2.0}), DataError);
}

TEST_CASE("backward: linear single layer, sum loss") {
    Mlp net;
    net.layers.push_back({Matrix(2, 3), std::vector<double>(2, 0.0), Activation::identity});
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const auto cache = net.forward(x);
    const auto grads = net.backward(cache, {1.0, 1.0});
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(grads[0].bias[r] == doctest::Approx(1.0));
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(grads[0].weights(r, c) == doctest::Approx(x[c]));
    }
}

TEST_CASE("backward: zero output gradient gives zero everywhere") {
    const Mlp net = random_net({3, 4, 2}, Activation::sigmoid, Activation::identity, 5);
    Rng rng(6);
    const auto cache = net.forward(random_vec(3, rng));
    std::vector<double> input_grad;
    const auto grads = net.backward(cache, {0.0, 0.0}, &input_grad);
    for (const auto& g : grads) {
        for (double v : g.weights.raw()) CHECK(v == 0.0);
        for (double v : g.bias) CHECK(v == 0.0);
    }
    for (double v : input_grad) CHECK(v == 0.0);
}

TEST_CASE("backward matches central finite differences (property)") {
    Rng meta(123);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t in = 2 + meta.below(6);
        const std::size_t hidden = 2 + meta.below(6);
        const std::size_t out = 1 + meta.below(4);
        const Activation hid_act =
            trial % 2 == 0 ? Activation::relu : Activation::sigmoid;
        Mlp net = random_net({in, hidden, out}, hid_act, Activation::identity,
                             meta.next_u64());
        Rng rng(meta.next_u64());
        const std::vector<double> x = random_vec(in, rng);
        const std::vector<double> target = random_vec(out, rng);

        // loss = 0.5 * ||f(x) - target||^2
        auto loss_at = [&](const std::vector<double>& params) {
            Mlp probe = net;
            probe.set_params(params);
            const auto y = probe.forward(x).output;
            double acc = 0.0;
            for (std::size_t j = 0; j < y.size(); ++j)
                acc += 0.5 * (y[j] - target[j]) * (y[j] - target[j]);
            return acc;
        };

        const auto cache = net.forward(x);
        std::vector<double> dout(out);
        for (std::size_t j = 0; j < out; ++j) dout[j] = cache.output[j] - target[j];
        const auto grads = net.backward(cache, dout);
        const double err =
            grad_check(loss_at, net.flatten_params(), flatten_grads(grads));
        CHECK(err < 1e-4);
    }
}

TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == doctest::Approx(0.5));
    for (double x : {0.3, 1.7, 5.0, 20.0})
        CHECK(sigmoid(-x) == doctest::Approx(1.0 - sigmoid(x)).epsilon(1e-12));
    // saturation at +-50 stays finite and clamps away from {0, 1}
    CHECK(clamp_prob(sigmoid(50.0)) <= 1.0 - kEps);
    CHECK(clamp_prob(sigmoid(-50.0)) >= kEps);
    CHECK(std::isfinite(-std::log(clamp_prob(sigmoid(-50.0)))));
}

TEST_CASE("relu") {
    CHECK(relu(-1.0) == 0.0);
    CHECK(relu(2.5) == 2.5);
}

TEST_CASE("bce") {
    SUBCASE("exact prediction gives ~0") {
        CHECK(bce({1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}) < 1e-6);
    }
    SUBCASE("p = 0.5 gives ln 2") {
        CHECK(bce({0.5, 0.5, 0.5}, {1.0, 0.0, 1.0}) == doctest::Approx(std::log(2.0)));
        CHECK(bce({0.5}, {1.0}) == doctest::Approx(0.693147).epsilon(1e-5));
    }
    SUBCASE("fully wrong prediction is bounded by the clamp") {
        CHECK(bce({0.0}, {1.0}) == doctest::Approx(-std::log(kEps)));
        CHECK(bce({0.0}, {1.0}) == doctest::Approx(16.118).epsilon(1e-3));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(bce({0.5}, {1.0, 0.0}), DataError);
    }
    SUBCASE("non-negative and permutation invariant (property)") {
        Rng rng(31);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 2 + rng.below(10);
            std::vector<double> p(n), t(n);
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = rng.uniform();
                t[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
            }
            const double base = bce(p, t);
            CHECK(base >= 0.0);
            std::vector<std::size_t> perm(n);
            for (std::size_t i = 0; i < n; ++i) perm[i] = i;
            rng.shuffle(perm);
            std::vector<double> p2(n), t2(n);
            for (std::size_t i = 0; i < n; ++i) {
                p2[i] = p[perm[i]];
                t2[i] = t[perm[i]];
            }
            CHECK(bce(p2, t2) == doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("adam") {
    SUBCASE("zero gradient leaves parameters, bumps the step counter") {
        Mlp net = random_net({3, 2}, Activation::identity, Activation::identity, 9);
        Adam opt(net, {});
        const auto before = net.flatten_params();
        opt.step(net, zero_grads(net));
        CHECK(net.flatten_params() == before);
        CHECK(opt.step_count() == 1);
    }
    SUBCASE("first step with constant gradient moves by ~lr * sign(g)") {
        Mlp net = random_net({2, 2}, Activation::identity, Activation::identity, 10);
        const double lr = 1e-3;
        Adam opt(net, {lr});
        const auto before = net.flatten_params();
        auto grads = zero_grads(net);
        for (auto& g : grads) {
            for (double& v : g.weights.raw()) v = 0.7;
            for (double& v : g.bias) v = -0.7;
        }
        opt.step(net, grads);
        const auto after = net.flatten_params();
        const auto flat = flatten_grads(grads);
        for (std::size_t i = 0; i < after.size(); ++i) {
            const double delta = after[i] - before[i];
            CHECK(std::abs(delta) == doctest::Approx(lr).epsilon(1e-4));
            CHECK(delta * flat[i] < 0.0);  // moves against the gradient
        }
    }
    SUBCASE("bit-identical across identical runs") {
        auto run = [] {
            Mlp net = random_net({4, 3}, Activation::relu, Activation::identity, 11);
            Adam opt(net, {1e-2});
            Rng rng(12);
            for (int k = 0; k < 25; ++k) {
                auto grads = zero_grads(net);
                for (auto& g : grads) {
                    for (double& v : g.weights.raw()) v = rng.uniform(-1, 1);
                    for (double& v : g.bias) v = rng.uniform(-1, 1);
                }
                opt.step(net, grads);
            }
            return net.flatten_params();
        };
        CHECK(run() == run());
    }
}

TEST_CASE("init_glorot") {
    SUBCASE("bounds hold over 10000 samples") {
        Rng rng(77);
        const Matrix m = init_glorot(100, 100, rng);
        const double bound = std::sqrt(6.0 / 200.0);
        for (double x : m.raw()) {
            CHECK(x >= -bound);
            CHECK(x <= bound);
        }
    }
    SUBCASE("fan (1,1) spans +-sqrt(3)") {
        Rng rng(78);
        double lo = 1e9, hi = -1e9;
        for (int i = 0; i < 10000; ++i) {
            Rng r(rng.next_u64());
            const double x = init_glorot(1, 1, r)(0, 0);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double bound = std::sqrt(3.0);
        CHECK(lo >= -bound);
        CHECK(hi <= bound);
        CHECK(lo < -0.9 * bound);  // range actually exercised
        CHECK(hi > 0.9 * bound);
    }
    SUBCASE("same seed, same matrix") {
        Rng a(5), b(5);
        CHECK(init_glorot(7, 3, a).raw() == init_glorot(7, 3, b).raw());
    }
}

TEST_CASE("grad_check on a quadratic is essentially exact") {
    Rng rng(13);
    const std::vector<double> theta = random_vec(10, rng, -2.0, 2.0);
    auto loss = [](const std::vector<double>& p) {
        double acc = 0.0;
        for (double x : p) acc += 0.5 * x * x;
        return acc;
    };
    CHECK(grad_check(loss, theta, theta) < 1e-9);
}
