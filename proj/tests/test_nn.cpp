#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "valvebench/nn.hpp"
#include "valvebench/rng.hpp"

using namespace valvebench;
using namespace valvebench::nn;

namespace {

// Independent matrix-math evaluator for the forward-pass oracle: plain
// nested loops over explicit copies of the weights.
std::vector<double> forward_oracle(const DenseNet& net, const std::vector<double>& input) {
    std::vector<double> x = input;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const LayerSpec& s = net.spec(l);
        std::vector<double> y(s.out_dim, 0.0);
        for (std::size_t o = 0; o < s.out_dim; ++o) {
            double z = net.biases(l)[o];
            for (std::size_t i = 0; i < s.in_dim; ++i)
                z += net.weights(l)[o * s.in_dim + i] * x[i];
            switch (s.act) {
                case Activation::Relu: y[o] = z > 0 ? z : 0; break;
                case Activation::Tanh: y[o] = std::tanh(z); break;
                case Activation::Linear: y[o] = z; break;
            }
        }
        x = y;
    }
    return x;
}

double scalar_loss(const DenseNet& net, const std::vector<double>& input,
                   const std::vector<double>& out_grad) {
    const std::vector<double> y = forward(net, input);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += y[i] * out_grad[i];
    return acc;
}

} // namespace

TEST_CASE("init: single 1->1 layer obeys the bound and zero bias") {
    DenseNet net = DenseNet::init({{1, 1, Activation::Linear}}, 3);
    CHECK(std::abs(net.weights(0)[0]) <= 1.0);
    CHECK(net.biases(0)[0] == 0.0);
}

TEST_CASE("init: same seed gives identical parameters") {
    const auto specs = std::vector<LayerSpec>{{3, 50, Activation::Relu},
                                              {50, 25, Activation::Relu},
                                              {25, 1, Activation::Tanh}};
    DenseNet a = DenseNet::init(specs, 99);
    DenseNet b = DenseNet::init(specs, 99);
    CHECK(a.flatten() == b.flatten());
    DenseNet c = DenseNet::init(specs, 100);
    CHECK(a.flatten() != c.flatten());
}

TEST_CASE("init: 3->50->25->1 net has 1501 parameters") {
    DenseNet net = DenseNet::init({{3, 50, Activation::Relu},
                                   {50, 25, Activation::Relu},
                                   {25, 1, Activation::Linear}},
                                  1);
    CHECK(net.param_count() == 1501);
}

TEST_CASE("init: weights respect the fan-in bound per layer") {
    DenseNet net = DenseNet::init({{4, 8, Activation::Relu}, {8, 2, Activation::Tanh}}, 7);
    for (double w : net.weights(0)) CHECK(std::abs(w) <= 1.0 / std::sqrt(4.0));
    for (double w : net.weights(1)) CHECK(std::abs(w) <= 1.0 / std::sqrt(8.0));
}

TEST_CASE("init: mismatched layer chain throws") {
    CHECK_THROWS_AS(
        DenseNet::init({{3, 5, Activation::Relu}, {4, 2, Activation::Linear}}, 1),
        ConfigError);
}

TEST_CASE("forward: zero net maps any input to zero") {
    DenseNet net = make_net({{3, 4, Activation::Relu}, {4, 2, Activation::Tanh}});
    const double in[3] = {1.5, -2.0, 0.7};
    for (double v : forward(net, in)) CHECK(v == 0.0);
}

TEST_CASE("forward: identity weights pass the input through") {
    DenseNet net = make_net({{2, 2, Activation::Linear}});
    net.weights(0) = {1.0, 0.0, 0.0, 1.0};
    const double in[2] = {1.0, 2.0};
    const std::vector<double> out = forward(net, in);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 2.0);
}

TEST_CASE("forward: agrees with the independent evaluator to 1e-12") {
    DenseNet net = DenseNet::init({{3, 50, Activation::Relu},
                                   {50, 25, Activation::Relu},
                                   {25, 1, Activation::Tanh}},
                                  2024);
    SeededRng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> in{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const std::vector<double> a = forward(net, in);
        const std::vector<double> b = forward_oracle(net, in);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("forward: input dim mismatch throws") {
    DenseNet net = make_net({{3, 2, Activation::Linear}});
    const double in[2] = {1.0, 2.0};
    CHECK_THROWS_AS(forward(net, in), ConfigError);
}

TEST_CASE("backward: zero out_grad gives zero gradients") {
    DenseNet net = DenseNet::init({{2, 3, Activation::Tanh}, {3, 1, Activation::Linear}}, 5);
    ForwardCache cache;
    const double in[2] = {0.3, -0.4};
    forward(net, in, &cache);
    Gradients g = Gradients::zeros_like(net);
    const double og[1] = {0.0};
    const std::vector<double> din = backward(net, cache, og, g);
    for (const auto& layer : g.w)
        for (double v : layer) CHECK(v == 0.0);
    CHECK(din[0] == 0.0);
    CHECK(din[1] == 0.0);
}

TEST_CASE("backward: 1->1 linear layer matches the hand chain rule") {
    DenseNet net = make_net({{1, 1, Activation::Linear}});
    net.weights(0) = {2.5};
    net.biases(0) = {0.7};
    ForwardCache cache;
    const double in[1] = {3.0};
    forward(net, in, &cache);
    Gradients g = Gradients::zeros_like(net);
    const double og[1] = {2.0};
    const std::vector<double> din = backward(net, cache, og, g);
    CHECK(g.w[0][0] == doctest::Approx(3.0 * 2.0)); // dw = x * g
    CHECK(g.b[0][0] == doctest::Approx(2.0));       // db = g
    CHECK(din[0] == doctest::Approx(2.5 * 2.0));    // din = w * g
}

TEST_CASE("backward: gradients match central finite differences") {
    // Randomized architectures up to 3 layers, dims <= 8, all activations.
    // A central difference is not a valid oracle when a relu preactivation
    // sits within the step of its kink (the two evaluations straddle the
    // nondifferentiable point), so such draws are redone; 100 valid trials
    // always run.
    SeededRng meta(4242);
    const Activation acts[3] = {Activation::Relu, Activation::Tanh, Activation::Linear};
    int done = 0;
    while (done < 100) {
        const std::size_t n_layers = 1 + meta.index(3);
        std::vector<LayerSpec> specs;
        std::size_t in_dim = 1 + meta.index(8);
        for (std::size_t l = 0; l < n_layers; ++l) {
            const std::size_t out_dim = 1 + meta.index(8);
            specs.push_back({in_dim, out_dim, acts[meta.index(3)]});
            in_dim = out_dim;
        }
        DenseNet net = DenseNet::init(specs, meta.next_u64());

        std::vector<double> input(specs.front().in_dim);
        for (double& v : input) v = meta.uniform(-2.0, 2.0);
        std::vector<double> out_grad(net.out_dim());
        for (double& v : out_grad) v = meta.uniform(-1.0, 1.0);

        ForwardCache cache;
        forward(net, input, &cache);
        bool near_kink = false;
        for (std::size_t l = 0; l < net.layer_count(); ++l)
            if (net.spec(l).act == Activation::Relu)
                for (double z : cache.preacts[l])
                    if (std::abs(z) < 1e-5) near_kink = true;
        if (near_kink) continue;
        ++done;

        Gradients g = Gradients::zeros_like(net);
        const std::vector<double> din = backward(net, cache, out_grad, g);

        const double h = 1e-6;
        auto check_grad = [&](double analytic, double fd) {
            const double rel = std::abs(analytic - fd) / std::max(std::abs(fd), 1e-6);
            if (rel > 1e-4) {
                CAPTURE(analytic);
                CAPTURE(fd);
                REQUIRE(rel <= 1e-4);
            }
        };

        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            for (std::size_t i = 0; i < net.weights(l).size(); ++i) {
                const double saved = net.weights(l)[i];
                net.weights(l)[i] = saved + h;
                const double up = scalar_loss(net, input, out_grad);
                net.weights(l)[i] = saved - h;
                const double dn = scalar_loss(net, input, out_grad);
                net.weights(l)[i] = saved;
                check_grad(g.w[l][i], (up - dn) / (2 * h));
            }
            for (std::size_t i = 0; i < net.biases(l).size(); ++i) {
                const double saved = net.biases(l)[i];
                net.biases(l)[i] = saved + h;
                const double up = scalar_loss(net, input, out_grad);
                net.biases(l)[i] = saved - h;
                const double dn = scalar_loss(net, input, out_grad);
                net.biases(l)[i] = saved;
                check_grad(g.b[l][i], (up - dn) / (2 * h));
            }
        }
        for (std::size_t i = 0; i < input.size(); ++i) {
            std::vector<double> up_in = input, dn_in = input;
            up_in[i] += h;
            dn_in[i] -= h;
            check_grad(din[i],
                       (scalar_loss(net, up_in, out_grad) - scalar_loss(net, dn_in, out_grad)) /
                           (2 * h));
        }
    }
}

TEST_CASE("tanh output layer bounds every coordinate") {
    DenseNet net = DenseNet::init({{3, 8, Activation::Relu}, {8, 2, Activation::Tanh}}, 31);
    SeededRng rng(17);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> in{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        for (double v : forward(net, in)) {
            CHECK(v > -1.0);
            CHECK(v < 1.0);
        }
    }
    // Saturated inputs round to exactly +-1.0 in doubles; never beyond.
    for (int i = 0; i < 50; ++i) {
        std::vector<double> in{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4),
                               rng.uniform(-1e4, 1e4)};
        for (double v : forward(net, in)) CHECK(std::abs(v) <= 1.0);
    }
}

TEST_CASE("opt: zero gradients leave parameters unchanged") {
    DenseNet net = DenseNet::init({{2, 3, Activation::Relu}, {3, 1, Activation::Linear}}, 8);
    const std::vector<double> before = net.flatten();
    Gradients g = Gradients::zeros_like(net);
    OptState opt = OptState::zeros_like(net);
    opt_step(net, g, opt, 0.1);
    CHECK(net.flatten() == before);
    CHECK(opt.step == 1);
}

TEST_CASE("opt: first step with unit gradient moves by about lr") {
    DenseNet net = make_net({{1, 1, Activation::Linear}});
    net.weights(0) = {1.0};
    Gradients g = Gradients::zeros_like(net);
    g.w[0][0] = 1.0;
    OptState opt = OptState::zeros_like(net);
    opt_step(net, g, opt, 0.1);
    // Bias-corrected first step: lr * g / (|g| + eps) = lr.
    CHECK(net.weights(0)[0] == doctest::Approx(0.9).epsilon(1e-6));
}

TEST_CASE("opt: drives a quadratic bowl to the minimum") {
    // f(w) = w^2, grad = 2w, 500 steps at lr 0.01 from w0 = 1.
    DenseNet net = make_net({{1, 1, Activation::Linear}});
    net.weights(0) = {1.0};
    OptState opt = OptState::zeros_like(net);
    for (int i = 0; i < 500; ++i) {
        Gradients g = Gradients::zeros_like(net);
        g.w[0][0] = 2.0 * net.weights(0)[0];
        opt_step(net, g, opt, 0.01);
    }
    CHECK(std::abs(net.weights(0)[0]) < 1e-2);
}

TEST_CASE("opt: determinism under identical update sequences") {
    auto run = [] {
        DenseNet net = DenseNet::init({{2, 4, Activation::Tanh}, {4, 1, Activation::Linear}}, 77);
        OptState opt = OptState::zeros_like(net);
        SeededRng rng(5);
        for (int i = 0; i < 50; ++i) {
            ForwardCache cache;
            std::vector<double> in{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            forward(net, in, &cache);
            Gradients g = Gradients::zeros_like(net);
            const double og[1] = {1.0};
            backward(net, cache, og, g);
            opt_step(net, g, opt, 1e-3);
        }
        return net.flatten();
    };
    CHECK(run() == run());
}

TEST_CASE("serialize: round trip preserves outputs bit-exactly") {
    DenseNet net = DenseNet::init({{3, 50, Activation::Relu},
                                   {50, 25, Activation::Relu},
                                   {25, 1, Activation::Tanh}},
                                  404);
    const DenseNet back = net_deserialize(net_serialize(net));
    SeededRng rng(12);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> in{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(forward(net, in) == forward(back, in));
    }
    CHECK(net_param_hash(net) == net_param_hash(back));
}

TEST_CASE("serialize: corrupt magic bytes are rejected") {
    DenseNet net = DenseNet::init({{2, 2, Activation::Linear}}, 1);
    std::vector<std::uint8_t> bytes = net_serialize(net);
    bytes[0] = 'X';
    CHECK_THROWS_AS(net_deserialize(bytes), DataError);
}

TEST_CASE("serialize: version mismatch and truncation are explicit errors") {
    DenseNet net = DenseNet::init({{2, 2, Activation::Linear}}, 1);
    std::vector<std::uint8_t> bytes = net_serialize(net);
    std::vector<std::uint8_t> wrong_version = bytes;
    wrong_version[4] = 9;
    CHECK_THROWS_AS(net_deserialize(wrong_version), DataError);
    std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 5);
    CHECK_THROWS_AS(net_deserialize(truncated), DataError);
    std::vector<std::uint8_t> padded = bytes;
    padded.push_back(0);
    CHECK_THROWS_AS(net_deserialize(padded), DataError);
}

TEST_CASE("serialize: byte length is header plus 8 per parameter") {
    DenseNet net = DenseNet::init({{3, 50, Activation::Relu},
                                   {50, 25, Activation::Relu},
                                   {25, 1, Activation::Linear}},
                                  2);
    const std::vector<std::uint8_t> bytes = net_serialize(net);
    const std::size_t header = 4 + 4 + 4 + 3 * 9; // magic, version, count, 3 layer entries
    CHECK(bytes.size() == header + 8 * net.param_count());
}
