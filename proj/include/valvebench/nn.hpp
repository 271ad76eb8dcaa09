#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "valvebench/errors.hpp"
#include "valvebench/rng.hpp"

namespace valvebench::nn {

enum class Activation : std::uint8_t { Relu = 0, Tanh = 1, Linear = 2 };

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation act = Activation::Linear;
};

/**
 * Minimal dense feed-forward network, 64-bit floats throughout. Weights
 * are stored row-major, one row per output unit. The nets here are tiny
 * (tens of units), so clarity and bit-reproducibility win over speed.
 */
class DenseNet {
public:
    DenseNet() = default;

    /// Uniform(+-1/sqrt(in_dim)) weights, zero biases; deterministic per seed.
    static DenseNet init(const std::vector<LayerSpec>& specs, std::uint64_t seed);

    std::size_t layer_count() const { return layers_.size(); }
    std::size_t in_dim() const { return layers_.empty() ? 0 : layers_.front().spec.in_dim; }
    std::size_t out_dim() const { return layers_.empty() ? 0 : layers_.back().spec.out_dim; }
    std::size_t param_count() const;

    const LayerSpec& spec(std::size_t l) const { return layers_[l].spec; }
    std::vector<LayerSpec> specs() const;

    std::vector<double>& weights(std::size_t l) { return layers_[l].w; }
    const std::vector<double>& weights(std::size_t l) const { return layers_[l].w; }
    std::vector<double>& biases(std::size_t l) { return layers_[l].b; }
    const std::vector<double>& biases(std::size_t l) const { return layers_[l].b; }

    /// Copy every parameter into / out of a flat vector (layer order, W then b).
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);

    bool same_shape(const DenseNet& other) const;

private:
    struct Layer {
        LayerSpec spec;
        std::vector<double> w; // out_dim x in_dim, row-major
        std::vector<double> b; // out_dim
    };
    std::vector<Layer> layers_;

    friend DenseNet make_net(std::vector<LayerSpec> specs);
};

/// Build a zero-initialized net with the given shape (used by deserialize and tests).
DenseNet make_net(std::vector<LayerSpec> specs);

/// Activations per layer boundary; acts[0] is the input, acts[L] the output.
struct ForwardCache {
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> preacts;
};

/// Affine + activation composition. Pass a cache to enable backward().
std::vector<double> forward(const DenseNet& net, std::span<const double> input,
                            ForwardCache* cache = nullptr);

/// Per-layer parameter gradients, shape-congruent with the owning net.
struct Gradients {
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> b;

    static Gradients zeros_like(const DenseNet& net);
    void zero();
    void scale(double factor);
};

/**
 * Exact reverse-mode gradients of (output . out_grad) w.r.t. every
 * parameter and the input. Parameter gradients are ACCUMULATED into
 * grads (callers zero them before a batch); returns the input gradient.
 */
std::vector<double> backward(const DenseNet& net, const ForwardCache& cache,
                             std::span<const double> out_grad, Gradients& grads);

/// Adam accumulator state; the moment constants are fixed on purpose.
struct OptState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    std::uint64_t step = 0;
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;

    static OptState zeros_like(const DenseNet& net);
};

/// One bias-corrected adaptive-moment descent step.
void opt_step(DenseNet& net, const Gradients& grads, OptState& opt, double lr);

/// target <- tau*online + (1-tau)*target, parameter-wise.
void soft_update(DenseNet& target, const DenseNet& online, double tau);

/// Versioned binary form: magic, layer table, then parameters as
/// little-endian 64-bit floats in row-major order. Round-trip is bit-exact.
std::vector<std::uint8_t> net_serialize(const DenseNet& net);
DenseNet net_deserialize(std::span<const std::uint8_t> bytes);

/// FNV-1a over the serialized bytes; used for weight-continuity checks.
std::uint64_t net_param_hash(const DenseNet& net);

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

} // namespace valvebench::nn
