#include "valvebench/nn.hpp"

#include <cmath>
#include <cstring>

namespace valvebench::nn {

namespace {

void check_chain(const std::vector<LayerSpec>& specs) {
    if (specs.empty()) throw ConfigError("net: empty layer list");
    for (const LayerSpec& s : specs)
        if (s.in_dim < 1 || s.out_dim < 1)
            throw ConfigError("net: layer dims must be >= 1");
    for (std::size_t l = 1; l < specs.size(); ++l)
        if (specs[l].in_dim != specs[l - 1].out_dim)
            throw ConfigError("net: adjacent layer dims do not chain");
}

double activate(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Linear: return z;
    }
    throw ConfigError("net: unknown activation");
}

/// Derivative in terms of pre-activation z and activation output y.
double activate_grad(Activation a, double z, double y) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - y * y;
        case Activation::Linear: return 1.0;
    }
    throw ConfigError("net: unknown activation");
}

} // namespace

DenseNet make_net(std::vector<LayerSpec> specs) {
    check_chain(specs);
    DenseNet net;
    for (const LayerSpec& s : specs) {
        DenseNet::Layer layer;
        layer.spec = s;
        layer.w.assign(s.out_dim * s.in_dim, 0.0);
        layer.b.assign(s.out_dim, 0.0);
        net.layers_.push_back(std::move(layer));
    }
    return net;
}

DenseNet DenseNet::init(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
    DenseNet net = make_net(specs);
    SeededRng rng(seed);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(net.spec(l).in_dim));
        for (double& w : net.weights(l)) w = rng.uniform(-bound, bound);
        // biases stay zero
    }
    return net;
}

std::size_t DenseNet::param_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.w.size() + l.b.size();
    return n;
}

std::vector<LayerSpec> DenseNet::specs() const {
    std::vector<LayerSpec> out;
    out.reserve(layers_.size());
    for (const Layer& l : layers_) out.push_back(l.spec);
    return out;
}

std::vector<double> DenseNet::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const Layer& l : layers_) {
        flat.insert(flat.end(), l.w.begin(), l.w.end());
        flat.insert(flat.end(), l.b.begin(), l.b.end());
    }
    return flat;
}

void DenseNet::unflatten(std::span<const double> flat) {
    if (flat.size() != param_count())
        throw DataError("net: parameter count mismatch in unflatten");
    std::size_t i = 0;
    for (Layer& l : layers_) {
        for (double& w : l.w) w = flat[i++];
        for (double& b : l.b) b = flat[i++];
    }
}

bool DenseNet::same_shape(const DenseNet& other) const {
    if (layer_count() != other.layer_count()) return false;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        if (spec(l).in_dim != other.spec(l).in_dim || spec(l).out_dim != other.spec(l).out_dim ||
            spec(l).act != other.spec(l).act)
            return false;
    }
    return true;
}

std::vector<double> forward(const DenseNet& net, std::span<const double> input,
                            ForwardCache* cache) {
    if (net.layer_count() == 0) throw ConfigError("net: forward on empty net");
    if (input.size() != net.in_dim())
        throw ConfigError("net: input dim mismatch in forward");

    std::vector<double> x(input.begin(), input.end());
    if (cache) {
        cache->acts.clear();
        cache->preacts.clear();
        cache->acts.push_back(x);
    }
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const LayerSpec& s = net.spec(l);
        const std::vector<double>& w = net.weights(l);
        const std::vector<double>& b = net.biases(l);
        std::vector<double> z(s.out_dim);
        for (std::size_t o = 0; o < s.out_dim; ++o) {
            double acc = b[o];
            const double* row = &w[o * s.in_dim];
            for (std::size_t i = 0; i < s.in_dim; ++i) acc += row[i] * x[i];
            z[o] = acc;
        }
        std::vector<double> y(s.out_dim);
        for (std::size_t o = 0; o < s.out_dim; ++o) y[o] = activate(s.act, z[o]);
        if (cache) {
            cache->preacts.push_back(std::move(z));
            cache->acts.push_back(y);
        }
        x = std::move(y);
    }
    return x;
}

Gradients Gradients::zeros_like(const DenseNet& net) {
    Gradients g;
    g.w.resize(net.layer_count());
    g.b.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        g.w[l].assign(net.weights(l).size(), 0.0);
        g.b[l].assign(net.biases(l).size(), 0.0);
    }
    return g;
}

void Gradients::zero() {
    for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

void Gradients::scale(double factor) {
    for (auto& v : w)
        for (double& x : v) x *= factor;
    for (auto& v : b)
        for (double& x : v) x *= factor;
}

std::vector<double> backward(const DenseNet& net, const ForwardCache& cache,
                             std::span<const double> out_grad, Gradients& grads) {
    const std::size_t L = net.layer_count();
    if (cache.acts.size() != L + 1 || cache.preacts.size() != L)
        throw ConfigError("net: cache does not match net in backward");
    if (out_grad.size() != net.out_dim())
        throw ConfigError("net: out_grad dim mismatch in backward");
    if (grads.w.size() != L)
        throw ConfigError("net: gradient shape mismatch in backward");

    std::vector<double> dy(out_grad.begin(), out_grad.end());
    for (std::size_t l = L; l-- > 0;) {
        const LayerSpec& s = net.spec(l);
        const std::vector<double>& x = cache.acts[l];
        const std::vector<double>& z = cache.preacts[l];
        const std::vector<double>& y = cache.acts[l + 1];
        const std::vector<double>& w = net.weights(l);

        std::vector<double> dz(s.out_dim);
        for (std::size_t o = 0; o < s.out_dim; ++o)
            dz[o] = dy[o] * activate_grad(s.act, z[o], y[o]);

        std::vector<double>& gw = grads.w[l];
        std::vector<double>& gb = grads.b[l];
        for (std::size_t o = 0; o < s.out_dim; ++o) {
            gb[o] += dz[o];
            double* grow = &gw[o * s.in_dim];
            for (std::size_t i = 0; i < s.in_dim; ++i) grow[i] += dz[o] * x[i];
        }

        std::vector<double> dx(s.in_dim, 0.0);
        for (std::size_t o = 0; o < s.out_dim; ++o) {
            const double* row = &w[o * s.in_dim];
            for (std::size_t i = 0; i < s.in_dim; ++i) dx[i] += row[i] * dz[o];
        }
        dy = std::move(dx);
    }
    return dy;
}

OptState OptState::zeros_like(const DenseNet& net) {
    OptState s;
    s.m_w.resize(net.layer_count());
    s.v_w.resize(net.layer_count());
    s.m_b.resize(net.layer_count());
    s.v_b.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        s.m_w[l].assign(net.weights(l).size(), 0.0);
        s.v_w[l].assign(net.weights(l).size(), 0.0);
        s.m_b[l].assign(net.biases(l).size(), 0.0);
        s.v_b[l].assign(net.biases(l).size(), 0.0);
    }
    return s;
}

namespace {

void adam_update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, double lr, double c1, double c2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = OptState::beta1 * m[i] + (1.0 - OptState::beta1) * g[i];
        v[i] = OptState::beta2 * v[i] + (1.0 - OptState::beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + OptState::epsilon);
    }
}

} // namespace

void opt_step(DenseNet& net, const Gradients& grads, OptState& opt, double lr) {
    if (grads.w.size() != net.layer_count() || opt.m_w.size() != net.layer_count())
        throw ConfigError("opt_step: shape mismatch");
    opt.step += 1;
    const double t = static_cast<double>(opt.step);
    const double c1 = 1.0 - std::pow(OptState::beta1, t);
    const double c2 = 1.0 - std::pow(OptState::beta2, t);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        if (grads.w[l].size() != net.weights(l).size() || grads.b[l].size() != net.biases(l).size())
            throw ConfigError("opt_step: gradient shape mismatch");
        adam_update(net.weights(l), grads.w[l], opt.m_w[l], opt.v_w[l], lr, c1, c2);
        adam_update(net.biases(l), grads.b[l], opt.m_b[l], opt.v_b[l], lr, c1, c2);
    }
}

void soft_update(DenseNet& target, const DenseNet& online, double tau) {
    if (!target.same_shape(online))
        throw ConfigError("soft_update: shape mismatch");
    for (std::size_t l = 0; l < target.layer_count(); ++l) {
        std::vector<double>& tw = target.weights(l);
        const std::vector<double>& ow = online.weights(l);
        for (std::size_t i = 0; i < tw.size(); ++i) tw[i] = tau * ow[i] + (1.0 - tau) * tw[i];
        std::vector<double>& tb = target.biases(l);
        const std::vector<double>& ob = online.biases(l);
        for (std::size_t i = 0; i < tb.size(); ++i) tb[i] = tau * ob[i] + (1.0 - tau) * tb[i];
    }
}

namespace {

constexpr std::uint8_t kMagic[4] = {'V', 'B', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }

    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 8;
        double d;
        std::memcpy(&d, &bits, sizeof d);
        return d;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size())
            throw DataError("net: truncated payload");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> net_serialize(const DenseNet& net) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(net.layer_count()));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        put_u32(out, static_cast<std::uint32_t>(net.spec(l).in_dim));
        put_u32(out, static_cast<std::uint32_t>(net.spec(l).out_dim));
        out.push_back(static_cast<std::uint8_t>(net.spec(l).act));
    }
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (double w : net.weights(l)) put_f64(out, w);
        for (double b : net.biases(l)) put_f64(out, b);
    }
    return out;
}

DenseNet net_deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (bytes.size() < 4 || bytes[0] != kMagic[0] || bytes[1] != kMagic[1] ||
        bytes[2] != kMagic[2] || bytes[3] != kMagic[3])
        throw DataError("net: bad magic bytes");
    (void)r.u32(); // skip magic
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw DataError("net: unsupported format version " + std::to_string(version));
    const std::uint32_t n_layers = r.u32();
    if (n_layers == 0 || n_layers > 1024)
        throw DataError("net: implausible layer count");
    std::vector<LayerSpec> specs(n_layers);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        specs[l].in_dim = r.u32();
        specs[l].out_dim = r.u32();
        const std::uint8_t act = r.u8();
        if (act > 2) throw DataError("net: unknown activation code");
        specs[l].act = static_cast<Activation>(act);
    }
    DenseNet net = make_net(specs);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        for (double& w : net.weights(l)) w = r.f64();
        for (double& b : net.biases(l)) b = r.f64();
    }
    if (r.remaining() != 0)
        throw DataError("net: trailing bytes after parameters");
    return net;
}

std::uint64_t net_param_hash(const DenseNet& net) {
    const std::vector<std::uint8_t> bytes = net_serialize(net);
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "linear") return Activation::Linear;
    throw ConfigError("net: unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Linear: return "linear";
    }
    return "?";
}

} // namespace valvebench::nn
