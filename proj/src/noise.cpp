#include "valvebench/noise.hpp"

#include <cmath>

#include "valvebench/errors.hpp"

namespace valvebench {

void NoiseSpec::validate(const TimeBase& tb) const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ConfigError("noise: sigma must be finite and >= 0");
    if (!std::isfinite(mu))
        throw ConfigError("noise: mu must be finite");
    if (kind == NoiseKind::GaussianHold) {
        if (!(update_hz > 0.0) || !std::isfinite(update_hz))
            throw ConfigError("noise: update_hz must be > 0");
    } else {
        if (!(f_min > 0.0) || !(f_min <= f_max))
            throw ConfigError("noise: need 0 < f_min <= f_max");
        if (f_max > 0.5 / tb.ts)
            throw ConfigError("noise: f_max exceeds the Nyquist rate 1/(2*ts)");
        if (n_components < 1)
            throw ConfigError("noise: n_components must be >= 1");
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
            throw ConfigError("noise: amplitude must be finite and >= 0");
    }
}

NoiseSpec NoiseSpec::gaussian_hold(double mu, double sigma, double update_hz, std::uint64_t seed) {
    NoiseSpec n;
    n.kind = NoiseKind::GaussianHold;
    n.mu = mu;
    n.sigma = sigma;
    n.update_hz = update_hz;
    n.seed = seed;
    return n;
}

NoiseSpec NoiseSpec::sine_mix(double f_min, double f_max, int n, double amplitude, std::uint64_t seed) {
    NoiseSpec s;
    s.kind = NoiseKind::SineMix;
    s.f_min = f_min;
    s.f_max = f_max;
    s.n_components = n;
    s.amplitude = amplitude;
    s.seed = seed;
    return s;
}

Signal gaussian_hold_noise(const NoiseSpec& spec, const TimeBase& tb, SeededRng& rng) {
    tb.validate();
    if (spec.kind != NoiseKind::GaussianHold)
        throw ConfigError("gaussian_hold_noise: spec.kind is not gaussian-hold");
    spec.validate(tb);

    const double samples_per_refresh = 1.0 / (spec.update_hz * tb.ts);
    std::size_t hold_len = static_cast<std::size_t>(std::llround(samples_per_refresh));
    if (hold_len < 1) hold_len = 1;

    Signal out(tb.horizon, 0.0);
    double value = 0.0;
    for (std::size_t i = 0; i < tb.horizon; ++i) {
        if (i % hold_len == 0) value = rng.gaussian(spec.mu, spec.sigma);
        out[i] = value;
    }
    return out;
}

Signal sine_mix_noise(const NoiseSpec& spec, const TimeBase& tb, SeededRng& rng) {
    tb.validate();
    if (spec.kind != NoiseKind::SineMix)
        throw ConfigError("sine_mix_noise: spec.kind is not sine-mix");
    spec.validate(tb);

    const int n = spec.n_components;
    std::vector<double> freq(n), phase(n);
    for (int k = 0; k < n; ++k) {
        freq[k] = rng.uniform(spec.f_min, spec.f_max);
        phase[k] = rng.uniform(0.0, 2.0 * M_PI);
    }
    const double amp = spec.amplitude / static_cast<double>(n);

    Signal out(tb.horizon, 0.0);
    for (std::size_t i = 0; i < tb.horizon; ++i) {
        const double t = static_cast<double>(i) * tb.ts;
        double v = 0.0;
        for (int k = 0; k < n; ++k)
            v += amp * std::sin(2.0 * M_PI * freq[k] * t + phase[k]);
        out[i] = v;
    }
    return out;
}

Signal build_noise(const NoiseSpec& spec, const TimeBase& tb) {
    SeededRng rng(spec.seed);
    if (spec.kind == NoiseKind::GaussianHold) return gaussian_hold_noise(spec, tb, rng);
    return sine_mix_noise(spec, tb, rng);
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian_hold" || s == "gaussian-hold") return NoiseKind::GaussianHold;
    if (s == "sine_mix" || s == "sine-mix") return NoiseKind::SineMix;
    throw ConfigError("noise: unknown kind '" + s + "' (expected gaussian_hold|sine_mix)");
}

} // namespace valvebench
