#include "valvebench/waveform.hpp"

#include <cmath>

#include "valvebench/errors.hpp"

namespace valvebench {

void WaveformSpec::validate(const TimeBase& tb) const {
    if (segments.empty())
        throw ConfigError("waveform: segment list is empty");
    double total = 0.0;
    for (const Segment& s : segments) {
        if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s))
            throw ConfigError("waveform: segment duration must be finite and > 0");
        if (!std::isfinite(s.target_level))
            throw ConfigError("waveform: segment level must be finite");
        total += s.duration_s;
    }
    // Tiny slack so profiles sized exactly to the horizon survive float summation.
    if (total > tb.duration() * (1.0 + 1e-9) + 1e-9)
        throw ConfigError("waveform: total segment duration exceeds horizon");
}

WaveformSpec WaveformSpec::constant(double level, double duration_s) {
    WaveformSpec spec;
    spec.segments.push_back({SegmentKind::Hold, level, duration_s});
    return spec;
}

WaveformSpec WaveformSpec::scaled(double factor) const {
    WaveformSpec out = *this;
    for (Segment& s : out.segments) s.target_level *= factor;
    return out;
}

WaveformSpec WaveformSpec::truncated(double duration_s) const {
    WaveformSpec out;
    double remaining = duration_s;
    for (const Segment& s : segments) {
        if (remaining <= 0.0) break;
        Segment clipped = s;
        if (clipped.duration_s > remaining) clipped.duration_s = remaining;
        out.segments.push_back(clipped);
        remaining -= clipped.duration_s;
    }
    if (out.segments.empty() && !segments.empty()) {
        Segment first = segments.front();
        first.duration_s = duration_s;
        out.segments.push_back(first);
    }
    return out;
}

Signal build_waveform(const WaveformSpec& spec, const TimeBase& tb) {
    tb.validate();
    spec.validate(tb);

    Signal out(tb.horizon, 0.0);
    std::size_t seg = 0;
    double seg_start = 0.0;
    double prev_level = 0.0; // ramp-first profiles start from 0
    for (std::size_t i = 0; i < tb.horizon; ++i) {
        const double t = static_cast<double>(i) * tb.ts;
        while (seg < spec.segments.size() && t >= seg_start + spec.segments[seg].duration_s) {
            seg_start += spec.segments[seg].duration_s;
            prev_level = spec.segments[seg].target_level;
            ++seg;
        }
        if (seg >= spec.segments.size()) {
            out[i] = spec.segments.back().target_level;
            continue;
        }
        const Segment& s = spec.segments[seg];
        if (s.kind == SegmentKind::Hold) {
            out[i] = s.target_level;
        } else {
            const double frac = (t - seg_start) / s.duration_s;
            out[i] = prev_level + (s.target_level - prev_level) * frac;
        }
    }
    return out;
}

SegmentKind segment_kind_from_string(const std::string& s) {
    if (s == "hold") return SegmentKind::Hold;
    if (s == "ramp") return SegmentKind::Ramp;
    throw ConfigError("waveform: unknown segment kind '" + s + "' (expected hold|ramp)");
}

std::string to_string(SegmentKind kind) {
    return kind == SegmentKind::Hold ? "hold" : "ramp";
}

} // namespace valvebench
