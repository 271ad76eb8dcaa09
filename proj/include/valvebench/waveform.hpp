#pragma once

#include <string>
#include <vector>

#include "valvebench/timebase.hpp"

namespace valvebench {

using Signal = std::vector<double>;

enum class SegmentKind { Hold, Ramp };

struct Segment {
    SegmentKind kind = SegmentKind::Hold;
    double target_level = 0.0; // flow units
    double duration_s = 0.0;
};

/**
 * Piecewise reference profile. Hold segments emit a constant level; ramp
 * segments interpolate linearly from the previous segment's level to the
 * target. If the segments end before the horizon the last level persists.
 */
struct WaveformSpec {
    std::vector<Segment> segments;

    void validate(const TimeBase& tb) const;

    /// Level at the very end of the profile.
    double final_level() const { return segments.empty() ? 0.0 : segments.back().target_level; }

    static WaveformSpec constant(double level, double duration_s);

    /// Scale every segment level by a factor (used for reduced-magnitude runs).
    WaveformSpec scaled(double factor) const;

    /// Clip the profile to fit a shorter run; a longer bound is a no-op.
    WaveformSpec truncated(double duration_s) const;
};

/// Sample the profile on the grid; sample i is the value at t = i*ts.
Signal build_waveform(const WaveformSpec& spec, const TimeBase& tb);

SegmentKind segment_kind_from_string(const std::string& s);
std::string to_string(SegmentKind kind);

} // namespace valvebench
