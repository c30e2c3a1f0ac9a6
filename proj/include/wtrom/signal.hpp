#pragma once

#include <algorithm>
#include <vector>

#include "wtrom/errors.hpp"

namespace wtrom {

// Piecewise-linear signal over time. Breakpoint times are non-decreasing;
// a repeated time encodes a step, and evaluation is right-continuous
// there. Outside the breakpoint range the end values extend as constants.
struct PiecewiseLinearSignal {
    std::vector<double> t;
    std::vector<double> v;

    static PiecewiseLinearSignal constant(double value) {
        return {{0.0}, {value}};
    }

    void add(double time, double value) {
        if (!t.empty() && time < t.back())
            throw ValidationError("signal breakpoints must be non-decreasing",
                                  "signal_breakpoint_order");
        t.push_back(time);
        v.push_back(value);
    }

    // Last breakpoint index with t[i] <= at. With a step at `at` this lands
    // on the post-step entry, which is what makes evaluation
    // right-continuous.
    size_t interval(double at) const {
        auto it = std::upper_bound(t.begin(), t.end(), at);
        if (it == t.begin()) return 0;
        return static_cast<size_t>(it - t.begin()) - 1;
    }

    double value(double at) const {
        if (t.empty()) return 0.0;
        if (at <= t.front()) return v.front();
        if (at >= t.back()) return v.back();
        size_t i = interval(at);
        if (i + 1 >= t.size() || t[i + 1] <= t[i]) return v[i];
        double w = (at - t[i]) / (t[i + 1] - t[i]);
        return v[i] + w * (v[i + 1] - v[i]);
    }

    // Right-continuous derivative: at a breakpoint this is the slope of
    // the interval starting there, and zero beyond the final breakpoint.
    double slope(double at) const {
        if (t.size() < 2 || at < t.front() || at >= t.back()) return 0.0;
        size_t i = interval(at);
        if (i + 1 >= t.size() || t[i + 1] <= t[i]) return 0.0;
        return (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
    }
};

// Affine snapshot of a signal over one integration segment. Integrators
// freeze their inputs at the segment start so that evaluations at the far
// boundary cannot pick up the next interval's slope or a step landing
// exactly on it.
struct AffineView {
    double t0 = 0.0;
    double v0 = 0.0;
    double s = 0.0;

    double value(double at) const { return v0 + s * (at - t0); }
    double slope() const { return s; }
};

inline AffineView freeze(const PiecewiseLinearSignal& sig, double t_segment_start) {
    return {t_segment_start, sig.value(t_segment_start), sig.slope(t_segment_start)};
}

}  // namespace wtrom
