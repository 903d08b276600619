#include "turingdelay/argument_principle.hpp"

#include "turingdelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace turingdelay {

namespace {

using cd = std::complex<double>;
using Path = std::function<cd(double)>;

constexpr double kMaxIncrement = std::numbers::pi / 2.0;

cd checked(const AnalyticFn& f, cd z)
{
    const cd value = f(z);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw RootCountUnstable("non-finite function value on contour");
    if (value == cd(0.0, 0.0))
        throw RootCountUnstable("function vanishes on contour");
    return value;
}

// Net phase change of f along path(t), t in [0, 1].
double phase_change(const AnalyticFn& f, const Path& path, double length,
                    const WindingOptions& opts)
{
    struct Sample {
        cd z;
        cd value;
        // |f'(z) / f(z)|, zero without a derivative.
        double log_slope;
    };
    struct Interval {
        double t0, t1;
        Sample s0, s1;
        int depth;
    };
    const auto sample = [&](double t) {
        const cd z = path(t);
        const cd value = checked(f, z);
        const double log_slope = opts.derivative ? std::abs(opts.derivative(z) / value) : 0.0;
        return Sample{z, value, log_slope};
    };

    int n = opts.samples_per_edge;
    if (opts.max_step > 0.0)
        n = std::max(n, static_cast<int>(std::min(std::ceil(length / opts.max_step), 1e7)));
    std::vector<Sample> samples;
    samples.reserve(std::size_t(n) + 1);
    for (int k = 0; k <= n; ++k)
        samples.push_back(sample(double(k) / n));

    double total = 0.0;
    std::vector<Interval> stack;
    for (int k = n - 1; k >= 0; --k)
        stack.push_back({double(k) / n, double(k + 1) / n, samples[k], samples[k + 1], 0});

    // Left-to-right depth-first traversal keeps the summation order fixed.
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const double step = std::arg(iv.s1.value / iv.s0.value);
        const double h = std::abs(iv.s1.z - iv.s0.z);
        const bool near_zero = h * std::max(iv.s0.log_slope, iv.s1.log_slope) > 1.0;
        if (std::abs(step) < kMaxIncrement && !near_zero) {
            total += step;
            continue;
        }
        if (iv.depth >= opts.max_depth)
            throw RootCountUnstable("phase increment unresolved at maximum refinement");
        const double tm = 0.5 * (iv.t0 + iv.t1);
        const Sample mid = sample(tm);
        stack.push_back({tm, iv.t1, mid, iv.s1, iv.depth + 1});
        stack.push_back({iv.t0, tm, iv.s0, mid, iv.depth + 1});
    }
    return total;
}

int to_count(double total_phase)
{
    const double turns = total_phase / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-3 || rounded < 0.0)
        throw RootCountUnstable("winding number is not a non-negative integer: "
                                + std::to_string(turns));
    return static_cast<int>(rounded);
}

} // namespace

int winding_number(const AnalyticFn& f, const Rect& rect, const WindingOptions& opts)
{
    const cd c00(rect.re_lo, rect.im_lo);
    const cd c10(rect.re_hi, rect.im_lo);
    const cd c11(rect.re_hi, rect.im_hi);
    const cd c01(rect.re_lo, rect.im_hi);
    const auto edge = [&](cd from, cd to) {
        const Path path = [from, to](double t) { return from + t * (to - from); };
        return phase_change(f, path, std::abs(to - from), opts);
    };
    double total = 0.0;
    total += edge(c00, c10);
    total += edge(c10, c11);
    total += edge(c11, c01);
    total += edge(c01, c00);
    return to_count(total);
}

int winding_number(const AnalyticFn& f, cd center, double radius, const WindingOptions& opts)
{
    const Path circle = [center, radius](double t) {
        return center + std::polar(radius, 2.0 * std::numbers::pi * t);
    };
    WindingOptions circle_opts = opts;
    circle_opts.samples_per_edge = 4 * opts.samples_per_edge;
    return to_count(phase_change(f, circle, 2.0 * std::numbers::pi * radius, circle_opts));
}

} // namespace turingdelay
