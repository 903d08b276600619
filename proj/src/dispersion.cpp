#include "turingdelay/dispersion.hpp"

#include "turingdelay/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace turingdelay {

using cd = std::complex<double>;

QuasiPolyCoeffs coeffs(const ModelParams& params, ModeIndex mode)
{
    const auto ss = steady_state(params);
    const double u = ss.u_star;
    const double v = ss.v_star;
    const double pi2 = std::numbers::pi * std::numbers::pi;

    const double kx2 = double(mode.kx) * mode.kx / (params.lx * params.lx);
    const double ky2 = double(mode.ky) * mode.ky / (params.ly * params.ly);
    const double k2 = (kx2 + ky2) * pi2;
    const double k4 = (kx2 * kx2 + ky2 * ky2 + 2.0 * kx2 * ky2) * pi2 * pi2;

    QuasiPolyCoeffs c;
    c.mu = k2;
    c.p = (params.du + params.dv) * k2 + u * u + 4.0 * u * v + 1.0;
    c.q = params.dv * k2 + params.du * params.dv * k4 + params.du * k2 * u * u
          + 4.0 * params.dv * k2 * u * v + u * u;
    c.r = -6.0 * u * v;
    c.s = -6.0 * params.dv * k2 * u * v;
    return c;
}

std::pair<cd, cd> roots_tau_zero(const QuasiPolyCoeffs& c)
{
    const double b = c.p + c.r;
    const double k = c.q + c.s;
    const double disc = b * b - 4.0 * k;
    if (disc < 0.0) {
        const double im = 0.5 * std::sqrt(-disc);
        return {cd(-0.5 * b, im), cd(-0.5 * b, -im)};
    }
    // Avoid cancellation: take the root where b and sqrt(disc) add.
    const double t = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (t == 0.0)
        return {cd(0.0, 0.0), cd(0.0, 0.0)};
    const double r1 = t;
    const double r2 = k / t;
    return r1 >= r2 ? std::pair{cd(r1, 0.0), cd(r2, 0.0)} : std::pair{cd(r2, 0.0), cd(r1, 0.0)};
}

bool delay_independent_stable(const QuasiPolyCoeffs& c)
{
    if (!(c.p + c.r > 0.0 && c.q + c.s > 0.0))
        return false;
    if (!(c.q > std::abs(c.s)))
        return false;
    // Purely imaginary roots i w need |q - w^2 + i p w| = |s + i r w|.
    const double b = c.p * c.p - c.r * c.r - 2.0 * c.q;
    const double k = c.q * c.q - c.s * c.s;
    if (b >= 0.0)
        return true;
    return b * b - 4.0 * k < 0.0;
}

namespace {

// exp(-lambda tau) turns by tau radians per unit of Im lambda; sampling at
// a quarter of that keeps every phase increment of the delayed term resolved.
double delay_resolving_step(double tau)
{
    return tau > 0.0 ? 0.25 * std::numbers::pi / tau : 0.0;
}

// The options hold a copy of the coefficients, so they outlive the caller's.
WindingOptions char_winding_options(const QuasiPolyCoeffs& c, double tau)
{
    WindingOptions opts;
    opts.max_step = delay_resolving_step(tau);
    opts.derivative = [c, tau](cd z) { return eval_char_derivative(z, tau, c); };
    return opts;
}

struct Candidate {
    Rect rect;
    int count;
};

struct ByRightEdge {
    bool operator()(const Candidate& lhs, const Candidate& rhs) const
    {
        if (lhs.rect.re_hi != rhs.rect.re_hi)
            return lhs.rect.re_hi < rhs.rect.re_hi;
        return lhs.rect.im_hi < rhs.rect.im_hi;
    }
};

class RootSearch {
public:
    RootSearch(const QuasiPolyCoeffs& c, double tau, double tol)
        : c_(c), tau_(tau), tol_(tol), fn_([this](cd z) { return eval_char(z, tau_, c_); })
    {
        opts_ = char_winding_options(c_, tau_);
    }

    // Rightmost root inside rect, if any.
    std::optional<RootResult> search(Rect rect)
    {
        int count = count_with_outward_perturbation(rect);
        if (count == 0)
            return std::nullopt;

        std::priority_queue<Candidate, std::vector<Candidate>, ByRightEdge> queue;
        queue.push({rect, count});
        std::optional<RootResult> best;

        const double scale = 1.0 + std::max(rect.width(), rect.height());
        const double multiplicity_size = 1e-7 * scale;
        const double min_size = 1e-13 * scale;

        while (!queue.empty()) {
            const Candidate cand = queue.top();
            queue.pop();
            if (best && cand.rect.re_hi < best->lambda.real())
                break;

            const double size = std::max(cand.rect.width(), cand.rect.height());
            if (cand.count == 1 || size < multiplicity_size) {
                if (auto root = polish(cand.rect)) {
                    root->multiplicity_flag = cand.count > 1;
                    if (!best || root->lambda.real() > best->lambda.real())
                        best = root;
                    continue;
                }
                if (size < min_size)
                    throw NoConvergence("Newton failed in terminal rectangle");
            }
            for (const Candidate& child : split(cand))
                if (child.count > 0)
                    queue.push(child);
        }
        return best;
    }

private:
    int count(const Rect& rect) const { return winding_number(fn_, rect, opts_); }

    int count_with_outward_perturbation(Rect& rect) const
    {
        const double step = 1e-3 * (1.0 + std::max(rect.width(), rect.height()));
        for (int attempt = 0; attempt < 8; ++attempt) {
            try {
                return count(rect);
            } catch (const RootCountUnstable&) {
                rect.re_lo -= step;
                rect.re_hi += step;
                rect.im_lo -= step;
                rect.im_hi += step;
            }
        }
        throw RootCountUnstable("search rectangle boundary could not be cleared of roots");
    }

    // Two children whose counts add up to the parent's. The split line is
    // moved off-centre and retried if it runs through a root.
    std::array<Candidate, 2> split(const Candidate& parent) const
    {
        static constexpr std::array<double, 6> fractions{0.5 + 0.0173, 0.5 - 0.0311, 0.5 + 0.0719,
                                                         0.5 - 0.1093, 0.5 + 0.1531, 0.5 - 0.2017};
        const Rect& r = parent.rect;
        const bool vertical = r.width() >= r.height();
        for (double frac : fractions) {
            Rect lo = r;
            Rect hi = r;
            if (vertical) {
                const double cut = r.re_lo + frac * r.width();
                lo.re_hi = cut;
                hi.re_lo = cut;
            } else {
                const double cut = r.im_lo + frac * r.height();
                lo.im_hi = cut;
                hi.im_lo = cut;
            }
            try {
                const int n_lo = count(lo);
                const int n_hi = count(hi);
                if (n_lo + n_hi == parent.count)
                    return {Candidate{lo, n_lo}, Candidate{hi, n_hi}};
            } catch (const RootCountUnstable&) {
            }
        }
        throw RootCountUnstable("could not split rectangle consistently");
    }

    std::optional<cd> newton(cd z) const
    {
        cd best_z = z;
        double best_res = std::abs(eval_char(z, tau_, c_));
        for (int it = 0; it < 100 && best_res >= 1e-3 * tol_; ++it) {
            const cd value = eval_char(z, tau_, c_);
            const cd slope = eval_char_derivative(z, tau_, c_);
            if (slope == cd(0.0, 0.0))
                break;
            const cd step = value / slope;
            z -= step;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                break;
            const double res = std::abs(eval_char(z, tau_, c_));
            if (res < best_res) {
                best_res = res;
                best_z = z;
            }
            if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(z)))
                break;
        }
        if (best_res < tol_)
            return best_z;
        return std::nullopt;
    }

    std::optional<RootResult> polish(const Rect& rect) const
    {
        const std::array<cd, 5> seeds{
            rect.center(),
            cd(rect.re_lo + 0.25 * rect.width(), rect.im_lo + 0.25 * rect.height()),
            cd(rect.re_lo + 0.75 * rect.width(), rect.im_lo + 0.25 * rect.height()),
            cd(rect.re_lo + 0.25 * rect.width(), rect.im_lo + 0.75 * rect.height()),
            cd(rect.re_lo + 0.75 * rect.width(), rect.im_lo + 0.75 * rect.height()),
        };
        // A root polished outside the rectangle is some other root; the
        // caller then subdivides instead.
        const double margin = 1e-12 * (1.0 + std::abs(rect.center()));
        for (const cd& seed : seeds) {
            const auto root = newton(seed);
            if (root && rect.contains(*root, margin)) {
                RootResult result;
                result.lambda = *root;
                result.residual = std::abs(eval_char(*root, tau_, c_));
                return result;
            }
        }
        return std::nullopt;
    }

    QuasiPolyCoeffs c_;
    double tau_;
    double tol_;
    AnalyticFn fn_;
    WindingOptions opts_;
};

RootResult conjugate_upper(RootResult result)
{
    if (result.lambda.imag() < 0.0)
        result.lambda = std::conj(result.lambda);
    return result;
}

} // namespace

RootResult rightmost_root(const QuasiPolyCoeffs& c, double tau, double tol)
{
    if (!(tau >= 0.0))
        throw InvalidParameter("tau must be >= 0");
    if (!(tol > 0.0))
        throw InvalidParameter("tol must be > 0");

    if (tau == 0.0) {
        const auto [first, second] = roots_tau_zero(c);
        RootResult result;
        result.lambda = first;
        result.residual = std::abs(eval_char(first, 0.0, c));
        result.multiplicity_flag = first == second;
        return result;
    }

    // Sweep vertical slabs leftward from Re = 0. Roots with Re >= sigma satisfy
    // |lambda| <= radius(sigma) since |exp(-lambda tau)| <= exp(-sigma tau)
    // there, so the first slab holding any root holds the rightmost one.
    constexpr int kMaxSigmaRetries = 50;
    // Irrational-ish offsets keep real roots and integer abscissae off the edges.
    constexpr double kImagOffset = 0.0137;
    constexpr double kSigmaOffset = 0.00731;
    const auto radius = [&](double sigma) {
        const double decay = std::exp(-sigma * tau);
        const double lin = std::abs(c.p) + decay * std::abs(c.r);
        const double con = std::abs(c.q) + decay * std::abs(c.s);
        return 0.5 * (lin + std::sqrt(lin * lin + 4.0 * con));
    };

    RootSearch search(c, tau, tol);
    double slab_right = -1.0;
    for (int retry = 0; retry <= kMaxSigmaRetries; ++retry) {
        const double sigma = -kSigmaOffset - double(retry);
        const double top = radius(sigma);
        const double pad = 1e-3 * (1.0 + top);
        if (retry == 0)
            slab_right = top + pad;
        const Rect rect{sigma, slab_right, -kImagOffset, top + pad};
        if (auto found = search.search(rect)) {
            found->sigma_retries = retry;
            return conjugate_upper(*found);
        }
        slab_right = sigma;
    }
    throw NoConvergence("no root found after lowering the search abscissa "
                        + std::to_string(kMaxSigmaRetries) + " times");
}

int count_roots_in_disc(const QuasiPolyCoeffs& c, double tau, cd center, double radius)
{
    const AnalyticFn fn = [&](cd z) { return eval_char(z, tau, c); };
    return winding_number(fn, center, radius, char_winding_options(c, tau));
}

int count_roots_in_rect(const QuasiPolyCoeffs& c, double tau, const Rect& rect)
{
    const AnalyticFn fn = [&](cd z) { return eval_char(z, tau, c); };
    return winding_number(fn, rect, char_winding_options(c, tau));
}

double alpha_mode(const ModelParams& params, ModeIndex mode)
{
    return rightmost_root(coeffs(params, mode), params.tau).lambda.real();
}

namespace {

// Tracks the truncation rule along one scan direction.
class DirectionStop {
public:
    void observe(double undelayed_growth)
    {
        if (has_prev_ && undelayed_growth < prev_)
            ++decreases_;
        else
            decreases_ = 0;
        prev_ = undelayed_growth;
        has_prev_ = true;
    }

    bool done(const QuasiPolyCoeffs& c, double running_max) const
    {
        return decreases_ >= 3 && prev_ < running_max && delay_independent_stable(c);
    }

private:
    double prev_ = 0.0;
    bool has_prev_ = false;
    int decreases_ = 0;
};

constexpr int kHardModeLimit = 100000;

} // namespace

namespace {

SpectralAbscissa scan_modes(const ModelParams& params, std::optional<ModeCap> k_cap,
                            const RootObserver& observer, bool include_uniform)
{
    SpectralAbscissa out;
    out.alpha = -std::numeric_limits<double>::infinity();
    bool have_best = false;

    const auto consider = [&](ModeIndex mode, const QuasiPolyCoeffs& c) {
        if (!include_uniform && mode == ModeIndex{0, 0})
            return;
        // A mode stable for every delay cannot beat a non-negative maximum.
        if (params.tau > 0.0 && have_best && out.alpha >= 0.0 && delay_independent_stable(c))
            return;
        const RootResult root = rightmost_root(c, params.tau);
        if (observer)
            observer(c, params.tau, root);
        const double a = root.lambda.real();
        out.per_mode[mode] = a;
        if (!have_best || a > out.alpha || (a == out.alpha && mode < out.argmax_mode)) {
            out.alpha = a;
            out.argmax_mode = mode;
            out.lambda = root.lambda;
            have_best = true;
        }
    };

    DirectionStop y_stop;
    for (int ky = 0;; ++ky) {
        DirectionStop x_stop;
        QuasiPolyCoeffs row_head;
        for (int kx = 0;; ++kx) {
            const ModeIndex mode{kx, ky};
            const QuasiPolyCoeffs c = coeffs(params, mode);
            if (kx == 0)
                row_head = c;
            const double undelayed = roots_tau_zero(c).first.real();
            consider(mode, c);
            if (kx == 0)
                y_stop.observe(undelayed);
            x_stop.observe(undelayed);
            if (k_cap) {
                if (kx >= k_cap->kx_max)
                    break;
            } else if (x_stop.done(c, out.alpha)) {
                break;
            }
            if (kx > kHardModeLimit)
                throw NoConvergence("mode scan did not terminate along kx");
        }
        if (k_cap) {
            if (ky >= k_cap->ky_max)
                break;
        } else if (y_stop.done(row_head, out.alpha)) {
            break;
        }
        if (ky > kHardModeLimit)
            throw NoConvergence("mode scan did not terminate along ky");
    }
    return out;
}

} // namespace

SpectralAbscissa alpha_max(const ModelParams& params, std::optional<ModeCap> k_cap,
                           const RootObserver& observer)
{
    return scan_modes(params, k_cap, observer, true);
}

SpectralAbscissa alpha_max_inhomogeneous(const ModelParams& params, std::optional<ModeCap> k_cap,
                                         const RootObserver& observer)
{
    if (k_cap && k_cap->kx_max == 0 && k_cap->ky_max == 0)
        throw InvalidParameter("a mode cap of (0, 0) leaves no spatially varying mode");
    return scan_modes(params, k_cap, observer, false);
}

EigenPair eigen_pair(const QuasiPolyCoeffs& c, cd lambda, const ModelParams& params)
{
    const auto ss = steady_state(params);
    const cd denom = lambda + params.dv * c.mu + ss.u_star * ss.u_star;
    if (std::abs(denom) < 1e-12)
        throw SingularEigenproblem("lambda + dv mu + u*^2 vanishes");
    return {cd(1.0, 0.0), -2.0 * ss.u_star * ss.v_star / denom};
}

} // namespace turingdelay
