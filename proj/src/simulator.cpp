#include "turingdelay/simulator.hpp"

#include "turingdelay/errors.hpp"
#include "turingdelay/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace turingdelay {

std::string to_string(IcKind kind)
{
    return kind == IcKind::random ? "random" : "eigenmode";
}

IcKind ic_kind_from_string(const std::string& name)
{
    if (name == "random")
        return IcKind::random;
    if (name == "eigenmode")
        return IcKind::eigenmode;
    throw InvalidParameter("unknown initial condition kind '" + name + "'");
}

void validate(const SimConfig& config)
{
    validate(config.params);
    if (config.grid.n < 3 || config.grid.m < 3)
        throw InvalidParameter("grid needs at least 3 points per axis");
    if (!(std::isfinite(config.t_end) && config.t_end > 0.0))
        throw InvalidParameter("t_end must be positive");
    if (config.snapshot_stride < 0)
        throw InvalidParameter("snapshot_stride must be non-negative");
    if (!(std::isfinite(config.w) && config.w > 0.0))
        throw InvalidParameter("w must be positive");
    if (!(std::isfinite(config.beta) && config.beta >= 0.0 && config.beta < config.w))
        throw InvalidParameter("beta must satisfy 0 <= beta < w");
}

double choose_dt(const ModelParams& params, const Grid& grid)
{
    validate(params);
    const double d = std::max(params.du, params.dv);
    const double rate = d / (params.lx * params.lx) / (grid.dx() * grid.dx())
                        + d / (params.ly * params.ly) / (grid.dy() * grid.dy());
    const double dt0 = 0.9 * 0.5 / rate;
    if (params.tau == 0.0)
        return dt0;
    return params.tau / std::ceil(params.tau / dt0);
}

namespace {

long floor_div(long a, long b)
{
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

long positive_mod(long a, long b)
{
    const long r = a % b;
    return r < 0 ? r + b : r;
}

FieldPair blank(const Grid& grid)
{
    return {Field<double>::Zero(grid.n, grid.m), Field<double>::Zero(grid.n, grid.m)};
}

} // namespace

HistoryBuffer::HistoryBuffer(const Grid& grid, long depth, long stride)
    : depth_(depth), stride_(stride)
{
    if (depth < 0 || stride < 1)
        throw InvalidParameter("history depth must be >= 0 and stride >= 1");
    if (depth == 0)
        return;
    const long count = stride == 1 ? depth + 1 : (depth + stride - 1) / stride + 2;
    ring_.assign(static_cast<std::size_t>(count), blank(grid));
}

HistoryBuffer HistoryBuffer::for_budget(const Grid& grid, long depth, std::size_t budget_bytes)
{
    if (depth == 0)
        return HistoryBuffer(grid, 0, 1);
    const std::size_t slot_bytes = 2 * sizeof(double) * std::size_t(grid.n) * std::size_t(grid.m);
    const long max_slots = std::max<long>(3, static_cast<long>(budget_bytes / slot_bytes));
    if (depth + 1 <= max_slots)
        return HistoryBuffer(grid, depth, 1);
    long stride = 2;
    while ((depth + stride - 1) / stride + 2 > max_slots)
        ++stride;
    return HistoryBuffer(grid, depth, stride);
}

long HistoryBuffer::first_stored(long step) const
{
    return floor_div(step, stride_) * stride_;
}

FieldPair& HistoryBuffer::slot(long step)
{
    return ring_[static_cast<std::size_t>(positive_mod(floor_div(step, stride_), long(ring_.size())))];
}

const FieldPair& HistoryBuffer::slot(long step) const
{
    return ring_[static_cast<std::size_t>(positive_mod(floor_div(step, stride_), long(ring_.size())))];
}

void HistoryBuffer::record(long step, const FieldPair& state)
{
    if (depth_ == 0 || positive_mod(step, stride_) != 0)
        return;
    FieldPair& target = slot(step);
    target.u = state.u;
    target.v = state.v;
}

HistoryBuffer::View HistoryBuffer::delayed(long step) const
{
    const long target = step - depth_;
    const long lower = first_stored(target);
    const FieldPair& earlier = slot(lower);
    if (lower == target)
        return {&earlier, &earlier, 0.0};
    return {&earlier, &slot(lower + stride_), double(target - lower) / double(stride_)};
}

FieldPair HistoryBuffer::delayed_state(long step) const
{
    const View view = delayed(step);
    if (view.weight == 0.0)
        return *view.earlier;
    return {view.earlier->u + view.weight * (view.later->u - view.earlier->u),
            view.earlier->v + view.weight * (view.later->v - view.earlier->v)};
}

HistoryLayout plan_history(const SimConfig& config)
{
    HistoryLayout layout;
    layout.dt = choose_dt(config.params, config.grid);
    layout.depth = config.params.tau > 0.0 ? std::lround(config.params.tau / layout.dt) : 0;
    return layout;
}

InitialCondition make_ic_random(const SimConfig& config)
{
    validate(config);
    const HistoryLayout layout = plan_history(config);
    const Grid& grid = config.grid;
    const auto ss = steady_state<double>(config.params);

    SeededRng rng(config.seed);
    Field<double> du(grid.n, grid.m), dv(grid.n, grid.m);
    for (Eigen::Index k = 0; k < du.size(); ++k)
        du(k) = rng.uniform_symmetric();
    for (Eigen::Index k = 0; k < dv.size(); ++k)
        dv(k) = rng.uniform_symmetric();
    const double peak = std::max(du.abs().maxCoeff(), dv.abs().maxCoeff());
    const double scale = peak > 0.0 ? config.beta / peak : 0.0;

    FieldPair state{ss.u_star + scale * du, ss.v_star + scale * dv};
    HistoryBuffer history =
        HistoryBuffer::for_budget(grid, layout.depth, config.history_budget_bytes);
    history.fill([&](long, FieldPair& slot) { slot = state; });
    return {std::move(history), std::move(state), layout.dt, std::nullopt, std::nullopt};
}

InitialCondition make_ic_eigenmode(const SimConfig& config)
{
    validate(config);
    const HistoryLayout layout = plan_history(config);
    const Grid& grid = config.grid;
    const auto ss = steady_state<double>(config.params);

    const SpectralAbscissa spectrum = alpha_max(config.params);
    const ModeIndex mode = spectrum.argmax_mode;
    const std::complex<double> lambda = spectrum.lambda;
    const EigenPair pair = eigen_pair(coeffs(config.params, mode), lambda, config.params);

    Field<double> shape(grid.n, grid.m);
    for (int j = 0; j < grid.m; ++j)
        for (int i = 0; i < grid.n; ++i)
            shape(i, j) = std::cos(mode.kx * M_PI * grid.x(i)) * std::cos(mode.ky * M_PI * grid.y(j));
    const double shape_peak = shape.abs().maxCoeff();
    const double amp_peak = std::max(std::abs(pair.cu.real()), std::abs(pair.cv.real()));
    const double amplitude = config.beta / (shape_peak * amp_peak);

    auto at_time = [&](double t, FieldPair& out) {
        const std::complex<double> growth = std::exp(lambda * t);
        out.u = ss.u_star + (amplitude * (growth * pair.cu).real()) * shape;
        out.v = ss.v_star + (amplitude * (growth * pair.cv).real()) * shape;
    };

    FieldPair state;
    at_time(0.0, state);
    HistoryBuffer history =
        HistoryBuffer::for_budget(grid, layout.depth, config.history_budget_bytes);
    history.fill([&](long s, FieldPair& slot) {
        if (s == 0)
            slot = state;
        else
            at_time(double(s) * layout.dt, slot);
    });
    return {std::move(history), std::move(state), layout.dt, mode, lambda};
}

InitialCondition make_initial_condition(const SimConfig& config)
{
    return config.ic_kind == IcKind::random ? make_ic_random(config) : make_ic_eigenmode(config);
}

namespace {

struct StencilRates {
    double cux, cuy, cvx, cvy;
    double a, b;
    bool reaction;
};

struct Updated {
    double u, v;
};

// Pointwise Euler update from the neighbour sums along x and y. Additions of
// opposite neighbours happen before this call so the result is invariant
// under reflection of the grid.
template <bool Reaction>
[[gnu::always_inline]] inline Updated evolve(const StencilRates k, double dt, double uc, double vc,
                                             double u_x, double u_y, double v_x, double v_y,
                                             double uh, double vh)
{
    double fu = k.cux * (u_x - 2.0 * uc) + k.cuy * (u_y - 2.0 * uc);
    double fv = k.cvx * (v_x - 2.0 * vc) + k.cvy * (v_y - 2.0 * vc);
    if constexpr (Reaction) {
        const double u2v = uc * uc * vc;
        fu += k.a - uc - 2.0 * u2v + 3.0 * (uh * uh * vh);
        fv += k.b - u2v;
    }
    return {uc + dt * fu, vc + dt * fv};
}

// Pointers into the current, delayed and next fields at one node; the x
// neighbours sit at offsets -1 and +1, the y neighbours at `up` and `down`.
struct Span {
    const double* __restrict u;
    const double* __restrict v;
    const double* __restrict u_up;
    const double* __restrict u_down;
    const double* __restrict v_up;
    const double* __restrict v_down;
    const double* __restrict uh0;
    const double* __restrict vh0;
    const double* __restrict uh1;
    const double* __restrict vh1;
    double* __restrict un;
    double* __restrict vn;
};

template <bool Interpolate>
[[gnu::always_inline]] inline double delayed(const double* __restrict h0,
                                             const double* __restrict h1, double weight, long i)
{
    if constexpr (Interpolate)
        return h0[i] + weight * (h1[i] - h0[i]);
    else
        return h0[i];
}

// Nodes [0, len) of a run whose x neighbours are all inside the grid.
template <bool Reaction, bool Interpolate>
[[gnu::always_inline]] inline void update_run(long len, const StencilRates rates, const double dt,
                                              const double weight, const Span p)
{
    const double* __restrict u = p.u;
    const double* __restrict v = p.v;
    const double* __restrict u_up = p.u_up;
    const double* __restrict u_down = p.u_down;
    const double* __restrict v_up = p.v_up;
    const double* __restrict v_down = p.v_down;
    const double* __restrict uh0 = p.uh0;
    const double* __restrict vh0 = p.vh0;
    const double* __restrict uh1 = p.uh1;
    const double* __restrict vh1 = p.vh1;
    double* __restrict un = p.un;
    double* __restrict vn = p.vn;
    for (long i = 0; i < len; ++i) {
        const Updated r = evolve<Reaction>(rates, dt, u[i], v[i], u[i + 1] + u[i - 1],
                                           u_up[i] + u_down[i], v[i + 1] + v[i - 1],
                                           v_up[i] + v_down[i], delayed<Interpolate>(uh0, uh1, weight, i),
                                           delayed<Interpolate>(vh0, vh1, weight, i));
        un[i] = r.u;
        vn[i] = r.v;
    }
}

// A wall node whose only x neighbour is at offset `inner` (+1 or -1).
template <bool Reaction, bool Interpolate>
[[gnu::always_inline]] inline void update_wall(long inner, const StencilRates rates, const double dt,
                                               const double weight, const Span p)
{
    const Updated r = evolve<Reaction>(rates, dt, p.u[0], p.v[0], p.u[inner] + p.u[inner],
                                       p.u_up[0] + p.u_down[0], p.v[inner] + p.v[inner],
                                       p.v_up[0] + p.v_down[0],
                                       delayed<Interpolate>(p.uh0, p.uh1, weight, 0),
                                       delayed<Interpolate>(p.vh0, p.vh1, weight, 0));
    p.un[0] = r.u;
    p.vn[0] = r.v;
}

template <bool Reaction, bool Interpolate>
[[gnu::always_inline]] inline void update_grid(int n, int m, const StencilRates rates, double dt,
                                               double weight, const FieldPair& state,
                                               const FieldPair& h0, const FieldPair& h1,
                                               FieldPair& next)
{
    // Span starting at node (i, j) with the y neighbours of column j mirrored at the walls.
    auto at = [&](int i, int j) {
        const long c = long(j) * n + i;
        const long up = long(j == m - 1 ? m - 2 : j + 1) * n + i;
        const long down = long(j == 0 ? 1 : j - 1) * n + i;
        const double* u = state.u.data();
        const double* v = state.v.data();
        return Span{u + c,           v + c,           u + up,           u + down,
                    v + up,          v + down,        h0.u.data() + c,  h0.v.data() + c,
                    h1.u.data() + c, h1.v.data() + c, next.u.data() + c, next.v.data() + c};
    };

    // Interior columns as one flat run; the wall nodes it passes over are
    // overwritten below.
    if (m > 2)
        update_run<Reaction, Interpolate>(long(n) * (m - 2) - 2, rates, dt, weight, at(1, 1));
    update_run<Reaction, Interpolate>(n - 2, rates, dt, weight, at(1, 0));
    update_run<Reaction, Interpolate>(n - 2, rates, dt, weight, at(1, m - 1));
    for (int j = 0; j < m; ++j) {
        update_wall<Reaction, Interpolate>(1, rates, dt, weight, at(0, j));
        update_wall<Reaction, Interpolate>(-1, rates, dt, weight, at(n - 1, j));
    }
}

// Built for AVX2 and for the baseline instruction set; the loader picks one.
[[gnu::target_clones("avx2", "default")]] void
advance(const FieldPair& state, const HistoryBuffer& history, long step_index,
        const ModelParams& params, const Grid& grid, double dt, FieldPair& next, Terms terms)
{
    const int n = grid.n;
    const int m = grid.m;
    if (state.u.rows() != n || state.u.cols() != m || state.v.rows() != n || state.v.cols() != m)
        throw InvalidParameter("field shape does not match the grid");
    next.u.resize(n, m);
    next.v.resize(n, m);

    const double ix2 = 1.0 / (grid.dx() * grid.dx());
    const double iy2 = 1.0 / (grid.dy() * grid.dy());
    const StencilRates k{params.du / (params.lx * params.lx) * ix2,
                         params.du / (params.ly * params.ly) * iy2,
                         params.dv / (params.lx * params.lx) * ix2,
                         params.dv / (params.ly * params.ly) * iy2,
                         params.a,
                         params.b,
                         terms == Terms::full};

    const FieldPair* h0 = &state;
    const FieldPair* h1 = &state;
    double weight = 0.0;
    if (history.depth() > 0) {
        const auto view = history.delayed(step_index);
        h0 = view.earlier;
        h1 = view.later;
        weight = view.weight;
    }

    if (!k.reaction)
        update_grid<false, false>(n, m, k, dt, weight, state, *h0, *h1, next);
    else if (weight != 0.0)
        update_grid<true, true>(n, m, k, dt, weight, state, *h0, *h1, next);
    else
        update_grid<true, false>(n, m, k, dt, weight, state, *h0, *h1, next);
}

// Sup-norm deviation in one pass. Infinite values show up as an infinite
// result; NaN needs the separate finiteness check.
double fused_deviation(const FieldPair& state, double u_star, double v_star)
{
    return (state.u - u_star).abs().max((state.v - v_star).abs()).maxCoeff();
}

bool all_finite(const FieldPair& state)
{
    return state.u.allFinite() && state.v.allFinite();
}

double min_concentration(const FieldPair& state)
{
    return std::min(state.u.minCoeff(), state.v.minCoeff());
}

[[noreturn]] void diverged(long step)
{
    throw SimulationDiverged("non-finite concentration by step " + std::to_string(step));
}

} // namespace

StepStats step_into(const FieldPair& state, const HistoryBuffer& history, long step_index,
                    const ModelParams& params, const Grid& grid, double dt, FieldPair& next,
                    Terms terms)
{
    advance(state, history, step_index, params, grid, dt, next, terms);
    if (!all_finite(next))
        diverged(step_index + 1);
    const auto ss = steady_state<double>(params);
    return {fused_deviation(next, ss.u_star, ss.v_star), min_concentration(next)};
}

FieldPair step(const FieldPair& state, const HistoryBuffer& history, long step_index,
               const ModelParams& params, const Grid& grid, double dt, Terms terms)
{
    FieldPair next;
    step_into(state, history, step_index, params, grid, dt, next, terms);
    return next;
}

double deviation_sup_norm(const FieldPair& state, const ModelParams& params)
{
    const auto ss = steady_state<double>(params);
    return std::max((state.u - ss.u_star).abs().maxCoeff(), (state.v - ss.v_star).abs().maxCoeff());
}

RunResult run(const SimConfig& config)
{
    InitialCondition ic = make_initial_condition(config);
    const double dt = ic.dt;
    const long total = std::max(1L, static_cast<long>(std::ceil(config.t_end / dt - 1e-9)));

    RunResult result;
    TTPRecord& record = result.record;
    record.config = config;
    record.dt = dt;
    record.history_stride = ic.history.stride();

    FieldPair current = std::move(ic.state);
    FieldPair next = current;
    HistoryBuffer& history = ic.history;

    if (config.snapshot_stride > 0)
        result.snapshots.push_back({0, 0.0, current});

    double norm = deviation_sup_norm(current, config.params);
    if (norm >= config.w) {
        record.t_pattern = 0.0;
        record.crossing_norm = norm;
    }
    record.negative_seen = std::min(current.u.minCoeff(), current.v.minCoeff()) < 0.0;

    // Finiteness and sign are checked every few steps, at the crossing and at
    // the end; infinite values are caught every step by the norm itself.
    constexpr long check_every = 64;
    const auto ss = steady_state<double>(config.params);
    long s = 0;
    while (s < total) {
        if (record.t_pattern && config.stop_at_pattern)
            break;
        advance(current, history, s, config.params, config.grid, dt, next, Terms::full);
        ++s;
        std::swap(current, next);
        history.record(s, current);
        norm = fused_deviation(current, ss.u_star, ss.v_star);
        const bool crossing = !record.t_pattern && norm >= config.w;
        if (!std::isfinite(norm) || ((crossing || s % check_every == 0) && !all_finite(current)))
            diverged(s);
        if (s % check_every == 0 && min_concentration(current) < 0.0)
            record.negative_seen = true;
        if (crossing) {
            record.t_pattern = double(s) * dt;
            record.crossing_norm = norm;
        }
        if (config.snapshot_stride > 0 && s % config.snapshot_stride == 0 && s != total)
            result.snapshots.push_back({s, double(s) * dt, current});
    }
    if (!all_finite(current))
        diverged(s);
    if (min_concentration(current) < 0.0)
        record.negative_seen = true;

    record.steps = s;
    record.final_norm = norm;
    result.snapshots.push_back({s, double(s) * dt, current});
    result.final_state = std::move(current);
    return result;
}

} // namespace turingdelay
