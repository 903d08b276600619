#pragma once

// Explicit finite-difference integration of the delayed LI system on the unit
// square with zero-flux boundaries.

#include "turingdelay/dispersion.hpp"
#include "turingdelay/kinetics.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace turingdelay {

/// n x m nodes covering [0, 1]^2, x_1 = y_1 = 0 and x_n = y_m = 1.
struct Grid {
    int n = 101;
    int m = 101;

    double dx() const { return 1.0 / (n - 1); }
    double dy() const { return 1.0 / (m - 1); }
    double x(int i) const { return i * dx(); }
    double y(int j) const { return j * dy(); }
};

/// Field(i, j) is the value at (x_i, y_j).
template <typename Scalar = double>
using Field = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct FieldPair {
    Field<double> u;
    Field<double> v;
};

enum class IcKind { random, eigenmode };

std::string to_string(IcKind kind);
IcKind ic_kind_from_string(const std::string& name);

struct SimConfig {
    ModelParams params;
    Grid grid;
    double t_end = 500.0;
    /// Steps between saved frames; 0 keeps only the final frame.
    long snapshot_stride = 0;
    IcKind ic_kind = IcKind::random;
    std::uint64_t seed = 0;
    /// Sup-norm of the initial perturbation.
    double beta = 0.005;
    /// Sup-norm threshold that defines the time to pattern.
    double w = 0.01;
    /// End the run at the first threshold crossing.
    bool stop_at_pattern = false;
    /// Memory allowed for the delay history. When the per-step history does
    /// not fit, states are kept every few steps and interpolated linearly.
    std::size_t history_budget_bytes = std::size_t(512) << 20;
};

void validate(const SimConfig& config);

/// Zero-flux five-point Laplacian with mirror ghost nodes, returned as
/// separate x and y parts scaled by 1/dx^2 and 1/dy^2.
template <typename Derived>
Field<typename Derived::Scalar> laplacian_x(const Eigen::ArrayBase<Derived>& f, const Grid& grid)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = f.rows();
    Field<Scalar> out(f.rows(), f.cols());
    const Scalar c = Scalar(1) / (grid.dx() * grid.dx());
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index im = i == 0 ? 1 : i - 1;
            const Eigen::Index ip = i == n - 1 ? n - 2 : i + 1;
            out(i, j) = c * ((f(ip, j) + f(im, j)) - Scalar(2) * f(i, j));
        }
    }
    return out;
}

template <typename Derived>
Field<typename Derived::Scalar> laplacian_y(const Eigen::ArrayBase<Derived>& f, const Grid& grid)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index m = f.cols();
    Field<Scalar> out(f.rows(), f.cols());
    const Scalar c = Scalar(1) / (grid.dy() * grid.dy());
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index jm = j == 0 ? 1 : j - 1;
        const Eigen::Index jp = j == m - 1 ? m - 2 : j + 1;
        out.col(j) = c * ((f.col(jp) + f.col(jm)) - Scalar(2) * f.col(j));
    }
    return out;
}

template <typename Derived>
Field<typename Derived::Scalar> laplacian_neumann(const Eigen::ArrayBase<Derived>& f,
                                                  const Grid& grid)
{
    return laplacian_x(f, grid) + laplacian_y(f, grid);
}

/// Largest stable step for the rescaled diffusion terms (effective
/// coefficients d/L^2) with a 0.9 safety factor, shrunk when tau > 0 so that
/// tau is an exact multiple of the step.
double choose_dt(const ModelParams& params, const Grid& grid);

/// Ring of past states covering [t - tau, t]. Step s is time s*dt and the
/// delay spans `depth` steps. States are stored every `stride` steps; reads
/// between stored steps interpolate linearly in time (exact for stride 1).
class HistoryBuffer {
public:
    HistoryBuffer(const Grid& grid, long depth, long stride);

    /// Picks the stride from the memory budget.
    static HistoryBuffer for_budget(const Grid& grid, long depth, std::size_t budget_bytes);

    long depth() const { return depth_; }
    long stride() const { return stride_; }
    std::size_t slots() const { return ring_.size(); }

    /// Fills every stored step in [-depth, 0] from a function of the step index.
    template <typename Fn>
    void fill(Fn&& initial)
    {
        if (depth_ == 0)
            return;
        for (long s = first_stored(-depth_); s <= 0; s += stride_)
            initial(s, slot(s));
    }

    /// Stores the state of step s when s falls on the stride.
    void record(long step, const FieldPair& state);

    struct View {
        const FieldPair* earlier;
        const FieldPair* later;
        double weight; // of `later`
    };

    /// Stored states bracketing step `step - depth`, the delayed state read
    /// when advancing from step `step`. Requires depth > 0.
    View delayed(long step) const;

    /// Materialised delayed state (for inspection and tests).
    FieldPair delayed_state(long step) const;

private:
    long first_stored(long step) const;
    FieldPair& slot(long step);
    const FieldPair& slot(long step) const;

    long depth_;
    long stride_;
    std::vector<FieldPair> ring_;
};

struct HistoryLayout {
    double dt = 0.0;
    long depth = 0;
};

HistoryLayout plan_history(const SimConfig& config);

/// Uniform random perturbation of the steady state with sup-norm beta,
/// constant over [-tau, 0]. Returns the history and the state at t = 0.
struct InitialCondition {
    HistoryBuffer history;
    FieldPair state;
    double dt;
    /// Dominant mode and its rightmost root (eigenmode initial data only).
    std::optional<ModeIndex> mode;
    std::optional<std::complex<double>> lambda;
};

InitialCondition make_ic_random(const SimConfig& config);

/// Real part of the dominant linear mode, e^{lambda t} (cu, cv) cos(kx pi x) cos(ky pi y),
/// scaled so that its t = 0 sup-norm over both fields is beta.
InitialCondition make_ic_eigenmode(const SimConfig& config);

InitialCondition make_initial_condition(const SimConfig& config);

struct StepStats {
    /// max over nodes and both fields of |field - steady value|
    double deviation = 0.0;
    double min_concentration = 0.0;
};

enum class Terms { full, diffusion_only };

/// One explicit Euler step from `state` (step index `step_index`) into
/// `next`. The delayed state is read from `history` (ignored when its depth is
/// zero). Throws SimulationDiverged on non-finite values.
StepStats step_into(const FieldPair& state, const HistoryBuffer& history, long step_index,
                    const ModelParams& params, const Grid& grid, double dt, FieldPair& next,
                    Terms terms = Terms::full);

FieldPair step(const FieldPair& state, const HistoryBuffer& history, long step_index,
               const ModelParams& params, const Grid& grid, double dt, Terms terms = Terms::full);

double deviation_sup_norm(const FieldPair& state, const ModelParams& params);

struct TTPRecord {
    std::optional<double> t_pattern;
    double crossing_norm = 0.0;
    SimConfig config;
    double dt = 0.0;
    long steps = 0;
    long history_stride = 1;
    double final_norm = 0.0;
    bool negative_seen = false;
};

struct Snapshot {
    long step;
    double time;
    FieldPair fields;
};

struct RunResult {
    TTPRecord record;
    std::vector<Snapshot> snapshots;
    FieldPair final_state;
};

RunResult run(const SimConfig& config);

enum class PatternKind { none, stripes, spots, mixed };

std::string to_string(PatternKind kind);

struct PatternSpectrum {
    PatternKind kind = PatternKind::none;
    ModeIndex peak;
    double non_dc_energy = 0.0;
    /// Fractions of non-DC energy with direction in [0,30), [30,60), [60,90] degrees.
    std::array<double, 3> direction_fraction{};
    double axis_band_fraction = 0.0;
};

/// Cosine (even-extension Fourier) spectrum of u minus its mean. Spots need
/// three 30-degree direction bins each holding at least 15% of the non-DC
/// energy; stripes need an axis-aligned peak or 70% of the energy within one
/// bin of the peak along an axis.
PatternSpectrum analyse_pattern(const FieldPair& field, const Grid& grid);

PatternKind classify_pattern(const FieldPair& field, const Grid& grid);

} // namespace turingdelay
