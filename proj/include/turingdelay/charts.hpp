#pragma once

#include "turingdelay/dispersion.hpp"
#include "turingdelay/kinetics.hpp"
#include "turingdelay/parallel.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace turingdelay {

/// `count` equally spaced samples from `min` to `max` inclusive.
struct Axis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int count = 2;

    double at(int i) const;
    double step() const { return (max - min) / (count - 1); }
};

void validate(const Axis& axis);

struct ChartMeta {
    ModelParams params;
    std::string generated_at;
    /// Free-form key/value annotations (assumptions, swept variable, ...).
    std::map<std::string, std::string> notes;
};

/// values(row, col) is the sample at (y.at(row), x.at(col)); curves have one
/// row and no y axis. Failed cells are NaN.
struct ScalarChart {
    Axis x;
    std::optional<Axis> y;
    Eigen::ArrayXXd values;
    ChartMeta meta;
};

using Polyline = std::vector<Eigen::Vector2d>;

/// Level set of a sampled field by marching squares with linear
/// interpolation along cell edges. Cells with a NaN corner are skipped.
/// Saddle cells are resolved by the cell-centre average.
std::vector<Polyline> marching_squares(const Eigen::ArrayXXd& values, const Axis& x, const Axis& y,
                                       double level = 0.0);

/// Accumulates the checks every reported rightmost root must pass:
/// |D(lambda)| < residual_tol and exactly one root in a small disc around it.
class RootAudit {
public:
    explicit RootAudit(double residual_tol = kDefaultRootTol, double disc_radius = 1e-3);

    void record(const QuasiPolyCoeffs& c, double tau, const RootResult& root);
    RootObserver observer();

    std::size_t checked() const;
    std::size_t residual_failures() const;
    /// Disc counts other than 1, excluding roots already flagged as multiple.
    std::size_t disc_failures() const;
    /// Flagged multiple roots whose disc holds more than one zero.
    std::size_t multiple_roots() const;
    std::size_t flagged() const;
    double max_residual() const;
    /// Descriptions of the first few failures.
    std::vector<std::string> failures() const;

private:
    double residual_tol_;
    double disc_radius_;
    mutable std::mutex mutex_;
    std::size_t checked_ = 0;
    std::size_t residual_failures_ = 0;
    std::size_t disc_failures_ = 0;
    std::size_t multiple_roots_ = 0;
    std::size_t flagged_ = 0;
    double max_residual_ = 0.0;
    std::vector<std::string> failures_;
};

struct ChartOptions {
    int jobs = 1;
    RootAudit* audit = nullptr;
    std::optional<ModeCap> k_cap;
};

struct TuringSpace {
    ScalarChart alpha;
    ScalarChart alpha_00;
    /// Largest growth rate over the spatially varying modes only.
    ScalarChart alpha_inhomogeneous;
    /// Zero level of alpha itself. Where the uniform mode is unstable it runs
    /// along the alpha_00 = 0 curve, because alpha >= alpha_00.
    std::vector<Polyline> alpha_zero;
    /// Boundary of instability without diffusion.
    std::vector<Polyline> alpha_00_zero;
    /// Boundary of instability of the spatially varying modes; together with
    /// alpha_00_zero it encloses the Turing region.
    std::vector<Polyline> turing_zero;
};

/// alpha over an (a, b) grid; x axis is a, y axis is b.
TuringSpace turing_space(const ModelParams& tmpl, const Axis& a_range, const Axis& b_range,
                         const ChartOptions& options = {});

ScalarChart alpha_vs_tau(const ModelParams& tmpl, const Axis& tau_range,
                         const ChartOptions& options = {});

/// One row per mode, x axis is Lx.
struct ModeCurves {
    std::vector<ModeIndex> modes;
    ScalarChart chart;
};

ModeCurves alpha_vs_Lx(const ModelParams& tmpl, const std::vector<ModeIndex>& modes,
                       const Axis& lx_range, const ChartOptions& options = {});

/// x axis Lx (starting at 0.05 or above), y axis tau.
ScalarChart heatmap_Lx_tau(const ModelParams& tmpl, const Axis& lx_range, const Axis& tau_range,
                           const ChartOptions& options = {});

constexpr double kMinDomainLength = 0.05;

/// Smallest delay at which alpha changes sign, located on a 0.01 grid over
/// [0, tau_hi] and refined by bisection to 1e-4.
double critical_tau(const ModelParams& tmpl, double tau_hi, const ChartOptions& options = {});

struct ModeSwitch {
    double lx;
    ModeIndex before;
    ModeIndex after;
};

/// Every change of the dominant mode along Lx, located on a 1e-3 grid and
/// refined by bisection to 1e-5.
std::vector<ModeSwitch> mode_switch_Lx(const ModelParams& tmpl, double lx_min, double lx_max,
                                       const ChartOptions& options = {});

std::string timestamp_utc();

} // namespace turingdelay
