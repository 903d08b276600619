#pragma once

// Time to pattern: the linear-theory estimate ln(w / beta) / alpha and the
// simulated first-crossing times, swept over the delay or the domain length.

#include "turingdelay/charts.hpp"
#include "turingdelay/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace turingdelay {

/// ln(w / beta) / alpha for alpha > 0, nothing otherwise. Requires 0 < beta <= w.
std::optional<double> predicted_ttp_from_alpha(double alpha, double beta, double w);

std::optional<double> predicted_ttp(const ModelParams& params, double beta, double w);

struct ReplicateMean {
    double mean;
    int censored;
};

/// Mean over the finite entries; throws AllCensored when there are none.
ReplicateMean replicate_mean(const std::vector<std::optional<double>>& ttps);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Ordinary least squares over the points where y is present; needs three.
std::optional<LinearFit> fit_line(const std::vector<double>& x,
                                  const std::vector<std::optional<double>>& y);

/// Indices i (0 < i < size-1) of strict local extrema within runs of present
/// values; flat steps are skipped when deciding the direction.
std::vector<std::size_t> interior_extrema(const std::vector<std::optional<double>>& values);

enum class SweepAxis { tau, lx };

std::string to_string(SweepAxis axis);

struct SweepOptions {
    int replicates = 10;
    bool simulate_eigenmode = false;
    bool simulate_random = false;
    /// Grid, t_end, beta, w and history budget for the simulations; params
    /// and seed are overwritten per point.
    SimConfig sim;
    std::uint64_t master_seed = 0;
    int jobs = 1;
};

struct TTPSweep {
    SweepAxis axis = SweepAxis::tau;
    std::vector<double> samples;
    /// Parameters shared by every point; the swept field is overwritten.
    ModelParams params;
    std::vector<double> alpha;
    /// Dominant root is complex: the norm oscillates while it grows, so the
    /// simulated crossing may lead or lag the estimate by up to a period.
    std::vector<bool> oscillatory;
    std::vector<std::optional<double>> predicted;
    std::vector<std::optional<double>> simulated_eigenmode;
    std::vector<std::vector<std::optional<double>>> simulated_random;
    std::vector<std::optional<double>> random_mean;
    std::vector<int> censored;
    std::optional<LinearFit> fit;
    /// Lx sweeps: interior local extrema of the predicted curve and the
    /// dominant-mode switches over the same range.
    std::vector<double> extrema;
    std::vector<ModeSwitch> mode_switches;
    std::vector<std::uint64_t> seeds;
};

/// One sweep per Lx in lx_list over the delays in tau_samples.
std::vector<TTPSweep> ttp_vs_tau(const ModelParams& tmpl, const std::vector<double>& tau_samples,
                                 const std::vector<double>& lx_list, const SweepOptions& options);

/// One sweep per tau in tau_list over the lengths in lx_samples.
std::vector<TTPSweep> ttp_vs_Lx(const ModelParams& tmpl, const std::vector<double>& lx_samples,
                                const std::vector<double>& tau_list, const SweepOptions& options);

/// Columns axis_value, predicted, simulated_eigenmode, simulated_random_mean,
/// n_censored, replicate_1..k; fit and extrema in a trailing comment block.
void write_sweep_csv(const TTPSweep& sweep, const std::filesystem::path& path);

} // namespace turingdelay
