#pragma once

// Linear stability of the homogeneous steady state. Each cosine mode
// cos(kx pi x) cos(ky pi y) has the characteristic quasi-polynomial
//
//   D(lambda, tau) = lambda^2 + p lambda + q + (r lambda + s) exp(-lambda tau)
//
// whose rightmost root gives the mode's growth rate. The spectral abscissa is
// the maximum of those growth rates over all modes.

#include "turingdelay/argument_principle.hpp"
#include "turingdelay/kinetics.hpp"

#include <compare>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <utility>

namespace turingdelay {

struct ModeIndex {
    int kx = 0;
    int ky = 0;

    friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

struct QuasiPolyCoeffs {
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    double s = 0.0;
    /// Laplacian eigenvalue pi^2 (kx^2/Lx^2 + ky^2/Ly^2) of the mode.
    double mu = 0.0;
};

struct RootResult {
    std::complex<double> lambda;
    double residual = 0.0;
    bool multiplicity_flag = false;
    /// How many times the left edge of the search rectangle had to be lowered.
    int sigma_retries = 0;
};

struct SpectralAbscissa {
    double alpha = 0.0;
    ModeIndex argmax_mode;
    /// Rightmost root of the argmax mode.
    std::complex<double> lambda;
    /// Every mode whose rightmost root was computed. Modes that were proven
    /// stable for all delays while the running maximum was already
    /// non-negative are skipped and absent here.
    std::map<ModeIndex, double> per_mode;
};

/// Upper mode index per axis; overrides the automatic truncation rule.
struct ModeCap {
    int kx_max = 0;
    int ky_max = 0;
};

constexpr double kDefaultRootTol = 1e-10;

QuasiPolyCoeffs coeffs(const ModelParams& params, ModeIndex mode);

template <typename Scalar>
std::complex<Scalar> eval_char(std::complex<Scalar> lambda, Scalar tau, const QuasiPolyCoeffs& c)
{
    const std::complex<Scalar> delayed = std::exp(-lambda * tau);
    return lambda * lambda + Scalar(c.p) * lambda + Scalar(c.q)
           + (Scalar(c.r) * lambda + Scalar(c.s)) * delayed;
}

/// dD/dlambda = 2 lambda + p + (r - tau (r lambda + s)) exp(-lambda tau)
template <typename Scalar>
std::complex<Scalar> eval_char_derivative(std::complex<Scalar> lambda, Scalar tau,
                                          const QuasiPolyCoeffs& c)
{
    const std::complex<Scalar> delayed = std::exp(-lambda * tau);
    return Scalar(2) * lambda + Scalar(c.p)
           + (Scalar(c.r) - tau * (Scalar(c.r) * lambda + Scalar(c.s))) * delayed;
}

/// Roots of lambda^2 + (p + r) lambda + (q + s), larger real part first
/// (for a complex pair the member with positive imaginary part first).
std::pair<std::complex<double>, std::complex<double>> roots_tau_zero(const QuasiPolyCoeffs& c);

/// True when every root has negative real part for every tau >= 0: the
/// undelayed quadratic is stable, q > |s|, and no root can cross the
/// imaginary axis (the crossing polynomial w^4 + (p^2 - r^2 - 2q) w^2 + q^2 - s^2
/// has no positive root).
bool delay_independent_stable(const QuasiPolyCoeffs& c);

/// Rightmost root of D(., tau). For tau > 0 the roots in a right half-plane
/// {Re >= sigma} lie in a computable disc; the corresponding rectangle is
/// bisected, right half first, with root counts from the argument principle
/// until the rightmost root is isolated and then polished by Newton.
RootResult rightmost_root(const QuasiPolyCoeffs& c, double tau, double tol = kDefaultRootTol);

/// Number of roots of D(., tau) in the open disc |lambda - center| < radius.
int count_roots_in_disc(const QuasiPolyCoeffs& c, double tau, std::complex<double> center,
                        double radius);

int count_roots_in_rect(const QuasiPolyCoeffs& c, double tau, const Rect& rect);

double alpha_mode(const ModelParams& params, ModeIndex mode);

/// Called for every rightmost root computed during a mode scan.
using RootObserver =
    std::function<void(const QuasiPolyCoeffs&, double tau, const RootResult&)>;

/// Spectral abscissa over all modes (kx, ky) >= 0. Each axis is scanned
/// outward until the mode is stable for every delay and its undelayed growth
/// rate has fallen three times in a row and sits below the running maximum.
/// Ties go to the lexicographically smallest (kx, ky).
SpectralAbscissa alpha_max(const ModelParams& params, std::optional<ModeCap> k_cap = std::nullopt,
                           const RootObserver& observer = {});

/// Same scan restricted to the spatially varying modes, (kx, ky) != (0, 0).
/// Its zero level separates diffusion-driven instability from stability.
SpectralAbscissa alpha_max_inhomogeneous(const ModelParams& params,
                                         std::optional<ModeCap> k_cap = std::nullopt,
                                         const RootObserver& observer = {});

struct EigenPair {
    std::complex<double> cu;
    std::complex<double> cv;
};

/// Eigenvector of the linearisation for root lambda, normalised to cu = 1.
EigenPair eigen_pair(const QuasiPolyCoeffs& c, std::complex<double> lambda,
                     const ModelParams& params);

} // namespace turingdelay
