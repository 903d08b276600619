#pragma once

// Root counting for analytic functions by the argument principle: the number
// of zeros enclosed by a closed contour equals the net change of arg f along
// it divided by 2*pi. The phase is tracked sample to sample and any interval
// whose phase increment reaches pi/2 is bisected until it does not. With the
// derivative available, an interval is also bisected while its length exceeds
// |f / f'| at either end, which is roughly the distance to the nearest zero.
// A pair of zeros close to the contour can otherwise turn the phase by almost
// a full turn between two samples and go unnoticed.

#include <complex>
#include <functional>

namespace turingdelay {

struct Rect {
    double re_lo;
    double re_hi;
    double im_lo;
    double im_hi;

    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    std::complex<double> center() const
    {
        return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)};
    }
    bool contains(std::complex<double> z, double margin = 0.0) const
    {
        return z.real() >= re_lo - margin && z.real() <= re_hi + margin
               && z.imag() >= im_lo - margin && z.imag() <= im_hi + margin;
    }
};

struct WindingOptions {
    int samples_per_edge = 64;
    /// Upper bound on the initial spacing between samples along the contour;
    /// set it below the shortest oscillation scale of f to rule out aliasing.
    double max_step = 0.0;
    int max_depth = 30;
    std::function<std::complex<double>(std::complex<double>)> derivative;
};

using AnalyticFn = std::function<std::complex<double>(std::complex<double>)>;

/// Zeros of f inside the rectangle, counted with multiplicity.
/// Throws RootCountUnstable when f vanishes on the boundary or the phase
/// cannot be resolved.
int winding_number(const AnalyticFn& f, const Rect& rect, const WindingOptions& opts = {});

/// Zeros of f inside the disc |z - center| < radius.
int winding_number(const AnalyticFn& f, std::complex<double> center, double radius,
                   const WindingOptions& opts = {});

} // namespace turingdelay
