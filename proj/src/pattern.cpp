#include "turingdelay/simulator.hpp"

#include <cmath>
#include <numbers>

namespace turingdelay {

std::string to_string(PatternKind kind)
{
    switch (kind) {
    case PatternKind::none: return "none";
    case PatternKind::stripes: return "stripes";
    case PatternKind::spots: return "spots";
    case PatternKind::mixed: return "mixed";
    }
    return "unknown";
}

namespace {

// DCT-I basis: cos(pi k i / (n-1)) with half weights at both ends. With
// zero-flux walls the cosine modes land exactly on integer bins.
Eigen::MatrixXd cosine_basis(int n)
{
    Eigen::MatrixXd basis(n, n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            basis(k, i) = w * std::cos(std::numbers::pi * double(k) * double(i) / double(n - 1));
        }
    }
    return basis;
}

// Squared norm of the sampled cosine k under the same weights.
double bin_norm(int k, int n)
{
    return (k == 0 || k == n - 1) ? double(n - 1) : 0.5 * double(n - 1);
}

} // namespace

PatternSpectrum analyse_pattern(const FieldPair& field, const Grid& grid)
{
    const int n = grid.n;
    const int m = grid.m;
    PatternSpectrum out;

    const Eigen::MatrixXd u = (field.u - field.u.mean()).matrix();
    if (u.squaredNorm() < 1e-6 * double(n) * double(m))
        return out;

    const Eigen::MatrixXd coef = cosine_basis(n) * u * cosine_basis(m).transpose();
    Eigen::ArrayXXd energy(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i)
            energy(i, j) = coef(i, j) * coef(i, j) / (bin_norm(i, n) * bin_norm(j, m));
    energy(0, 0) = 0.0;

    out.non_dc_energy = energy.sum();
    if (!(out.non_dc_energy > 0.0))
        return out;

    Eigen::Index pi = 0, pj = 0;
    energy.maxCoeff(&pi, &pj);
    out.peak = {int(pi), int(pj)};

    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            if (energy(i, j) == 0.0)
                continue;
            const double degrees = std::atan2(double(j), double(i)) * 180.0 / std::numbers::pi;
            const int bin = std::min(2, int(degrees / 30.0));
            out.direction_fraction[std::size_t(bin)] += energy(i, j);
        }
    }
    for (double& f : out.direction_fraction)
        f /= out.non_dc_energy;

    // Wavevectors within one bin of either spectral axis.
    const double band_x = energy.leftCols(std::min(2, m)).sum();
    const double band_y = energy.topRows(std::min(2, n)).sum();
    out.axis_band_fraction = std::max(band_x, band_y) / out.non_dc_energy;

    bool spread = true;
    for (double f : out.direction_fraction)
        spread = spread && f >= 0.15;

    if (spread)
        out.kind = PatternKind::spots;
    else if (std::min(out.peak.kx, out.peak.ky) == 0 || out.axis_band_fraction > 0.7)
        out.kind = PatternKind::stripes;
    else
        out.kind = PatternKind::mixed;
    return out;
}

PatternKind classify_pattern(const FieldPair& field, const Grid& grid)
{
    return analyse_pattern(field, grid).kind;
}

} // namespace turingdelay
