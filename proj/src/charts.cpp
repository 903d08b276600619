#include "turingdelay/charts.hpp"

#include "turingdelay/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <sstream>

namespace turingdelay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string describe(const QuasiPolyCoeffs& c, double tau, const RootResult& root, double residual)
{
    std::ostringstream out;
    out.precision(10);
    out << "mu=" << c.mu << " tau=" << tau << " lambda=" << root.lambda.real() << (root.lambda.imag() < 0 ? "" : "+")
        << root.lambda.imag() << "i |D|=" << residual;
    return out.str();
}

ChartMeta make_meta(const ModelParams& params)
{
    return {params, timestamp_utc(), {{"determinism", "no randomness; identical inputs give identical values"}}};
}

RootObserver observer_of(const ChartOptions& options)
{
    return options.audit ? options.audit->observer() : RootObserver{};
}

double audited_alpha_mode(const ModelParams& params, ModeIndex mode, const ChartOptions& options)
{
    const QuasiPolyCoeffs c = coeffs(params, mode);
    const RootResult root = rightmost_root(c, params.tau);
    if (options.audit)
        options.audit->record(c, params.tau, root);
    return root.lambda.real();
}

double safe_alpha(const ModelParams& params, const ChartOptions& options)
{
    try {
        return alpha_max(params, options.k_cap, observer_of(options)).alpha;
    } catch (const Error&) {
        return kNaN;
    }
}

double safe_alpha_inhomogeneous(const ModelParams& params, const ChartOptions& options)
{
    try {
        return alpha_max_inhomogeneous(params, options.k_cap, observer_of(options)).alpha;
    } catch (const Error&) {
        return kNaN;
    }
}

} // namespace

double Axis::at(int i) const
{
    if (i == count - 1)
        return max;
    return min + (max - min) * double(i) / double(count - 1);
}

void validate(const Axis& axis)
{
    if (axis.count < 2)
        throw InvalidParameter("axis '" + axis.name + "' needs at least 2 samples");
    if (!(std::isfinite(axis.min) && std::isfinite(axis.max) && axis.min < axis.max))
        throw InvalidParameter("axis '" + axis.name + "' needs finite min < max");
}

std::string timestamp_utc()
{
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

RootAudit::RootAudit(double residual_tol, double disc_radius)
    : residual_tol_(residual_tol), disc_radius_(disc_radius)
{
}

void RootAudit::record(const QuasiPolyCoeffs& c, double tau, const RootResult& root)
{
    const double residual = std::abs(eval_char(root.lambda, tau, c));
    int count = -1;
    try {
        count = count_roots_in_disc(c, tau, root.lambda, disc_radius_);
    } catch (const Error&) {
    }

    std::lock_guard lock(mutex_);
    ++checked_;
    max_residual_ = std::max(max_residual_, residual);
    if (root.multiplicity_flag)
        ++flagged_;
    const bool bad_residual = !(residual < residual_tol_);
    const bool multiple = root.multiplicity_flag && count > 1;
    const bool bad_disc = count != 1 && !multiple;
    residual_failures_ += bad_residual;
    disc_failures_ += bad_disc;
    multiple_roots_ += multiple;
    if ((bad_residual || bad_disc || multiple) && failures_.size() < 10)
        failures_.push_back(describe(c, tau, root, residual) + " disc_count=" + std::to_string(count)
                            + (root.multiplicity_flag ? " (flagged multiple)" : ""));
}

RootObserver RootAudit::observer()
{
    return [this](const QuasiPolyCoeffs& c, double tau, const RootResult& root) { record(c, tau, root); };
}

std::size_t RootAudit::checked() const
{
    std::lock_guard lock(mutex_);
    return checked_;
}

std::size_t RootAudit::residual_failures() const
{
    std::lock_guard lock(mutex_);
    return residual_failures_;
}

std::size_t RootAudit::disc_failures() const
{
    std::lock_guard lock(mutex_);
    return disc_failures_;
}

std::size_t RootAudit::multiple_roots() const
{
    std::lock_guard lock(mutex_);
    return multiple_roots_;
}

std::size_t RootAudit::flagged() const
{
    std::lock_guard lock(mutex_);
    return flagged_;
}

double RootAudit::max_residual() const
{
    std::lock_guard lock(mutex_);
    return max_residual_;
}

std::vector<std::string> RootAudit::failures() const
{
    std::lock_guard lock(mutex_);
    return failures_;
}

TuringSpace turing_space(const ModelParams& tmpl, const Axis& a_range, const Axis& b_range,
                         const ChartOptions& options)
{
    validate(a_range);
    validate(b_range);
    if (!(a_range.min > 0.0 && b_range.min > 0.0))
        throw InvalidParameter("turing space ranges must be positive");
    validate(tmpl);

    TuringSpace out;
    out.alpha = {a_range, b_range, Eigen::ArrayXXd(b_range.count, a_range.count), make_meta(tmpl)};
    out.alpha_00 = out.alpha;
    out.alpha_inhomogeneous = out.alpha;
    out.alpha.meta.notes["quantity"] = "alpha";
    out.alpha_00.meta.notes["quantity"] = "alpha_00";
    out.alpha_inhomogeneous.meta.notes["quantity"] = "alpha over modes (kx, ky) != (0, 0)";

    const std::size_t cells = std::size_t(a_range.count) * std::size_t(b_range.count);
    parallel_for(cells, options.jobs, [&](std::size_t k) {
        const int row = int(k / std::size_t(a_range.count));
        const int col = int(k % std::size_t(a_range.count));
        ModelParams p = tmpl;
        p.a = a_range.at(col);
        p.b = b_range.at(row);
        out.alpha.values(row, col) = safe_alpha(p, options);
        out.alpha_inhomogeneous.values(row, col) = safe_alpha_inhomogeneous(p, options);
        try {
            out.alpha_00.values(row, col) = audited_alpha_mode(p, {0, 0}, options);
        } catch (const Error&) {
            out.alpha_00.values(row, col) = kNaN;
        }
    });

    out.alpha_zero = marching_squares(out.alpha.values, a_range, b_range, 0.0);
    out.alpha_00_zero = marching_squares(out.alpha_00.values, a_range, b_range, 0.0);
    out.turing_zero = marching_squares(out.alpha_inhomogeneous.values, a_range, b_range, 0.0);
    return out;
}

ScalarChart alpha_vs_tau(const ModelParams& tmpl, const Axis& tau_range, const ChartOptions& options)
{
    validate(tau_range);
    if (tau_range.min < 0.0)
        throw InvalidParameter("delays must be non-negative");
    validate(tmpl);

    ScalarChart chart{tau_range, std::nullopt, Eigen::ArrayXXd(1, tau_range.count), make_meta(tmpl)};
    chart.meta.notes["quantity"] = "alpha";
    parallel_for(std::size_t(tau_range.count), options.jobs, [&](std::size_t i) {
        ModelParams p = tmpl;
        p.tau = tau_range.at(int(i));
        chart.values(0, Eigen::Index(i)) = safe_alpha(p, options);
    });
    return chart;
}

ModeCurves alpha_vs_Lx(const ModelParams& tmpl, const std::vector<ModeIndex>& modes,
                       const Axis& lx_range, const ChartOptions& options)
{
    validate(lx_range);
    if (!(lx_range.min > 0.0))
        throw InvalidParameter("Lx range must be positive");
    validate(tmpl);

    Axis mode_axis{"mode", 0.0, double(std::max<std::size_t>(modes.size(), 2) - 1),
                   int(std::max<std::size_t>(modes.size(), 2))};
    ModeCurves out{modes,
                   {lx_range, mode_axis, Eigen::ArrayXXd(Eigen::Index(modes.size()), lx_range.count),
                    make_meta(tmpl)}};
    std::string listing;
    for (const ModeIndex& m : modes)
        listing += (listing.empty() ? "" : " ") + std::to_string(m.kx) + ":" + std::to_string(m.ky);
    out.chart.meta.notes["modes"] = listing;
    out.chart.meta.notes["quantity"] = "alpha per mode";

    const std::size_t cells = modes.size() * std::size_t(lx_range.count);
    parallel_for(cells, options.jobs, [&](std::size_t k) {
        const std::size_t row = k / std::size_t(lx_range.count);
        const int col = int(k % std::size_t(lx_range.count));
        ModelParams p = tmpl;
        p.lx = lx_range.at(col);
        try {
            out.chart.values(Eigen::Index(row), col) = audited_alpha_mode(p, modes[row], options);
        } catch (const Error&) {
            out.chart.values(Eigen::Index(row), col) = kNaN;
        }
    });
    return out;
}

ScalarChart heatmap_Lx_tau(const ModelParams& tmpl, const Axis& lx_range, const Axis& tau_range,
                           const ChartOptions& options)
{
    validate(lx_range);
    validate(tau_range);
    if (lx_range.min < kMinDomainLength)
        throw InvalidParameter("Lx grid must start at 0.05 or above");
    if (tau_range.min < 0.0)
        throw InvalidParameter("delays must be non-negative");
    validate(tmpl);

    ScalarChart chart{lx_range, tau_range, Eigen::ArrayXXd(tau_range.count, lx_range.count),
                      make_meta(tmpl)};
    chart.meta.notes["quantity"] = "alpha";
    const std::size_t cells = std::size_t(lx_range.count) * std::size_t(tau_range.count);
    parallel_for(cells, options.jobs, [&](std::size_t k) {
        const int row = int(k / std::size_t(lx_range.count));
        const int col = int(k % std::size_t(lx_range.count));
        ModelParams p = tmpl;
        p.lx = lx_range.at(col);
        p.tau = tau_range.at(row);
        chart.values(row, col) = safe_alpha(p, options);
    });
    return chart;
}

double critical_tau(const ModelParams& tmpl, double tau_hi, const ChartOptions& options)
{
    validate(tmpl);
    if (!(std::isfinite(tau_hi) && tau_hi > 0.0))
        throw InvalidParameter("tau_hi must be positive");

    auto alpha_at = [&](double tau) {
        ModelParams p = tmpl;
        p.tau = tau;
        return alpha_max(p, options.k_cap, observer_of(options)).alpha;
    };

    const int steps = int(std::ceil(tau_hi / 0.01 - 1e-9));
    std::vector<double> taus(std::size_t(steps) + 1);
    for (int k = 0; k < steps; ++k)
        taus[std::size_t(k)] = 0.01 * k;
    taus.back() = tau_hi;

    std::vector<double> alphas(taus.size());
    parallel_for(taus.size(), options.jobs, [&](std::size_t k) { alphas[k] = alpha_at(taus[k]); });

    if ((alphas.front() >= 0.0) == (alphas.back() >= 0.0))
        throw NoSignChange("alpha has the same sign at tau = 0 and tau = tau_hi");

    std::size_t k = 0;
    while ((alphas[k] >= 0.0) == (alphas[k + 1] >= 0.0))
        ++k;
    double lo = taus[k];
    double hi = taus[k + 1];
    const bool lo_positive = alphas[k] >= 0.0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if ((alpha_at(mid) >= 0.0) == lo_positive)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<ModeSwitch> mode_switch_Lx(const ModelParams& tmpl, double lx_min, double lx_max,
                                       const ChartOptions& options)
{
    validate(tmpl);
    if (!(lx_min > 0.0 && lx_max > lx_min))
        throw InvalidParameter("Lx range must be positive and increasing");

    auto dominant = [&](double lx) {
        ModelParams p = tmpl;
        p.lx = lx;
        return alpha_max(p, options.k_cap, observer_of(options)).argmax_mode;
    };

    const double step = 1e-3;
    const long count = std::lround((lx_max - lx_min) / step);
    std::vector<double> lxs(std::size_t(count) + 1);
    for (long i = 0; i < count; ++i)
        lxs[std::size_t(i)] = lx_min + step * double(i);
    lxs.back() = lx_max;

    std::vector<ModeIndex> modes(lxs.size());
    parallel_for(lxs.size(), options.jobs, [&](std::size_t i) { modes[i] = dominant(lxs[i]); });

    std::vector<ModeSwitch> switches;
    for (std::size_t i = 0; i + 1 < lxs.size(); ++i) {
        if (modes[i] == modes[i + 1])
            continue;
        double lo = lxs[i];
        double hi = lxs[i + 1];
        while (hi - lo > 1e-5) {
            const double mid = 0.5 * (lo + hi);
            if (dominant(mid) == modes[i])
                lo = mid;
            else
                hi = mid;
        }
        switches.push_back({0.5 * (lo + hi), modes[i], modes[i + 1]});
    }
    return switches;
}

} // namespace turingdelay
