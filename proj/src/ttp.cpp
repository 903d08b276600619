#include "turingdelay/ttp.hpp"

#include "turingdelay/errors.hpp"
#include "turingdelay/io.hpp"

#include <cmath>
#include <fstream>

namespace turingdelay {

std::optional<double> predicted_ttp_from_alpha(double alpha, double beta, double w)
{
    if (!(beta > 0.0 && w > 0.0 && beta <= w))
        throw InvalidParameter("predicted time to pattern needs 0 < beta <= w");
    if (!(alpha > 0.0))
        return std::nullopt;
    return std::log(w / beta) / alpha;
}

std::optional<double> predicted_ttp(const ModelParams& params, double beta, double w)
{
    if (!(beta > 0.0 && w > 0.0 && beta <= w))
        throw InvalidParameter("predicted time to pattern needs 0 < beta <= w");
    return predicted_ttp_from_alpha(alpha_max(params).alpha, beta, w);
}

ReplicateMean replicate_mean(const std::vector<std::optional<double>>& ttps)
{
    if (ttps.empty())
        throw InvalidParameter("replicate list is empty");
    double sum = 0.0;
    int finite = 0;
    for (const auto& t : ttps) {
        if (t) {
            sum += *t;
            ++finite;
        }
    }
    if (finite == 0)
        throw AllCensored("every replicate ended without a pattern");
    return {sum / finite, int(ttps.size()) - finite};
}

std::optional<LinearFit> fit_line(const std::vector<double>& x,
                                  const std::vector<std::optional<double>>& y)
{
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (y[i] && std::isfinite(*y[i])) {
            xs.push_back(x[i]);
            ys.push_back(*y[i]);
        }
    }
    if (xs.size() < 3)
        return std::nullopt;

    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0)
        return std::nullopt;

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = int(xs.size());
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::vector<std::size_t> interior_extrema(const std::vector<std::optional<double>>& values)
{
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start < values.size()) {
        while (start < values.size() && !values[start])
            ++start;
        std::size_t end = start;
        while (end < values.size() && values[end])
            ++end;

        // Within [start, end): record where the sign of the difference flips.
        int previous = 0;
        std::size_t turn = start;
        for (std::size_t i = start + 1; i < end; ++i) {
            const double d = *values[i] - *values[i - 1];
            const int sign = (d > 0) - (d < 0);
            if (sign == 0)
                continue;
            if (previous != 0 && sign != previous)
                out.push_back(turn);
            previous = sign;
            turn = i;
        }
        start = end;
    }
    return out;
}

std::string to_string(SweepAxis axis)
{
    return axis == SweepAxis::tau ? "tau" : "Lx";
}

namespace {

void set_axis(ModelParams& p, SweepAxis axis, double value)
{
    if (axis == SweepAxis::tau)
        p.tau = value;
    else
        p.lx = value;
}

std::vector<TTPSweep> sweep(const ModelParams& tmpl, SweepAxis axis,
                            const std::vector<double>& samples, SweepAxis fixed_axis,
                            const std::vector<double>& fixed_values, const SweepOptions& options)
{
    validate(tmpl);
    validate(options.sim);
    if (samples.empty() || fixed_values.empty())
        throw InvalidParameter("sweep needs at least one sample and one fixed value");
    if (options.simulate_random && options.replicates < 1)
        throw InvalidParameter("replicates must be positive");
    for (double s : samples) {
        if (axis == SweepAxis::lx && !(s >= kMinDomainLength))
            throw InvalidParameter("Lx samples must be >= 0.05");
        if (axis == SweepAxis::tau && !(s >= 0.0))
            throw InvalidParameter("tau samples must be non-negative");
    }

    const double beta = options.sim.beta;
    const double w = options.sim.w;
    const std::size_t points = samples.size();
    const std::size_t reps = options.simulate_random ? std::size_t(options.replicates) : 0;

    std::vector<TTPSweep> sweeps(fixed_values.size());
    for (std::size_t s = 0; s < fixed_values.size(); ++s) {
        TTPSweep& sw = sweeps[s];
        sw.axis = axis;
        sw.samples = samples;
        sw.params = tmpl;
        set_axis(sw.params, fixed_axis, fixed_values[s]);
        validate(sw.params);
        sw.alpha.assign(points, 0.0);
        sw.oscillatory.assign(points, false);
        sw.predicted.assign(points, std::nullopt);
        sw.simulated_eigenmode.assign(points, std::nullopt);
        sw.simulated_random.assign(points, std::vector<std::optional<double>>(reps));
        sw.random_mean.assign(points, std::nullopt);
        sw.censored.assign(points, 0);
        sw.seeds.assign(points * reps, 0);
        for (std::size_t k = 0; k < points * reps; ++k)
            sw.seeds[k] = derive_seed(options.master_seed, s * points * reps + k);
    }

    auto point_params = [&](std::size_t s, std::size_t i) {
        ModelParams p = sweeps[s].params;
        set_axis(p, axis, samples[i]);
        return p;
    };

    parallel_for(sweeps.size() * points, options.jobs, [&](std::size_t k) {
        const std::size_t s = k / points;
        const std::size_t i = k % points;
        const SpectralAbscissa spectrum = alpha_max(point_params(s, i));
        const double alpha = spectrum.alpha;
        sweeps[s].alpha[i] = alpha;
        sweeps[s].oscillatory[i] = spectrum.lambda.imag() != 0.0;
        sweeps[s].predicted[i] = predicted_ttp_from_alpha(alpha, beta, w);
    });

    // Simulations only where linear theory predicts growth; elsewhere the
    // perturbation decays and the run would end censored at t_end.
    struct Job {
        std::size_t sweep, point;
        int replicate; // -1 for the eigenmode run
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < sweeps.size(); ++s) {
        for (std::size_t i = 0; i < points; ++i) {
            if (!sweeps[s].predicted[i])
                continue;
            if (options.simulate_eigenmode)
                jobs.push_back({s, i, -1});
            for (std::size_t r = 0; r < reps; ++r)
                jobs.push_back({s, i, int(r)});
        }
    }

    parallel_for(jobs.size(), options.jobs, [&](std::size_t k) {
        const Job& job = jobs[k];
        SimConfig config = options.sim;
        config.params = point_params(job.sweep, job.point);
        config.stop_at_pattern = true;
        config.snapshot_stride = 0;
        if (job.replicate < 0) {
            config.ic_kind = IcKind::eigenmode;
            sweeps[job.sweep].simulated_eigenmode[job.point] = run(config).record.t_pattern;
        } else {
            config.ic_kind = IcKind::random;
            config.seed = sweeps[job.sweep].seeds[job.point * reps + std::size_t(job.replicate)];
            sweeps[job.sweep].simulated_random[job.point][std::size_t(job.replicate)] =
                run(config).record.t_pattern;
        }
    });

    for (TTPSweep& sw : sweeps) {
        for (std::size_t i = 0; i < points; ++i) {
            if (reps == 0)
                continue;
            bool any = false;
            for (const auto& t : sw.simulated_random[i])
                any = any || t.has_value();
            if (any) {
                const ReplicateMean m = replicate_mean(sw.simulated_random[i]);
                sw.random_mean[i] = m.mean;
                sw.censored[i] = m.censored;
            } else {
                sw.censored[i] = int(reps);
            }
        }
        if (axis == SweepAxis::tau) {
            sw.fit = fit_line(sw.samples, sw.predicted);
        } else {
            for (std::size_t idx : interior_extrema(sw.predicted))
                sw.extrema.push_back(sw.samples[idx]);
            if (points >= 2)
                sw.mode_switches = mode_switch_Lx(sw.params, samples.front(), samples.back());
        }
    }
    return sweeps;
}

} // namespace

std::vector<TTPSweep> ttp_vs_tau(const ModelParams& tmpl, const std::vector<double>& tau_samples,
                                 const std::vector<double>& lx_list, const SweepOptions& options)
{
    if (tau_samples.size() < 3)
        throw InvalidParameter("a delay sweep needs at least 3 samples");
    return sweep(tmpl, SweepAxis::tau, tau_samples, SweepAxis::lx, lx_list, options);
}

std::vector<TTPSweep> ttp_vs_Lx(const ModelParams& tmpl, const std::vector<double>& lx_samples,
                                const std::vector<double>& tau_list, const SweepOptions& options)
{
    return sweep(tmpl, SweepAxis::lx, lx_samples, SweepAxis::tau, tau_list, options);
}

void write_sweep_csv(const TTPSweep& sweep, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoFailure("cannot open '" + path.string() + "' for writing");

    auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("none"); };
    const std::size_t reps = sweep.simulated_random.empty() ? 0 : sweep.simulated_random.front().size();

    out << "# sweep: " << to_string(sweep.axis) << '\n';
    for (const auto& [key, value] : describe(sweep.params))
        if (!(sweep.axis == SweepAxis::tau && key == "tau") && !(sweep.axis == SweepAxis::lx && key == "lx"))
            out << "# " << key << " = " << value << '\n';
    out << "axis_value,predicted,simulated_eigenmode,simulated_random_mean,n_censored";
    for (std::size_t r = 0; r < reps; ++r)
        out << ",replicate_" << r + 1;
    out << '\n';
    for (std::size_t i = 0; i < sweep.samples.size(); ++i) {
        out << format_number(sweep.samples[i]) << ',' << cell(sweep.predicted[i]) << ','
            << cell(sweep.simulated_eigenmode[i]) << ',' << cell(sweep.random_mean[i]) << ','
            << sweep.censored[i];
        for (std::size_t r = 0; r < reps; ++r)
            out << ',' << cell(sweep.simulated_random[i][r]);
        out << '\n';
    }
    if (sweep.fit) {
        out << "# fit_slope = " << format_number(sweep.fit->slope) << '\n'
            << "# fit_intercept = " << format_number(sweep.fit->intercept) << '\n'
            << "# fit_r2 = " << format_number(sweep.fit->r2) << '\n'
            << "# fit_points = " << sweep.fit->points << '\n';
    }
    if (sweep.axis == SweepAxis::lx) {
        out << "# extrema =";
        for (double e : sweep.extrema)
            out << ' ' << format_number(e);
        out << '\n' << "# mode_switches =";
        for (const ModeSwitch& m : sweep.mode_switches)
            out << ' ' << format_number(m.lx) << ':' << m.before.kx << ',' << m.before.ky << "->"
                << m.after.kx << ',' << m.after.ky;
        out << '\n';
    }
    out << "# oscillatory =";
    for (std::size_t i = 0; i < sweep.samples.size(); ++i)
        if (sweep.oscillatory[i])
            out << ' ' << format_number(sweep.samples[i]);
    out << '\n';
    if (reps > 0) {
        out << "# seeds =";
        for (auto s : sweep.seeds)
            out << ' ' << s;
        out << '\n';
    }
    out.flush();
    if (!out)
        throw IoFailure("failed writing '" + path.string() + "'");
}

} // namespace turingdelay
