// turingdelay: stability charts, simulations and time-to-pattern sweeps for
// the delayed ligand-internalisation reaction-diffusion model.

#include "turingdelay/charts.hpp"
#include "turingdelay/config.hpp"
#include "turingdelay/errors.hpp"
#include "turingdelay/io.hpp"
#include "turingdelay/simulator.hpp"
#include "turingdelay/ttp.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

using namespace turingdelay;
namespace fs = std::filesystem;

namespace {

void usage(std::ostream& out)
{
    out << "usage: turingdelay <subcommand> [--key value ...] [--config file]\n\nsubcommands:";
    for (const auto& s : kSubcommands)
        out << ' ' << s;
    out << "\n\nkeys (also accepted as `key = value` lines in a config file):\n";
    for (const auto& [key, help] : config_keys()) {
        char line[128];
        std::snprintf(line, sizeof line, "  --%-16s %s\n", key.c_str(), help.c_str());
        out << line;
    }
}

fs::path output(const RunConfig& c, const std::string& suffix)
{
    return c.out_dir / (c.run_id + "_" + suffix);
}

void report_audit(const RootAudit& audit)
{
    std::cout << "root audit: " << audit.checked() << " roots, " << audit.residual_failures()
              << " residual failures, " << audit.disc_failures() << " disc-count failures, " << audit.multiple_roots()
              << " flagged multiple roots, max |D| = "
              << audit.max_residual() << '\n';
    for (const auto& f : audit.failures())
        std::cout << "  " << f << '\n';
}

std::map<std::string, std::string> chart_sidecar(const ScalarChart& chart, const std::string& command)
{
    auto meta = describe(chart.meta);
    meta["command"] = command;
    meta["x_axis"] = chart.x.name + " " + format_number(chart.x.min) + " " + format_number(chart.x.max)
                     + " " + std::to_string(chart.x.count);
    if (chart.y)
        meta["y_axis"] = chart.y->name + " " + format_number(chart.y->min) + " "
                         + format_number(chart.y->max) + " " + std::to_string(chart.y->count);
    return meta;
}

void emit_chart(const RunConfig& c, const ScalarChart& chart, const std::string& name, bool image)
{
    write_csv(chart, output(c, name + ".csv"));
    if (image)
        write_ppm(chart, output(c, name + ".ppm"));
    write_metadata(chart_sidecar(chart, c.subcommand), output(c, name + ".meta"));
    std::cout << "wrote " << output(c, name + ".csv").string() << '\n';
}

int turing_space_cmd(const RunConfig& c)
{
    RootAudit audit;
    const TuringSpace ts = turing_space(c.params, c.a_axis, c.b_axis, {c.jobs, &audit, c.k_cap});
    emit_chart(c, ts.alpha, "alpha", true);
    emit_chart(c, ts.alpha_00, "alpha00", true);
    emit_chart(c, ts.alpha_inhomogeneous, "alpha_inhomogeneous", true);
    write_contours_csv(ts.alpha_zero, output(c, "alpha_zero.csv"));
    write_contours_csv(ts.alpha_00_zero, output(c, "alpha00_zero.csv"));
    write_contours_csv(ts.turing_zero, output(c, "turing_zero.csv"));
    std::cout << "Turing boundary (spatially varying modes): " << ts.turing_zero.size()
              << " polylines; alpha_00 = 0: " << ts.alpha_00_zero.size()
              << " polylines; alpha = 0 level set: " << ts.alpha_zero.size() << " polylines\n";
    report_audit(audit);
    return 0;
}

int alpha_tau_cmd(const RunConfig& c)
{
    RootAudit audit;
    const ScalarChart chart = alpha_vs_tau(c.params, c.tau_axis, {c.jobs, &audit, c.k_cap});
    emit_chart(c, chart, "alpha_tau", false);
    report_audit(audit);
    return 0;
}

int alpha_lx_cmd(const RunConfig& c)
{
    RootAudit audit;
    const ChartOptions options{c.jobs, &audit, c.k_cap};
    const ModeCurves curves = alpha_vs_Lx(c.params, c.modes, c.lx_axis, options);
    emit_chart(c, curves.chart, "alpha_lx_modes", false);

    ScalarChart envelope{c.lx_axis, std::nullopt, Eigen::ArrayXXd(1, c.lx_axis.count), curves.chart.meta};
    envelope.meta.notes["quantity"] = "alpha (max over all modes)";
    envelope.meta.notes.erase("modes");
    parallel_for(std::size_t(c.lx_axis.count), c.jobs, [&](std::size_t i) {
        ModelParams p = c.params;
        p.lx = c.lx_axis.at(int(i));
        envelope.values(0, Eigen::Index(i)) = alpha_max(p, c.k_cap, audit.observer()).alpha;
    });
    emit_chart(c, envelope, "alpha_lx_envelope", false);
    report_audit(audit);
    return 0;
}

int heatmap_cmd(const RunConfig& c)
{
    RootAudit audit;
    const ScalarChart chart = heatmap_Lx_tau(c.params, c.lx_axis, c.tau_axis, {c.jobs, &audit, c.k_cap});
    emit_chart(c, chart, "alpha_lx_tau", true);
    report_audit(audit);
    return 0;
}

int critical_tau_cmd(const RunConfig& c)
{
    const double tau = critical_tau(c.params, c.tau_hi, {c.jobs, nullptr, c.k_cap});
    auto meta = describe(c.params);
    meta.erase("tau");
    meta["tau_hi"] = format_number(c.tau_hi);
    meta["critical_tau"] = format_number(tau);
    meta["generated_at"] = timestamp_utc();
    write_metadata(meta, output(c, "critical_tau.meta"));
    std::cout << "critical tau = " << format_number(tau) << '\n';
    return 0;
}

int mode_switch_cmd(const RunConfig& c)
{
    const auto switches = mode_switch_Lx(c.params, c.lx_axis.min, c.lx_axis.max, {c.jobs, nullptr, c.k_cap});
    const fs::path path = output(c, "mode_switch.csv");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw IoFailure("cannot open '" + path.string() + "' for writing");
    std::fprintf(f, "# Lx range %s %s\n", format_number(c.lx_axis.min).c_str(),
                 format_number(c.lx_axis.max).c_str());
    for (const auto& [key, value] : describe(c.params))
        if (key != "lx")
            std::fprintf(f, "# %s = %s\n", key.c_str(), value.c_str());
    std::fprintf(f, "lx,kx_before,ky_before,kx_after,ky_after\n");
    for (const ModeSwitch& s : switches) {
        std::fprintf(f, "%s,%d,%d,%d,%d\n", format_number(s.lx).c_str(), s.before.kx, s.before.ky,
                     s.after.kx, s.after.ky);
        std::cout << "switch at Lx = " << format_number(s.lx) << ": (" << s.before.kx << ","
                  << s.before.ky << ") -> (" << s.after.kx << "," << s.after.ky << ")\n";
    }
    if (std::fclose(f) != 0)
        throw IoFailure("failed writing '" + path.string() + "'");
    if (switches.empty())
        std::cout << "no mode switch\n";
    return 0;
}

int simulate_cmd(const RunConfig& c)
{
    SimConfig config = c.sim;
    config.params = c.params;
    const RunResult result = run(config);
    const TTPRecord& rec = result.record;

    const fs::path mapping_path = output(c, "frames.csv");
    std::FILE* f = std::fopen(mapping_path.c_str(), "w");
    if (!f)
        throw IoFailure("cannot open '" + mapping_path.string() + "' for writing");
    std::fprintf(f, "file,field,step,time,lo,hi\n");
    for (const Snapshot& snap : result.snapshots) {
        for (const char* field : {"u", "v"}) {
            const std::string name = c.run_id + "_" + field + "_" + std::to_string(snap.step) + ".pgm";
            const PgmMapping m = write_field_pgm16(field[0] == 'u' ? snap.fields.u : snap.fields.v,
                                                   c.out_dir / name);
            std::fprintf(f, "%s,%s,%ld,%s,%s,%s\n", name.c_str(), field, snap.step,
                         format_number(snap.time).c_str(), format_number(m.lo).c_str(),
                         format_number(m.hi).c_str());
        }
    }
    if (std::fclose(f) != 0)
        throw IoFailure("failed writing '" + mapping_path.string() + "'");

    append_run_log(rec, c.out_dir / "run_log.csv");

    auto meta = describe(c.params);
    meta["n"] = std::to_string(config.grid.n);
    meta["m"] = std::to_string(config.grid.m);
    meta["t_end"] = format_number(config.t_end);
    meta["ic"] = to_string(config.ic_kind);
    meta["seed"] = std::to_string(config.seed);
    meta["beta"] = format_number(config.beta);
    meta["w"] = format_number(config.w);
    meta["dt"] = format_number(rec.dt);
    meta["steps"] = std::to_string(rec.steps);
    meta["history_stride"] = std::to_string(rec.history_stride);
    meta["t_pattern"] = rec.t_pattern ? format_number(*rec.t_pattern) : "none";
    meta["final_norm"] = format_number(rec.final_norm);
    meta["pattern"] = to_string(classify_pattern(result.final_state, config.grid));
    meta["generated_at"] = timestamp_utc();
    write_metadata(meta, output(c, "run.meta"));

    if (rec.negative_seen)
        std::cerr << "warning: negative concentrations occurred during the run\n";
    std::cout << "dt = " << format_number(rec.dt) << ", steps = " << rec.steps << '\n'
              << "t_pattern = " << meta["t_pattern"] << '\n'
              << "final sup-norm deviation = " << meta["final_norm"] << '\n'
              << "pattern = " << meta["pattern"] << '\n';
    return 0;
}

int ttp_sweep_cmd(const RunConfig& c)
{
    SweepOptions options;
    options.replicates = c.replicates;
    options.simulate_eigenmode = c.simulate;
    options.simulate_random = c.simulate;
    options.sim = c.sim;
    options.sim.params = c.params;
    options.master_seed = c.master_seed;
    options.jobs = c.jobs;

    const bool over_tau = c.sweep == "tau";
    const Axis& axis = over_tau ? c.tau_axis : c.lx_axis;
    if (!over_tau && axis.min < kMinDomainLength)
        throw InvalidValue("lx-min must be >= 0.05 for a sweep over Lx");
    std::vector<double> samples(std::size_t(axis.count));
    for (int i = 0; i < axis.count; ++i)
        samples[std::size_t(i)] = axis.at(i);

    const auto sweeps = over_tau ? ttp_vs_tau(c.params, samples, c.lx_list, options)
                                 : ttp_vs_Lx(c.params, samples, c.tau_list, options);
    const auto& fixed = over_tau ? c.lx_list : c.tau_list;
    for (std::size_t s = 0; s < sweeps.size(); ++s) {
        const std::string name = std::string("ttp_") + (over_tau ? "tau_lx" : "lx_tau") + "_"
                                 + format_number(fixed[s]) + ".csv";
        write_sweep_csv(sweeps[s], output(c, name));
        std::cout << "wrote " << output(c, name).string();
        if (sweeps[s].fit)
            std::cout << "  slope " << format_number(sweeps[s].fit->slope) << "  R^2 "
                      << format_number(sweeps[s].fit->r2);
        if (!over_tau)
            std::cout << "  extrema " << sweeps[s].extrema.size() << "  mode switches "
                      << sweeps[s].mode_switches.size();
        std::cout << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        usage(args.empty() ? std::cerr : std::cout);
        return args.empty() ? 2 : 0;
    }
    try {
        const RunConfig config = parse_config(args);
        fs::create_directories(config.out_dir);
        const std::string& cmd = config.subcommand;
        if (cmd == "turing-space")
            return turing_space_cmd(config);
        if (cmd == "alpha-tau")
            return alpha_tau_cmd(config);
        if (cmd == "alpha-lx")
            return alpha_lx_cmd(config);
        if (cmd == "heatmap-lx-tau")
            return heatmap_cmd(config);
        if (cmd == "critical-tau")
            return critical_tau_cmd(config);
        if (cmd == "mode-switch")
            return mode_switch_cmd(config);
        if (cmd == "simulate")
            return simulate_cmd(config);
        return ttp_sweep_cmd(config);
    } catch (const UnknownKey& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        usage(std::cerr);
        return 2;
    } catch (const InvalidValue& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const MissingRequired& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
