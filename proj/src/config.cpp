#include "turingdelay/config.hpp"

#include "turingdelay/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace turingdelay {

const std::vector<std::string> kSubcommands{"turing-space",   "alpha-tau",    "alpha-lx",
                                            "heatmap-lx-tau", "critical-tau", "mode-switch",
                                            "simulate",       "ttp-sweep"};

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string normalise_key(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why)
{
    throw InvalidValue("invalid value '" + value + "' for '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& text)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, value);
    if (text.empty() || result.ec != std::errc() || result.ptr != end)
        bad(key, text, "not a number");
    return value;
}

long long to_integer(const std::string& key, const std::string& text)
{
    long long value = 0;
    const char* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, value);
    if (text.empty() || result.ec != std::errc() || result.ptr != end)
        bad(key, text, "not an integer");
    return value;
}

std::uint64_t to_seed(const std::string& key, const std::string& text)
{
    std::uint64_t value = 0;
    const char* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, value);
    if (text.empty() || result.ec != std::errc() || result.ptr != end)
        bad(key, text, "not an unsigned 64-bit integer");
    return value;
}

int to_int(const std::string& key, const std::string& text)
{
    const long long v = to_integer(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        bad(key, text, "out of range");
    return int(v);
}

bool to_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on")
        return true;
    if (text == "false" || text == "0" || text == "no" || text == "off")
        return false;
    bad(key, text, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(to_double(key, trim(item)));
    if (out.empty())
        bad(key, text, "empty list");
    return out;
}

ModeIndex to_mode(const std::string& key, const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        bad(key, text, "modes are written kx:ky");
    const int kx = to_int(key, trim(text.substr(0, colon)));
    const int ky = to_int(key, trim(text.substr(colon + 1)));
    if (kx < 0 || ky < 0)
        bad(key, text, "mode indices must be non-negative");
    return {kx, ky};
}

struct Key {
    std::string name;
    std::string help;
    std::function<void(RunConfig&, const std::string&, const std::string&)> apply;
    bool flag_only_bool = false;
};

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

Setter real(double RunConfig::*outer)
{
    return [outer](RunConfig& c, const std::string& k, const std::string& v) { c.*outer = to_double(k, v); };
}

Setter param(double ModelParams::*field)
{
    return [field](RunConfig& c, const std::string& k, const std::string& v) {
        c.params.*field = to_double(k, v);
    };
}

Setter sim_real(double SimConfig::*field)
{
    return [field](RunConfig& c, const std::string& k, const std::string& v) { c.sim.*field = to_double(k, v); };
}

Setter axis_min(Axis RunConfig::*axis)
{
    return [axis](RunConfig& c, const std::string& k, const std::string& v) { (c.*axis).min = to_double(k, v); };
}

Setter axis_max(Axis RunConfig::*axis)
{
    return [axis](RunConfig& c, const std::string& k, const std::string& v) { (c.*axis).max = to_double(k, v); };
}

Setter axis_count(Axis RunConfig::*axis)
{
    return [axis](RunConfig& c, const std::string& k, const std::string& v) { (c.*axis).count = to_int(k, v); };
}

const std::vector<Key>& key_table()
{
    static const std::vector<Key> table = [] {
        std::vector<Key> t{
            {"a", "kinetic parameter a", param(&ModelParams::a)},
            {"b", "kinetic parameter b", param(&ModelParams::b)},
            {"du", "activator diffusion", param(&ModelParams::du)},
            {"dv", "inhibitor diffusion", param(&ModelParams::dv)},
            {"lx", "domain length in x", param(&ModelParams::lx)},
            {"ly", "domain length in y", param(&ModelParams::ly)},
            {"tau", "delay", param(&ModelParams::tau)},
            {"n", "grid points in x",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.grid.n = to_int(k, v); }},
            {"m", "grid points in y",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.grid.m = to_int(k, v); }},
            {"t-end", "simulated time", sim_real(&SimConfig::t_end)},
            {"stride", "steps between saved frames (0: final frame only)",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.sim.snapshot_stride = long(to_integer(k, v));
             }},
            {"ic", "initial condition: random or eigenmode",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 if (v != "random" && v != "eigenmode")
                     bad(k, v, "expected random or eigenmode");
                 c.sim.ic_kind = ic_kind_from_string(v);
             }},
            {"seed", "seed of the random initial condition",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.sim.seed = to_seed(k, v); }},
            {"beta", "initial perturbation sup-norm", sim_real(&SimConfig::beta)},
            {"w", "pattern threshold on the sup-norm", sim_real(&SimConfig::w)},
            {"history-mb", "memory budget of the delay history in MiB",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 const long long mb = to_integer(k, v);
                 if (mb < 1)
                     bad(k, v, "must be at least 1");
                 c.sim.history_budget_bytes = std::size_t(mb) << 20;
             }},
            {"stop-at-pattern", "end simulations at the threshold crossing",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.sim.stop_at_pattern = to_bool(k, v);
             },
             true},
            {"out", "output directory",
             [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
            {"run-id", "prefix of output file names",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 if (v.empty() || v.find('/') != std::string::npos)
                     bad(k, v, "must be a plain file-name prefix");
                 c.run_id = v;
             }},
            {"master-seed", "seed from which replicate seeds are derived",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.master_seed = to_seed(k, v); }},
            {"jobs", "worker threads",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.jobs = to_int(k, v); }},
            {"a-min", "Turing space: smallest a", axis_min(&RunConfig::a_axis)},
            {"a-max", "Turing space: largest a", axis_max(&RunConfig::a_axis)},
            {"a-count", "Turing space: samples of a", axis_count(&RunConfig::a_axis)},
            {"b-min", "Turing space: smallest b", axis_min(&RunConfig::b_axis)},
            {"b-max", "Turing space: largest b", axis_max(&RunConfig::b_axis)},
            {"b-count", "Turing space: samples of b", axis_count(&RunConfig::b_axis)},
            {"tau-min", "delay axis start", axis_min(&RunConfig::tau_axis)},
            {"tau-max", "delay axis end", axis_max(&RunConfig::tau_axis)},
            {"tau-count", "delay axis samples", axis_count(&RunConfig::tau_axis)},
            {"lx-min", "Lx axis start", axis_min(&RunConfig::lx_axis)},
            {"lx-max", "Lx axis end", axis_max(&RunConfig::lx_axis)},
            {"lx-count", "Lx axis samples", axis_count(&RunConfig::lx_axis)},
            {"modes", "alpha-lx modes, e.g. 0:0,1:0,2:0",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 c.modes.clear();
                 std::stringstream in(v);
                 std::string item;
                 while (std::getline(in, item, ','))
                     c.modes.push_back(to_mode(k, trim(item)));
                 if (c.modes.empty())
                     bad(k, v, "empty list");
             }},
            {"k-cap", "largest mode per axis, kx:ky",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 const ModeIndex m = to_mode(k, v);
                 c.k_cap = ModeCap{m.kx, m.ky};
             }},
            {"tau-hi", "critical-tau: upper end of the delay search", real(&RunConfig::tau_hi)},
            {"sweep", "ttp-sweep: swept variable, tau or lx",
             [](RunConfig& c, const std::string& k, const std::string& v) {
                 if (v != "tau" && v != "lx")
                     bad(k, v, "expected tau or lx");
                 c.sweep = v;
             }},
            {"lx-list", "ttp-sweep over tau: one curve per Lx",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.lx_list = to_list(k, v); }},
            {"tau-list", "ttp-sweep over Lx: one curve per tau",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.tau_list = to_list(k, v); }},
            {"replicates", "random-IC runs per sweep point",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.replicates = to_int(k, v); }},
            {"simulate", "ttp-sweep: also run the simulations",
             [](RunConfig& c, const std::string& k, const std::string& v) { c.simulate = to_bool(k, v); },
             true},
        };
        return t;
    }();
    return table;
}

const Key& find_key(const std::string& raw)
{
    const std::string name = normalise_key(raw);
    for (const Key& k : key_table())
        if (k.name == name)
            return k;
    throw UnknownKey("unknown key '" + raw + "'");
}

void check_positive(const std::string& what, double v)
{
    if (!(v > 0.0))
        throw InvalidValue(what + " must be positive");
}

void validate_run(RunConfig& c)
{
    try {
        validate(c.params);
        c.sim.params = c.params;
        validate(c.sim);
        validate(c.a_axis);
        validate(c.b_axis);
        validate(c.tau_axis);
        validate(c.lx_axis);
    } catch (const InvalidParameter& e) {
        throw InvalidValue(e.what());
    }
    check_positive("a-min", c.a_axis.min);
    check_positive("b-min", c.b_axis.min);
    check_positive("lx-min", c.lx_axis.min);
    if (c.tau_axis.min < 0.0)
        throw InvalidValue("tau-min must be non-negative");
    check_positive("tau-hi", c.tau_hi);
    if (c.jobs < 1)
        throw InvalidValue("jobs must be at least 1");
    if (c.replicates < 1)
        throw InvalidValue("replicates must be at least 1");
    if (c.k_cap && (c.k_cap->kx_max < 0 || c.k_cap->ky_max < 0))
        throw InvalidValue("k-cap entries must be non-negative");
    for (double lx : c.lx_list)
        if (!(lx >= kMinDomainLength))
            throw InvalidValue("lx-list entries must be >= 0.05");
    for (double tau : c.tau_list)
        if (!(tau >= 0.0))
            throw InvalidValue("tau-list entries must be non-negative");
}

} // namespace

std::vector<std::pair<std::string, std::string>> config_keys()
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const Key& k : key_table())
        out.emplace_back(k.name, k.help);
    return out;
}

RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::filesystem::path>& file)
{
    std::optional<std::filesystem::path> config_file = file;
    std::optional<std::string> subcommand;
    std::vector<std::pair<std::string, std::string>> flags;

    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (arg.rfind("--", 0) != 0) {
            if (subcommand)
                throw InvalidValue("unexpected argument '" + arg + "'");
            subcommand = arg;
            continue;
        }
        std::string key = arg.substr(2);
        std::optional<std::string> value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        }
        if (normalise_key(key) == "config") {
            if (!value) {
                if (i + 1 >= args.size())
                    throw InvalidValue("--config needs a path");
                value = args[++i];
            }
            config_file = *value;
            continue;
        }
        const Key& k = find_key(key);
        if (!value) {
            const bool next_is_value = i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0;
            if (k.flag_only_bool && !next_is_value)
                value = "true";
            else if (!next_is_value)
                throw InvalidValue("missing value for '--" + key + "'");
            else
                value = args[++i];
        }
        flags.emplace_back(key, *value);
    }

    if (!subcommand)
        throw MissingRequired("a subcommand is required (one of turing-space, alpha-tau, alpha-lx, "
                              "heatmap-lx-tau, critical-tau, mode-switch, simulate, ttp-sweep)");
    if (std::find(kSubcommands.begin(), kSubcommands.end(), *subcommand) == kSubcommands.end())
        throw InvalidValue("unknown subcommand '" + *subcommand + "'");

    RunConfig config;
    config.subcommand = *subcommand;

    if (config_file) {
        std::ifstream in(*config_file);
        if (!in)
            throw IoFailure("cannot read config file '" + config_file->string() + "'");
        std::string line;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw InvalidValue(config_file->string() + ":" + std::to_string(number)
                                   + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            find_key(key).apply(config, normalise_key(key), value);
        }
    }
    for (const auto& [key, value] : flags)
        find_key(key).apply(config, normalise_key(key), value);

    validate_run(config);
    return config;
}

} // namespace turingdelay
