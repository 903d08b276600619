#pragma once

// Command-line and `key = value` file configuration for the turingdelay tool.

#include "turingdelay/charts.hpp"
#include "turingdelay/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace turingdelay {

struct RunConfig {
    std::string subcommand;
    ModelParams params;
    SimConfig sim;
    std::filesystem::path out_dir = ".";
    std::string run_id = "run";
    std::uint64_t master_seed = 0;
    int jobs = 1;

    Axis a_axis{"a", 0.02, 1.0, 101};
    Axis b_axis{"b", 0.02, 1.0, 101};
    Axis tau_axis{"tau", 0.0, 2.0, 201};
    Axis lx_axis{"Lx", 0.05, 3.0, 201};
    std::vector<ModeIndex> modes{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    std::optional<ModeCap> k_cap;
    double tau_hi = 1.0;

    /// ttp-sweep: swept variable and the fixed values of the other one.
    std::string sweep = "tau";
    std::vector<double> lx_list{0.5, 1.0, 1.2, 1.5};
    std::vector<double> tau_list{0.0};
    int replicates = 10;
    bool simulate = false;
};

extern const std::vector<std::string> kSubcommands;

/// Names and one-line help of every accepted key, in table order.
std::vector<std::pair<std::string, std::string>> config_keys();

/// args excludes the program name; the first non-flag argument is the
/// subcommand. A `--config path` flag (or the explicit `file` argument) names
/// a `key = value` file; flags override file entries. Every numeric value is
/// validated before returning.
RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::filesystem::path>& file = std::nullopt);

} // namespace turingdelay
