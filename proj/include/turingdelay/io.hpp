#pragma once

#include "turingdelay/charts.hpp"
#include "turingdelay/simulator.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace turingdelay {

/// splitmix64: state += 0x9E3779B97F4A7C15, then two multiply-xorshift rounds
/// with 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Top 53 bits mapped to [0, 1).
    double uniform01();
    /// 2 * uniform01() - 1, in [-1, 1).
    double uniform_symmetric();

private:
    std::uint64_t state_;
};

/// Seed for the index-th job of a master seed (one splitmix64 output).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct Rgb {
    std::uint8_t r, g, b;
};

/// Diverging map: blue at t=0, white at t=0.5, red at t=1 with
/// t = clamp((x - lo) / (hi - lo), 0, 1). NaN maps to black.
Rgb diverging_color(double x, double lo, double hi);

/// [-m, m] where m is the largest finite |value| (1 when all values are zero).
std::pair<double, double> symmetric_range(const Eigen::ArrayXXd& values);

struct PgmMapping {
    double lo;
    double hi;
};

/// 16-bit binary PGM of image(row, col), rows written top to bottom with
/// big-endian samples linearly mapped from [min, max] to [0, 65535].
PgmMapping write_pgm16(const Eigen::ArrayXXd& image, const std::filesystem::path& path);

/// Field(i, j) is written with j as the image row and i as the column.
PgmMapping write_field_pgm16(const Field<double>& field, const std::filesystem::path& path);

void write_ppm(const Eigen::ArrayXXd& values, double lo, double hi,
               const std::filesystem::path& path);

/// Chart image with a colour range symmetric about zero.
void write_ppm(const ScalarChart& chart, const std::filesystem::path& path);

/// `# axes: x,y` header then one line per row, 17 significant digits.
void write_csv(const ScalarChart& chart, const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    Eigen::ArrayXXd values;
};

/// Reads rows of comma-separated numbers, keeping `#` lines as header text.
CsvTable read_csv(const std::filesystem::path& path);

/// x,y pairs, one polyline per block, blocks separated by a blank line.
void write_contours_csv(const std::vector<Polyline>& lines, const std::filesystem::path& path);

/// Sidecar `key = value` file describing how an output was generated.
void write_metadata(const std::map<std::string, std::string>& entries,
                    const std::filesystem::path& path);

std::map<std::string, std::string> describe(const ModelParams& params);
std::map<std::string, std::string> describe(const ChartMeta& meta);

std::string format_number(double value);

/// Appends a row (and the header when the file is new) with columns
/// seed, ic_kind, a, b, du, dv, Lx, Ly, tau, n, m, dt, t_pattern.
void append_run_log(const TTPRecord& record, const std::filesystem::path& path);

} // namespace turingdelay
