#include "turingdelay/io.hpp"

#include "turingdelay/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace turingdelay {

std::uint64_t SeededRng::next()
{
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SeededRng::uniform01()
{
    return double(next() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform_symmetric()
{
    return 2.0 * uniform01() - 1.0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    SeededRng rng(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return rng.next();
}

Rgb diverging_color(double x, double lo, double hi)
{
    if (!std::isfinite(x))
        return {0, 0, 0};
    double t = hi > lo ? (x - lo) / (hi - lo) : 0.5;
    t = std::clamp(t, 0.0, 1.0);
    auto channel = [](double f) { return std::uint8_t(std::lround(255.0 * std::clamp(f, 0.0, 1.0))); };
    if (t <= 0.5) {
        const double s = t / 0.5;
        return {channel(s), channel(s), 255};
    }
    const double s = (t - 0.5) / 0.5;
    return {255, channel(1.0 - s), channel(1.0 - s)};
}

std::pair<double, double> symmetric_range(const Eigen::ArrayXXd& values)
{
    double m = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k)
        if (std::isfinite(values(k)))
            m = std::max(m, std::abs(values(k)));
    if (m == 0.0)
        m = 1.0;
    return {-m, m};
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false)
{
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out)
        throw IoFailure("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw IoFailure("failed writing '" + path.string() + "'");
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

PgmMapping write_pgm16(const Eigen::ArrayXXd& image, const std::filesystem::path& path)
{
    PgmMapping mapping{image.minCoeff(), image.maxCoeff()};
    std::ofstream out = open_out(path, true);
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n65535\n";
    const double span = mapping.hi - mapping.lo;
    std::vector<unsigned char> bytes;
    bytes.reserve(std::size_t(image.size()) * 2);
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) {
            const double t = span > 0.0 ? (image(r, c) - mapping.lo) / span : 0.0;
            const auto sample = std::uint16_t(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
            bytes.push_back(static_cast<unsigned char>(sample >> 8));
            bytes.push_back(static_cast<unsigned char>(sample & 0xFF));
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    finish(out, path);
    return mapping;
}

PgmMapping write_field_pgm16(const Field<double>& field, const std::filesystem::path& path)
{
    return write_pgm16(field.transpose(), path);
}

void write_ppm(const Eigen::ArrayXXd& values, double lo, double hi, const std::filesystem::path& path)
{
    std::ofstream out = open_out(path, true);
    out << "P6\n" << values.cols() << ' ' << values.rows() << "\n255\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(std::size_t(values.size()) * 3);
    // Highest row first so the y axis points up in the image.
    for (Eigen::Index r = values.rows() - 1; r >= 0; --r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            const Rgb rgb = diverging_color(values(r, c), lo, hi);
            bytes.insert(bytes.end(), {rgb.r, rgb.g, rgb.b});
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    finish(out, path);
}

void write_ppm(const ScalarChart& chart, const std::filesystem::path& path)
{
    const auto [lo, hi] = symmetric_range(chart.values);
    write_ppm(chart.values, lo, hi, path);
}

void write_csv(const ScalarChart& chart, const std::filesystem::path& path)
{
    std::ofstream out = open_out(path);
    out << "# axes: " << chart.x.name;
    if (chart.y)
        out << ',' << chart.y->name;
    out << '\n';
    out << "# x: " << format_number(chart.x.min) << ',' << format_number(chart.x.max) << ','
        << chart.x.count << '\n';
    if (chart.y)
        out << "# y: " << format_number(chart.y->min) << ',' << format_number(chart.y->max) << ','
            << chart.y->count << '\n';
    for (const auto& [key, value] : describe(chart.meta.params))
        out << "# " << key << " = " << value << '\n';
    for (Eigen::Index r = 0; r < chart.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < chart.values.cols(); ++c) {
            if (c)
                out << ',';
            out << format_number(chart.values(r, c));
        }
        out << '\n';
    }
    finish(out, path);
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot open '" + path.string() + "' for reading");
    CsvTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            table.header.push_back(line);
            continue;
        }
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            if (cell == "nan" || cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double value = 0.0;
            const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (result.ec != std::errc())
                throw IoFailure("non-numeric cell '" + cell + "' in '" + path.string() + "'");
            row.push_back(value);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoFailure("ragged rows in '" + path.string() + "'");
        rows.push_back(std::move(row));
    }
    const Eigen::Index cols = rows.empty() ? 0 : Eigen::Index(rows.front().size());
    table.values.resize(Eigen::Index(rows.size()), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            table.values(Eigen::Index(r), c) = rows[r][std::size_t(c)];
    return table;
}

void write_contours_csv(const std::vector<Polyline>& lines, const std::filesystem::path& path)
{
    std::ofstream out = open_out(path);
    out << "# x,y\n";
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (k)
            out << '\n';
        for (const auto& point : lines[k])
            out << format_number(point.x()) << ',' << format_number(point.y()) << '\n';
    }
    finish(out, path);
}

void write_metadata(const std::map<std::string, std::string>& entries,
                    const std::filesystem::path& path)
{
    std::ofstream out = open_out(path);
    for (const auto& [key, value] : entries)
        out << key << " = " << value << '\n';
    finish(out, path);
}

std::map<std::string, std::string> describe(const ModelParams& params)
{
    return {{"a", format_number(params.a)},   {"b", format_number(params.b)},
            {"du", format_number(params.du)}, {"dv", format_number(params.dv)},
            {"lx", format_number(params.lx)}, {"ly", format_number(params.ly)},
            {"tau", format_number(params.tau)}};
}

std::map<std::string, std::string> describe(const ChartMeta& meta)
{
    auto entries = describe(meta.params);
    entries["generated_at"] = meta.generated_at;
    for (const auto& [key, value] : meta.notes)
        entries[key] = value;
    return entries;
}

void append_run_log(const TTPRecord& record, const std::filesystem::path& path)
{
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw IoFailure("cannot open '" + path.string() + "' for appending");
    if (fresh)
        out << "seed,ic_kind,a,b,du,dv,Lx,Ly,tau,n,m,dt,t_pattern\n";
    const SimConfig& c = record.config;
    const ModelParams& p = c.params;
    out << c.seed << ',' << to_string(c.ic_kind) << ',' << format_number(p.a) << ','
        << format_number(p.b) << ',' << format_number(p.du) << ',' << format_number(p.dv) << ','
        << format_number(p.lx) << ',' << format_number(p.ly) << ',' << format_number(p.tau) << ','
        << c.grid.n << ',' << c.grid.m << ',' << format_number(record.dt) << ','
        << (record.t_pattern ? format_number(*record.t_pattern) : "none") << '\n';
    out.flush();
    if (!out)
        throw IoFailure("failed writing '" + path.string() + "'");
}

} // namespace turingdelay
