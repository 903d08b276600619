#include "turingdelay/charts.hpp"

#include <array>
#include <cmath>
#include <unordered_map>

namespace turingdelay {

namespace {

struct Segment {
    long edge[2];
    Eigen::Vector2d point[2];
    bool used = false;
};

} // namespace

std::vector<Polyline> marching_squares(const Eigen::ArrayXXd& values, const Axis& x, const Axis& y,
                                       double level)
{
    const Eigen::Index rows = values.rows();
    const Eigen::Index cols = values.cols();
    std::vector<Segment> segments;

    // Edge ids: horizontal edge from (r, c) to (r, c+1) is 2*(r*cols+c),
    // vertical edge from (r, c) to (r+1, c) is 2*(r*cols+c)+1.
    auto horizontal = [&](Eigen::Index r, Eigen::Index c) { return 2 * long(r * cols + c); };
    auto vertical = [&](Eigen::Index r, Eigen::Index c) { return 2 * long(r * cols + c) + 1; };

    auto crossing = [&](Eigen::Index r0, Eigen::Index c0, Eigen::Index r1, Eigen::Index c1) {
        const double v0 = values(r0, c0);
        const double v1 = values(r1, c1);
        const double t = (level - v0) / (v1 - v0);
        const double px = x.at(int(c0)) + t * (x.at(int(c1)) - x.at(int(c0)));
        const double py = y.at(int(r0)) + t * (y.at(int(r1)) - y.at(int(r0)));
        return Eigen::Vector2d(px, py);
    };

    for (Eigen::Index r = 0; r + 1 < rows; ++r) {
        for (Eigen::Index c = 0; c + 1 < cols; ++c) {
            const std::array<double, 4> corner{values(r, c), values(r, c + 1), values(r + 1, c + 1),
                                               values(r + 1, c)};
            bool finite = true;
            for (double v : corner)
                finite = finite && std::isfinite(v);
            if (!finite)
                continue;

            int mask = 0;
            for (int k = 0; k < 4; ++k)
                if (corner[k] > level)
                    mask |= 1 << k;
            if (mask == 0 || mask == 15)
                continue;

            // Cell edges: 0 bottom (corners 0-1), 1 right (1-2), 2 top (3-2), 3 left (0-3).
            const std::array<long, 4> id{horizontal(r, c), vertical(r, c + 1), horizontal(r + 1, c),
                                         vertical(r, c)};
            auto point = [&](int e) {
                switch (e) {
                case 0: return crossing(r, c, r, c + 1);
                case 1: return crossing(r, c + 1, r + 1, c + 1);
                case 2: return crossing(r + 1, c, r + 1, c + 1);
                default: return crossing(r, c, r + 1, c);
                }
            };
            auto add = [&](int e0, int e1) {
                Segment s;
                s.edge[0] = id[e0];
                s.edge[1] = id[e1];
                s.point[0] = point(e0);
                s.point[1] = point(e1);
                segments.push_back(s);
            };

            if (mask == 5 || mask == 10) {
                const double centre = 0.25 * (corner[0] + corner[1] + corner[2] + corner[3]);
                const bool centre_above = centre > level;
                const bool isolate_odd = (mask == 5) == centre_above;
                if (isolate_odd) {
                    add(0, 1);
                    add(2, 3);
                } else {
                    add(3, 0);
                    add(1, 2);
                }
                continue;
            }

            std::array<int, 2> crossed{};
            int found = 0;
            const std::array<std::array<int, 2>, 4> ends{{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};
            for (int e = 0; e < 4; ++e) {
                const bool a = (mask >> ends[e][0]) & 1;
                const bool b = (mask >> ends[e][1]) & 1;
                if (a != b)
                    crossed[found++] = e;
            }
            add(crossed[0], crossed[1]);
        }
    }

    std::unordered_multimap<long, std::size_t> by_edge;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        by_edge.emplace(segments[k].edge[0], k);
        by_edge.emplace(segments[k].edge[1], k);
    }
    auto partner = [&](long edge, std::size_t self) -> std::optional<std::size_t> {
        auto [lo, hi] = by_edge.equal_range(edge);
        for (auto it = lo; it != hi; ++it)
            if (it->second != self && !segments[it->second].used)
                return it->second;
        return std::nullopt;
    };

    std::vector<Polyline> lines;
    auto trace = [&](std::size_t start, int start_end) {
        Segment& first = segments[start];
        first.used = true;
        Polyline line{first.point[start_end], first.point[1 - start_end]};
        long edge = first.edge[1 - start_end];
        std::size_t current = start;
        while (auto next = partner(edge, current)) {
            Segment& s = segments[*next];
            s.used = true;
            const int enter = s.edge[0] == edge ? 0 : 1;
            line.push_back(s.point[1 - enter]);
            edge = s.edge[1 - enter];
            current = *next;
        }
        lines.push_back(std::move(line));
    };

    // Open chains start at edges touched by a single segment.
    for (std::size_t k = 0; k < segments.size(); ++k) {
        if (segments[k].used)
            continue;
        for (int end = 0; end < 2; ++end) {
            if (by_edge.count(segments[k].edge[end]) == 1) {
                trace(k, end);
                break;
            }
        }
    }
    for (std::size_t k = 0; k < segments.size(); ++k)
        if (!segments[k].used)
            trace(k, 0);
    return lines;
}

} // namespace turingdelay
