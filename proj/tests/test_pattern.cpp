#include <doctest.h>

#include "turingdelay/simulator.hpp"

#include <cmath>

using namespace turingdelay;

namespace {

template <typename Fn>
FieldPair sampled(const Grid& g, Fn&& fn)
{
    FieldPair f{Field<double>(g.n, g.m), Field<double>::Constant(g.n, g.m, 0.9)};
    for (int j = 0; j < g.m; ++j)
        for (int i = 0; i < g.n; ++i)
            f.u(i, j) = 1.0 + fn(g.x(i), g.y(j));
    return f;
}

} // namespace

TEST_CASE("uniform field has no pattern")
{
    const Grid g;
    CHECK(classify_pattern(sampled(g, [](double, double) { return 0.0; }), g) == PatternKind::none);
    CHECK(classify_pattern(sampled(g, [](double x, double) { return 1e-6 * std::cos(M_PI * x); }), g)
          == PatternKind::none);
}

TEST_CASE("single cosine is stripes")
{
    const Grid g;
    const auto f = sampled(g, [](double x, double) { return std::cos(3 * M_PI * x); });
    const auto spectrum = analyse_pattern(f, g);
    CHECK(spectrum.kind == PatternKind::stripes);
    CHECK(spectrum.peak.kx == 3);
    CHECK(spectrum.peak.ky == 0);
    CHECK(to_string(spectrum.kind) == "stripes");

    const auto rotated = sampled(g, [](double, double y) { return std::cos(5 * M_PI * y); });
    CHECK(classify_pattern(rotated, g) == PatternKind::stripes);
}

TEST_CASE("hexagon-like superposition is spots")
{
    const Grid g;
    const auto f = sampled(g, [](double x, double y) {
        return std::cos(3 * M_PI * x) * std::cos(3 * M_PI * y) + std::cos(3 * M_PI * x)
               + std::cos(3 * M_PI * y);
    });
    const auto spectrum = analyse_pattern(f, g);
    CHECK(spectrum.kind == PatternKind::spots);
    for (double share : spectrum.direction_fraction)
        CHECK(share >= 0.15);
}

TEST_CASE("a lone oblique mode is neither stripes nor spots")
{
    const Grid g;
    const auto f = sampled(g, [](double x, double y) {
        return std::cos(4 * M_PI * x) * std::cos(4 * M_PI * y);
    });
    CHECK(classify_pattern(f, g) == PatternKind::mixed);
}

TEST_CASE("non-square grids")
{
    const Grid g{81, 41};
    const auto f = sampled(g, [](double x, double) { return std::cos(6 * M_PI * x); });
    CHECK(classify_pattern(f, g) == PatternKind::stripes);
}
