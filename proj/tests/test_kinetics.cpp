#include <doctest.h>

#include "turingdelay/errors.hpp"
#include "turingdelay/kinetics.hpp"

#include <random>

using namespace turingdelay;

TEST_CASE("steady state of the kinetics")
{
    auto at = [](double a, double b) {
        ModelParams p;
        p.a = a;
        p.b = b;
        return steady_state<double>(p);
    };
    CHECK(at(0.1, 0.9).u_star == 1.0);
    CHECK(at(0.1, 0.9).v_star == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(at(0.4, 0.4).u_star == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(at(0.4, 0.4).v_star == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(at(0.1, 1.5).u_star == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(at(0.1, 1.5).v_star == doctest::Approx(0.5859375).epsilon(1e-15));
}

TEST_CASE("reaction rates by hand")
{
    ModelParams p;
    auto r1 = reaction_rates(1.0, 1.0, 0.0, 0.0, p);
    CHECK(r1.f == doctest::Approx(-2.9).epsilon(1e-15));
    CHECK(r1.g == doctest::Approx(-0.1).epsilon(1e-14));
    auto r2 = reaction_rates(0.0, 0.0, 1.0, 1.0, p);
    CHECK(r2.f == doctest::Approx(3.1).epsilon(1e-15));
    CHECK(r2.g == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("equilibrium and undelayed reduction hold for random parameters")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> pos(0.01, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        ModelParams p;
        p.a = pos(gen);
        p.b = pos(gen);
        const auto ss = steady_state<double>(p);
        const auto at_ss = reaction_rates(ss.u_star, ss.v_star, ss.u_star, ss.v_star, p);
        const double scale = p.a + p.b;
        CHECK(std::abs(at_ss.f) <= 1e-14 * scale * 8);
        CHECK(std::abs(at_ss.g) <= 1e-14 * scale * 8);

        const double u = pos(gen), v = pos(gen);
        const auto same = reaction_rates(u, v, u, v, p);
        CHECK(same.f == doctest::Approx(p.a - u + u * u * v).epsilon(1e-12));
        CHECK(same.g == doctest::Approx(p.b - u * u * v).epsilon(1e-12));
    }
}

TEST_CASE("parameter validation")
{
    ModelParams p;
    CHECK_NOTHROW(validate(p));
    for (double ModelParams::*field : {&ModelParams::a, &ModelParams::b, &ModelParams::du,
                                       &ModelParams::dv, &ModelParams::lx, &ModelParams::ly}) {
        ModelParams bad = p;
        bad.*field = 0.0;
        CHECK_THROWS_AS(validate(bad), InvalidParameter);
        bad.*field = -1.0;
        CHECK_THROWS_AS(validate(bad), InvalidParameter);
    }
    ModelParams delayed = p;
    delayed.tau = -0.1;
    CHECK_THROWS_AS(validate(delayed), InvalidParameter);
    delayed.tau = 0.0;
    CHECK_NOTHROW(validate(delayed));
}
