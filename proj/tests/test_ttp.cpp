#include <doctest.h>

#include "turingdelay/errors.hpp"
#include "turingdelay/ttp.hpp"

#include <cmath>

using namespace turingdelay;

TEST_CASE("predicted time to pattern from a growth rate")
{
    CHECK(*predicted_ttp_from_alpha(0.1, 0.005, 0.01) == doctest::Approx(6.9314718056).epsilon(1e-10));
    CHECK(*predicted_ttp_from_alpha(0.1, 0.01, 0.01) == 0.0);
    CHECK(*predicted_ttp_from_alpha(0.37, 0.01 / std::exp(1.0), 0.01)
          == doctest::Approx(1.0 / 0.37).epsilon(1e-14));
    CHECK_FALSE(predicted_ttp_from_alpha(-0.2, 0.005, 0.01));
    CHECK_FALSE(predicted_ttp_from_alpha(0.0, 0.005, 0.01));
    CHECK_THROWS_AS(predicted_ttp_from_alpha(0.1, 0.0, 0.01), InvalidParameter);
    CHECK_THROWS_AS(predicted_ttp_from_alpha(0.1, 0.02, 0.01), InvalidParameter);
}

TEST_CASE("predicted time to pattern from parameters")
{
    ModelParams p;
    p.lx = 3.0;
    const double alpha = alpha_max(p).alpha;
    CHECK(*predicted_ttp(p, 0.005, 0.01) == doctest::Approx(std::log(2.0) / alpha));
    p.a = 0.4;
    p.b = 0.4;
    CHECK_FALSE(predicted_ttp(p, 0.005, 0.01));
}

TEST_CASE("replicate means")
{
    auto m = replicate_mean({10.0, 12.0, 14.0});
    CHECK(m.mean == 12.0);
    CHECK(m.censored == 0);
    m = replicate_mean({10.0, std::nullopt, 14.0});
    CHECK(m.mean == 12.0);
    CHECK(m.censored == 1);
    CHECK_THROWS_AS(replicate_mean({std::nullopt, std::nullopt}), AllCensored);
    CHECK_THROWS_AS(replicate_mean({}), InvalidParameter);
}

TEST_CASE("least-squares line")
{
    const std::vector<double> x{0, 1, 2, 3, 4};
    const auto exact = fit_line(x, {1.0, 3.0, 5.0, 7.0, 9.0});
    REQUIRE(exact);
    CHECK(exact->slope == doctest::Approx(2.0));
    CHECK(exact->intercept == doctest::Approx(1.0));
    CHECK(exact->r2 == doctest::Approx(1.0));

    const auto holes = fit_line(x, {1.0, std::nullopt, 2.0, std::nullopt, 4.0});
    REQUIRE(holes);
    CHECK(holes->points == 3);
    // Hand-computed: mean x = 2, mean y = 7/3, Sxy = 6, Sxx = 8.
    CHECK(holes->slope == doctest::Approx(0.75));
    CHECK(holes->intercept == doctest::Approx(7.0 / 3.0 - 1.5));
    CHECK_FALSE(fit_line(x, {1.0, std::nullopt, 2.0, std::nullopt, std::nullopt}));
}

TEST_CASE("interior extrema")
{
    using V = std::vector<std::optional<double>>;
    CHECK(interior_extrema(V{1, 2, 3, 4}).empty());
    CHECK(interior_extrema(V{1, 3, 2}) == std::vector<std::size_t>{1});
    CHECK(interior_extrema(V{3, 1, 1, 2, 0}) == std::vector<std::size_t>{1, 3});
    CHECK(interior_extrema(V{1, 3, std::nullopt, 2, 1}).empty());
}

TEST_CASE("delay sweep of the estimate")
{
    ModelParams p;
    std::vector<double> taus;
    for (int k = 0; k <= 10; ++k)
        taus.push_back(0.1 * k);
    SweepOptions opts;
    const auto sweeps = ttp_vs_tau(p, taus, {1.0, 1.5}, opts);
    REQUIRE(sweeps.size() == 2);
    for (const auto& s : sweeps) {
        CHECK(s.axis == SweepAxis::tau);
        REQUIRE(s.fit);
        CHECK(s.fit->slope > 0.0);
        for (std::size_t k = 1; k < s.samples.size(); ++k)
            if (s.predicted[k] && s.predicted[k - 1])
                CHECK(*s.predicted[k] >= *s.predicted[k - 1]);
        CHECK(s.simulated_eigenmode[0] == std::nullopt);
    }
    CHECK_THROWS_AS(ttp_vs_tau(p, {0.0, 0.5}, {1.0}, opts), InvalidParameter);
}

TEST_CASE("length sweep reports extrema and mode switches")
{
    ModelParams p;
    std::vector<double> lx;
    for (int k = 0; k <= 60; ++k)
        lx.push_back(0.3 + 0.02 * k);
    const auto sweeps = ttp_vs_Lx(p, lx, {0.0, 0.5}, SweepOptions{});
    REQUIRE(sweeps.size() == 2);
    CHECK_FALSE(sweeps[0].extrema.empty());
    CHECK_FALSE(sweeps[0].mode_switches.empty());
    for (std::size_t k = 0; k < lx.size(); ++k)
        if (sweeps[0].predicted[k] && sweeps[1].predicted[k])
            CHECK(*sweeps[1].predicted[k] >= *sweeps[0].predicted[k]);
}

TEST_CASE("simulated sweep points are reproducible")
{
    ModelParams p;
    SweepOptions opts;
    opts.replicates = 2;
    opts.simulate_eigenmode = true;
    opts.simulate_random = true;
    opts.sim.grid = {31, 11};
    opts.sim.t_end = 40.0;
    opts.master_seed = 5;
    const auto a = ttp_vs_tau(p, {0.0, 0.05, 0.1}, {1.0}, opts);
    opts.jobs = 3;
    const auto b = ttp_vs_tau(p, {0.0, 0.05, 0.1}, {1.0}, opts);
    CHECK(a[0].simulated_random == b[0].simulated_random);
    CHECK(a[0].simulated_eigenmode == b[0].simulated_eigenmode);
    CHECK(a[0].seeds == b[0].seeds);
    for (std::size_t k = 0; k < 3; ++k) {
        REQUIRE(a[0].simulated_eigenmode[k]);
        REQUIRE(a[0].random_mean[k]);
        const auto m = replicate_mean(a[0].simulated_random[k]);
        CHECK(*a[0].random_mean[k] == m.mean);
    }
}
