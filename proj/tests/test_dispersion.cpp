#include <doctest.h>

#include "oracles.hpp"
#include "turingdelay/dispersion.hpp"
#include "turingdelay/errors.hpp"

#include <random>

using namespace turingdelay;
using cd = std::complex<double>;

namespace {

ModelParams base(double a = 0.1, double b = 0.9)
{
    ModelParams p;
    p.a = a;
    p.b = b;
    return p;
}

} // namespace

TEST_CASE("coefficients of the uniform mode")
{
    const auto c = coeffs(base(), {0, 0});
    CHECK(c.p == doctest::Approx(5.6).epsilon(1e-14));
    CHECK(c.q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.r == doctest::Approx(-5.4).epsilon(1e-14));
    CHECK(c.s == 0.0);
    CHECK(c.mu == 0.0);
}

TEST_CASE("coefficients of mode (1,0) match the linearisation determinant")
{
    ModelParams p = base();
    p.lx = 1.0;
    p.ly = 1.0;
    const auto c = coeffs(p, {1, 0});
    CHECK(c.p == doctest::Approx(5.6 + 0.21 * M_PI * M_PI).epsilon(1e-13));
    CHECK(c.mu == doctest::Approx(M_PI * M_PI).epsilon(1e-14));

    // With tau = 0 the determinant is lambda^2 + (p+r) lambda + (q+s); with a
    // delay the e^{-lambda tau} part separates. Sample both.
    for (double tau : {0.0, 0.3, 1.7}) {
        p.tau = tau;
        for (cd lambda : {cd(0.0, 0.0), cd(0.4, -1.3), cd(-2.0, 5.0), cd(1.5, 0.2)}) {
            const cd expected = oracle::characteristic(p, 1, 0, lambda);
            const cd got = eval_char(lambda, tau, c);
            CHECK(std::abs(got - expected) <= 1e-11 * (1.0 + std::abs(expected)));
        }
    }
}

TEST_CASE("coefficient signs and determinant agreement over random inputs")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> pos(0.02, 2.0);
    std::uniform_int_distribution<int> k(0, 6);
    for (int trial = 0; trial < 300; ++trial) {
        ModelParams p;
        p.a = pos(gen);
        p.b = pos(gen);
        p.du = pos(gen) * 0.1;
        p.dv = pos(gen);
        p.lx = pos(gen);
        p.ly = pos(gen);
        p.tau = pos(gen);
        const ModeIndex mode{k(gen), k(gen)};
        const auto c = coeffs(p, mode);
        CHECK(c.p > 0.0);
        CHECK(c.q > 0.0);
        CHECK(c.r < 0.0);
        if (mode.kx == 0 && mode.ky == 0)
            CHECK(c.s == 0.0);
        else
            CHECK(c.s < 0.0);
        const cd lambda(pos(gen) - 1.0, 3.0 * pos(gen));
        const cd expected = oracle::characteristic(p, mode.kx, mode.ky, lambda);
        CHECK(std::abs(eval_char(lambda, p.tau, c) - expected)
              <= 1e-10 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("characteristic function values")
{
    const auto c = coeffs(base(), {0, 0});
    CHECK(eval_char(cd(0.0), 0.7, c) == cd(c.q + c.s));
    CHECK(std::abs(eval_char(cd(-0.1, 0.994987437106620), 0.0, c)) < 1e-6);
    CHECK(eval_char(cd(1e3), 1.0, c).real() > 0.0);

    const cd z(0.3, 0.8);
    const double h = 1e-6;
    const cd numeric = (eval_char(z + h, 0.9, c) - eval_char(z - h, 0.9, c)) / (2.0 * h);
    CHECK(std::abs(eval_char_derivative(z, 0.9, c) - numeric) < 1e-6);
}

TEST_CASE("undelayed roots")
{
    const auto [r1, r2] = roots_tau_zero(coeffs(base(), {0, 0}));
    CHECK(r1.real() == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(r1.imag() == doctest::Approx(std::sqrt(0.99)).epsilon(1e-12));
    CHECK(r2 == std::conj(r1));

    const auto [s1, s2] = roots_tau_zero(coeffs(base(0.4, 0.4), {0, 0}));
    CHECK(s1.real() == doctest::Approx(-0.32).epsilon(1e-12));
    CHECK(s1.imag() != 0.0);

    QuasiPolyCoeffs degenerate{1.0, 2.0, -1.0, -2.0, 0.0};
    const auto [d1, d2] = roots_tau_zero(degenerate);
    CHECK(d1 == cd(0.0));
    CHECK(d2 == cd(0.0));
}

TEST_CASE("undelayed rightmost root equals the quadratic oracle")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> pos(0.02, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        ModelParams p;
        p.a = pos(gen);
        p.b = pos(gen);
        p.du = pos(gen) * 0.05;
        p.dv = pos(gen);
        p.lx = pos(gen);
        p.ly = pos(gen);
        for (int kx = 0; kx <= 5; kx += 2)
            for (int ky = 0; ky <= 5; ky += 3) {
                const auto c = coeffs(p, {kx, ky});
                const double expected = oracle::max_real_quadratic(c.p + c.r, c.q + c.s);
                CHECK(std::abs(alpha_mode(p, {kx, ky}) - expected)
                      <= 1e-12 * std::max(1.0, std::abs(expected)));
                CHECK(rightmost_root(c, 0.0).lambda == roots_tau_zero(c).first);
            }
    }
}

TEST_CASE("delayed rightmost roots pass residual and isolation checks")
{
    const auto c = coeffs(base(), {0, 0});
    for (double tau : {0.25, 0.5, 1.0}) {
        CAPTURE(tau);
        const RootResult root = rightmost_root(c, tau);
        CHECK(std::abs(eval_char(root.lambda, tau, c)) < 1e-10);
        CHECK(root.residual < 1e-10);
        CHECK(count_roots_in_disc(c, tau, root.lambda, 1e-3) == 1);
        CHECK(root.lambda.imag() >= 0.0);
        CHECK_FALSE(root.multiplicity_flag);
        // Nothing lies to the right: a tall box just right of the root is empty.
        const Rect right{root.lambda.real() + 1e-6, root.lambda.real() + 50.0, -200.0, 200.0};
        CHECK(count_roots_in_rect(c, tau, right) == 0);
    }
}

TEST_CASE("rightmost root of higher modes across delays")
{
    ModelParams p = base();
    p.lx = 3.0;
    for (ModeIndex mode : {ModeIndex{3, 0}, ModeIndex{7, 0}, ModeIndex{7, 3}, ModeIndex{2, 1}}) {
        const auto c = coeffs(p, mode);
        for (double tau : {0.05, 0.1, 0.8, 2.0}) {
            CAPTURE(mode.kx);
            CAPTURE(mode.ky);
            CAPTURE(tau);
            const RootResult root = rightmost_root(c, tau);
            CHECK(std::abs(eval_char(root.lambda, tau, c)) < 1e-10);
            CHECK(count_roots_in_disc(c, tau, root.lambda, 1e-3) == 1);
        }
    }
}

TEST_CASE("growth rate is continuous in the delay")
{
    ModelParams p = base();
    p.lx = 1.0;
    for (ModeIndex mode : {ModeIndex{0, 0}, ModeIndex{3, 0}}) {
        const auto c = coeffs(p, mode);
        double previous = rightmost_root(c, 0.0).lambda.real();
        for (int k = 1; k <= 600; ++k) {
            const RootResult root = rightmost_root(c, k * 1e-3);
            if (!root.multiplicity_flag)
                CHECK(std::abs(root.lambda.real() - previous) < 0.1);
            previous = root.lambda.real();
        }
    }
}

TEST_CASE("margin condition implies decay at every sampled delay")
{
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> pos(0.02, 2.0);
    int tested = 0;
    for (int trial = 0; trial < 400 && tested < 40; ++trial) {
        ModelParams p;
        p.a = pos(gen);
        p.b = pos(gen);
        p.lx = pos(gen);
        const ModeIndex mode{trial % 6, trial % 3};
        const auto c = coeffs(p, mode);
        if (!(c.p > std::abs(c.r) && c.q > std::abs(c.s)))
            continue;
        ++tested;
        for (double tau : {0.0, 0.5, 1.0, 2.0})
            CHECK(rightmost_root(c, tau).lambda.real() < 0.0);
    }
    CHECK(tested > 10);
}

TEST_CASE("delay-independent stability test")
{
    // p=3, q=2, r=-1, s=-1: crossing polynomial w^4 + 4 w^2 + 3 has no positive root.
    CHECK(delay_independent_stable({3.0, 2.0, -1.0, -1.0, 0.0}));
    // q + s < 0 makes lambda = 0 side unstable already without delay.
    CHECK_FALSE(delay_independent_stable({3.0, 1.0, -1.0, -2.0, 0.0}));
    // Stable without delay but a crossing exists: p^2 - r^2 - 2q < 0.
    const QuasiPolyCoeffs crossing{1.1, 1.0, 1.0, 0.9, 0.0};
    CHECK_FALSE(delay_independent_stable(crossing));
    // Around the crossing the delay system indeed destabilises for some tau.
    bool unstable_somewhere = false;
    for (double tau = 0.5; tau <= 8.0 && !unstable_somewhere; tau += 0.5)
        unstable_somewhere = rightmost_root(crossing, tau).lambda.real() > 0.0;
    CHECK(unstable_somewhere);
}

TEST_CASE("spectral abscissa at the reference parameters")
{
    ModelParams p = base();
    p.lx = 3.0;
    const auto unstable = alpha_max(p);
    CHECK(unstable.alpha > 0.0);
    CHECK(unstable.per_mode.at(unstable.argmax_mode) == unstable.alpha);
    for (const auto& [mode, value] : unstable.per_mode)
        CHECK(value <= unstable.alpha);

    ModelParams q = base(0.4, 0.4);
    q.lx = 3.0;
    const auto stable = alpha_max(q);
    CHECK(stable.alpha < 0.0);
    CHECK(stable.alpha == doctest::Approx(-0.32).epsilon(1e-9));
}

TEST_CASE("square domains give symmetric spectra with lexicographic ties")
{
    ModelParams p = base();
    p.lx = 1.0;
    p.ly = 1.0;
    const auto sa = alpha_max(p, ModeCap{8, 8});
    for (const auto& [mode, value] : sa.per_mode) {
        auto swapped = sa.per_mode.find({mode.ky, mode.kx});
        if (swapped != sa.per_mode.end())
            CHECK(value == doctest::Approx(swapped->second).epsilon(1e-12));
    }
    CHECK(sa.argmax_mode.kx <= sa.argmax_mode.ky);
}

TEST_CASE("mode cap restricts the scan")
{
    ModelParams p = base();
    p.lx = 3.0;
    const auto capped = alpha_max(p, ModeCap{1, 0});
    for (const auto& [mode, value] : capped.per_mode) {
        CHECK(mode.kx <= 1);
        CHECK(mode.ky == 0);
    }
}

TEST_CASE("eigenvector of the linearisation")
{
    const ModelParams p = base();
    const auto c = coeffs(p, {0, 0});
    const cd lambda(-0.1, std::sqrt(0.99));
    const EigenPair e = eigen_pair(c, lambda, p);
    CHECK(e.cu == cd(1.0));
    const cd expected = -1.8 / cd(0.9, std::sqrt(0.99));
    CHECK(std::abs(e.cv - expected) < 1e-12);

    // Back-substitution into both rows of the linear system.
    ModelParams q = base();
    q.lx = 1.0;
    q.tau = 0.4;
    for (ModeIndex mode : {ModeIndex{0, 0}, ModeIndex{3, 0}}) {
        const auto cm = coeffs(q, mode);
        const RootResult root = rightmost_root(cm, q.tau);
        const EigenPair pair = eigen_pair(cm, root.lambda, q);
        const double u = q.a + q.b, v = q.b / (u * u);
        const cd e_tau = std::exp(-root.lambda * q.tau);
        const cd row1 = (-1.0 - 4.0 * u * v - q.du * cm.mu + 6.0 * u * v * e_tau) * pair.cu
                        + (-2.0 * u * u + 3.0 * u * u * e_tau) * pair.cv - root.lambda * pair.cu;
        const cd row2 = -2.0 * u * v * pair.cu + (-u * u - q.dv * cm.mu) * pair.cv
                        - root.lambda * pair.cv;
        CHECK(std::abs(row1) < 1e-10);
        CHECK(std::abs(row2) < 1e-10);
    }

    const auto c3 = coeffs(p, {3, 0});
    const EigenPair real_pair = eigen_pair(c3, cd(0.25), p);
    CHECK(real_pair.cv.imag() == 0.0);

    CHECK_THROWS_AS(eigen_pair(c, cd(-1.0), p), SingularEigenproblem);
}
