#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tailinv/cancellation.hpp"
#include "tailinv/oscillating.hpp"
#include "tailinv/rng.hpp"

using namespace tailinv;

TEST_CASE("oscillating tail closed form") {
    SUBCASE("a = b = 0 is the pure power tail") {
        for (double x : {1.0, 2.5, 100.0})
            CHECK(oscillating_tail(1.5, 2.0, 0.0, 0.0, x) == doctest::Approx(std::pow(x, -1.5)).epsilon(1e-15));
    }
    SUBCASE("matches adaptive quadrature of the density") {
        rng::Stream rs(0xaaULL, 1);
        for (int trial = 0; trial < 6; ++trial) {
            const double alpha = 0.5 + 2.0 * rs.next();
            const double theta0 = 0.3 + 3.0 * rs.next();
            const double phase = 2.0 * std::numbers::pi * rs.next();
            const double rad = rs.next();
            const double a = rad * std::cos(phase);
            const double b = rad * std::sin(phase);
            for (int i = 0; i < 12; ++i) {
                const double x = std::exp(-1.0 + 4.0 * i / 11.0);
                const double closed = oscillating_tail(alpha, theta0, a, b, x);
                const double quad = oracles::oscillating_tail_oracle(alpha, theta0, a, b, x);
                CHECK(closed == doctest::Approx(quad).epsilon(1e-10));
            }
        }
    }
    SUBCASE("opposite perturbations cancel exactly") {
        rng::Stream rs(0xabULL, 2);
        for (int trial = 0; trial < 10; ++trial) {
            const double alpha = 0.5 + 2.0 * rs.next();
            const double theta0 = 0.3 + 3.0 * rs.next();
            const double a = rs.next() - 0.5;
            const double b = rs.next() - 0.5;
            const double x = std::exp(4.0 * rs.next() - 1.0);
            const double sum = oscillating_tail(alpha, theta0, a, b, x) +
                               oscillating_tail(alpha, theta0, -a, -b, x);
            CHECK(sum == doctest::Approx(2.0 * std::pow(x, -alpha)).epsilon(1e-14));
        }
    }
    SUBCASE("x alpha tail oscillates with the predicted amplitude") {
        // alpha=1, theta0=1, a=1: amplitude 1/sqrt(2), so (max-min)/2 over a
        // period of 2 pi in ln x equals it.
        const double amp = oscillation_amplitude(1.0, 1.0, 1.0, 0.0);
        CHECK(amp == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        double lo = 1e300;
        double hi = -1e300;
        for (int i = 0; i <= 20000; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 20000.0;
            const double v = std::exp(t) * oscillating_tail(1.0, 1.0, 1.0, 0.0, std::exp(t));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK((hi - lo) / 2.0 == doctest::Approx(amp).epsilon(1e-6));
    }
}

TEST_CASE("build_law") {
    SUBCASE("pure Pareto with r = 1 has no atom") {
        const OscillatingLaw law = build_law({1.0, 1.0, 0.0, 0.0, 1.0, false});
        CHECK(law.tail_at_r() == doctest::Approx(1.0));
        CHECK(law.atom_at_one() == doctest::Approx(0.0));
        CHECK(law.tail(2.0) == doctest::Approx(0.5));
    }
    SUBCASE("truncation at e^pi leaves a valid atom") {
        const double r = std::exp(std::numbers::pi);
        const OscillatingLaw law = build_law({1.0, 1.0, 1.0, 0.0, r, false});
        const double expected_tail = std::exp(-std::numbers::pi) * 0.5; // cos(pi) = -1 halves the tail
        CHECK(law.tail_at_r() == doctest::Approx(expected_tail).epsilon(1e-12));
        CHECK(law.atom_at_one() == doctest::Approx(1.0 - expected_tail).epsilon(1e-12));
        CHECK(law.atom_at_one() >= 0.0);
        CHECK(law.atom_at_one() <= 1.0);
    }
    SUBCASE("too-small r is rejected with a suggested truncation point") {
        CHECK_THROWS_WITH_AS(build_law({1.0, 1.0, 1.0, 0.0, 0.5, false}),
                             doctest::Contains("smallest admissible r"), ValidationError);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(build_law({-1.0, 1.0, 0.0, 0.0, 1.0, false}), ValidationError);
        CHECK_THROWS_AS(build_law({1.0, 0.0, 0.0, 0.0, 1.0, false}), ValidationError);
        CHECK_THROWS_AS(build_law({1.0, 1.0, 1.0, 0.5, 10.0, false}), ValidationError);
    }
}

TEST_CASE("sampling") {
    SUBCASE("Pareto median is 2") {
        const OscillatingLaw law = build_law({1.0, 1.0, 0.0, 0.0, 1.0, false});
        CHECK(law.quantile(0.5) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(law.quantile(0.9) == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("fixed seed reproduces the first ten values") {
        const OscillatingLaw law = build_law({1.0, 1.0, 1.0, 0.0, std::exp(std::numbers::pi), false});
        const auto s1 = law.sample(10, 42);
        const auto s2 = law.sample(10, 42);
        const auto s3 = law.sample(10, 43);
        CHECK(s1 == s2);
        CHECK(s1 != s3);
    }
    SUBCASE("empirical tail matches the closed form (DKW-style)") {
        const double r = std::exp(std::numbers::pi);
        const OscillatingLaw law = build_law({1.0, 1.0, 1.0, 0.0, r, false});
        const std::size_t n = 1000000;
        auto values = law.sample(n, 2024);
        std::sort(values.begin(), values.end());
        for (int i = 0; i < 50; ++i) {
            const double x = r * std::exp(0.1 + 4.9 * i / 49.0);
            const double expect = law.tail(x);
            const auto above = values.end() - std::upper_bound(values.begin(), values.end(), x);
            const double hat = static_cast<double>(above) / static_cast<double>(n);
            const double band = 3.0 * std::sqrt(expect * (1.0 - expect) / static_cast<double>(n));
            CHECK(std::abs(hat - expect) <= band + 1e-12);
        }
    }
    SUBCASE("mixed law centers when alpha > 1") {
        OscLawParams p{1.8, 1.0, 0.6, 0.3, std::exp(std::numbers::pi), false};
        const MixedLaw mixed(p, MixVariant::OppositeFlip);
        CHECK(mixed.centered());
        const auto values = mixed.sample(400000, 7);
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        CHECK(std::abs(mean) < 0.05); // centered within Monte Carlo noise
    }
    SUBCASE("symmetric mixed law has zero mean shift") {
        OscLawParams p{0.9, 1.0, 0.5, 0.0, std::exp(std::numbers::pi), false};
        const MixedLaw mixed(p, MixVariant::Symmetric);
        CHECK(!mixed.centered());
        CHECK(mixed.mean_shift() == 0.0);
    }
}

TEST_CASE("oscillation certificate") {
    SUBCASE("pure Pareto does not oscillate") {
        const OscillatingLaw law = build_law({1.0, 1.0, 0.0, 0.0, 1.0, false});
        const auto cert = oscillation_certificate(law, 2);
        CHECK(cert.sup == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cert.inf == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(!cert.non_rv);
    }
    SUBCASE("unit perturbation at alpha = theta0 = 1 spans sqrt(2)") {
        const OscillatingLaw law = build_law({1.0, 1.0, 1.0, 0.0, std::exp(std::numbers::pi), false});
        const auto cert = oscillation_certificate(law, 1);
        CHECK(cert.sup - cert.inf == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        CHECK(cert.non_rv);
    }
    SUBCASE("general parameters match 2 alpha sqrt(a^2+b^2) / sqrt(alpha^2 + theta0^2)") {
        const OscillatingLaw law = build_law({2.0, 2.0, 0.3, 0.4, 3.0, false});
        const auto cert = oscillation_certificate(law, 3);
        const double expected = 2.0 * 2.0 * 0.5 / std::sqrt(8.0);
        CHECK(cert.sup - cert.inf == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("quadrant-system fixture") {
    SUBCASE("a = b = 0 collapses the two families") {
        Remark22Options opts;
        opts.target_nodes = 1000;
        const auto fx = remark22_fixture(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, opts);
        CHECK(fx.tv_window == doctest::Approx(0.0));
        CHECK(system_residual(fx.rho, fx.nu1, fx.nu2, fx.panel) <= 1e-12);
    }
    SUBCASE("the perturbed power family solves the same system") {
        Remark22Options opts;
        opts.target_nodes = 4000;
        const auto fx = remark22_fixture(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, opts);
        CHECK(fx.tv_window > 0.1);
        CHECK(system_residual(fx.rho, fx.nu1, fx.nu2, fx.panel) <= 1e-8);
    }
    SUBCASE("second variant: signed condition failure") {
        Remark22Options opts;
        opts.target_nodes = 4000;
        opts.second_line = true;
        const auto fx = remark22_fixture(1.0, 1.0, 1.0, 1.0, 0.8, 0.3, opts);
        CHECK(fx.tv_window > 0.1);
        CHECK(system_residual(fx.rho, fx.nu1, fx.nu2, fx.panel) <= 1e-8);
    }
    SUBCASE("perturbing the fixture moves the residual away from zero") {
        Remark22Options opts;
        opts.target_nodes = 4000;
        opts.nu1_plus_scale = 1.01;
        const auto fx = remark22_fixture(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, opts);
        CHECK(system_residual(fx.rho, fx.nu1, fx.nu2, fx.panel) > 1e-4);

        Remark22Options opts2;
        opts2.target_nodes = 4000;
        opts2.rho_minus_scale = 1.05;
        const auto fx2 = remark22_fixture(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, opts2);
        CHECK(system_residual(fx2.rho, fx2.nu1, fx2.nu2, fx2.panel) > 1e-4);
    }
    SUBCASE("negative densities are rejected") {
        CHECK_THROWS_AS(remark22_fixture(0.5, 1.0, 1.0, 1.0, 1.0, 0.0), ValidationError);
    }
}
