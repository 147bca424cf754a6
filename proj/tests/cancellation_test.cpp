#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tailinv/cancellation.hpp"
#include "test_util.hpp"

using namespace tailinv;
using testutil::vec;

namespace {

const double kPiOverLn2 = std::numbers::pi / std::numbers::ln2;

QuadrantMeasures scalar_quadrants(const std::vector<std::pair<double, double>>& plus,
                                  const std::vector<std::pair<double, double>>& minus) {
    QuadrantMeasures q;
    const auto build = [](const std::vector<std::pair<double, double>>& atoms) {
        std::vector<Atom> out;
        for (const auto& [x, m] : atoms) out.push_back(Atom{Vec::Constant(1, x), m});
        return DiscreteMeasure(1, std::move(out));
    };
    if (!plus.empty()) q.emplace(QuadrantSign::from_mask(1, 1u), build(plus));
    if (!minus.empty()) q.emplace(QuadrantSign::from_mask(1, 0u), build(minus));
    return q;
}

ScanOptions fast_opts(double theta_max = 6.0) {
    ScanOptions o;
    o.theta_max = theta_max;
    return o;
}

} // namespace

TEST_CASE("mellin_eval") {
    const CancellationTask task{{1}, 1.0, 0.5};
    SUBCASE("single unit atom gives exactly 1") {
        const auto q = scalar_quadrants({{1.0, 1.0}}, {});
        const CancellationTask t2{{1}, 2.7, 1.0};
        for (double theta : {-3.0, 0.0, 1.7}) {
            const Complex v = mellin_eval(q, t2, 1, SignPattern::zeros(1), Vec::Constant(1, theta));
            CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-15);
        }
    }
    SUBCASE("weights (1, 1/2, 1/2) vanish at pi / ln 2") {
        const auto q = scalar_quadrants({{1.0, 1.0}, {0.5, 2.0}}, {});
        const Complex v = mellin_eval(q, task, 1, SignPattern::zeros(1), Vec::Constant(1, kPiOverLn2));
        CHECK(std::abs(v) < 1e-14);
    }
    SUBCASE("signed pattern cancels the symmetric pair at theta 0") {
        const auto q = scalar_quadrants({{1.0, 1.0}}, {{1.0, 1.0}});
        const Complex v = mellin_eval(q, task, 1, SignPattern({1}), Vec::Zero(1));
        CHECK(std::abs(v) < 1e-15);
        const Complex v0 = mellin_eval(q, task, 1, SignPattern::zeros(1), Vec::Zero(1));
        CHECK(std::abs(v0 - Complex(2.0, 0.0)) < 1e-15);
    }
    SUBCASE("theta = 0, pattern 0 is the real moment") {
        rng::Stream rs(0xc1ULL, 1);
        for (int trial = 0; trial < 10; ++trial) {
            const int d = 1 + static_cast<int>(rs.next() * 2.0);
            std::vector<Atom> atoms;
            double expected = 0.0;
            const double alpha = 0.5 + 2.0 * rs.next();
            for (int i = 0; i < 5; ++i) {
                Vec p(d);
                for (int j = 0; j < d; ++j) p[j] = 0.1 + 3.0 * rs.next();
                const double m = 0.1 + rs.next();
                atoms.push_back(Atom{p, m});
                expected += m * std::pow(p[0], alpha);
            }
            QuadrantMeasures q;
            q.emplace(QuadrantSign::positive(d), DiscreteMeasure(d, atoms));
            const CancellationTask t{{1}, alpha, alpha / 2.0};
            const Complex v = mellin_eval(q, t, 1, SignPattern::zeros(d), Vec::Zero(d));
            CHECK(v.real() == doctest::Approx(expected).epsilon(1e-13));
            CHECK(std::abs(v.imag()) <= 1e-14 * expected);
        }
    }
    SUBCASE("conjugation symmetry: value(-theta) = conj(value(theta))") {
        rng::Stream rs(0xc2ULL, 2);
        const auto q = scalar_quadrants({{1.3, 0.7}, {0.4, 1.1}}, {{2.2, 0.5}});
        for (int trial = 0; trial < 20; ++trial) {
            const Vec theta = Vec::Constant(1, 8.0 * rs.next() - 4.0);
            for (const auto& m : SignPattern::all(1)) {
                const Complex a = mellin_eval(q, task, 1, m, theta);
                const Complex b = mellin_eval(q, task, 1, m, -theta);
                CHECK(std::abs(b - std::conj(a)) < 1e-13);
            }
        }
    }
    SUBCASE("nonpositive coordinates are rejected") {
        const auto q = scalar_quadrants({{-1.0, 1.0}}, {});
        CHECK_THROWS_AS(mellin_eval(q, task, 1, SignPattern::zeros(1), Vec::Zero(1)), ValidationError);
    }
}

TEST_CASE("scan_zeros") {
    SUBCASE("constant evaluator finds nothing") {
        const auto res = scan_zeros([](const Vec&) { return Complex(2.0, 0.0); }, 1, fast_opts());
        CHECK(res.zeros.empty());
        REQUIRE(res.global_min.has_value());
        CHECK(res.global_min->abs_value == doctest::Approx(2.0));
    }
    SUBCASE("1 + e^{-i theta ln 2} has its roots at odd multiples of pi/ln 2") {
        const auto res = scan_zeros(
            [](const Vec& t) { return Complex(1.0, 0.0) + std::exp(Complex(0.0, -t[0] * std::numbers::ln2)); },
            1, fast_opts(6.0));
        REQUIRE(!res.zeros.empty());
        CHECK(res.zeros.front().theta[0] == doctest::Approx(kPiOverLn2).epsilon(1e-9));
        CHECK(res.zeros.front().abs_value <= 1e-9);
        for (const auto& w : res.zeros) CHECK(std::abs(w.theta[0]) == doctest::Approx(kPiOverLn2).epsilon(1e-8));
    }
    SUBCASE("1 - e^{-i theta ln 2} vanishes at the origin") {
        const auto res = scan_zeros(
            [](const Vec& t) { return Complex(1.0, 0.0) - std::exp(Complex(0.0, -t[0] * std::numbers::ln2)); },
            1, fast_opts(6.0));
        REQUIRE(!res.zeros.empty());
        CHECK(res.zeros.front().theta[0] == doctest::Approx(0.0));
    }
    SUBCASE("two-dimensional grid finds a planted zero") {
        // (e^{i theta_1} - e^{0.4 i}) + (e^{i theta_2} - e^{-0.8 i}) vanishes
        // only at (0.4, -0.8) within the box.
        const auto f = [](const Vec& t) {
            return std::exp(Complex(0.0, t[0])) - std::exp(Complex(0.0, 0.4)) +
                   std::exp(Complex(0.0, t[1])) - std::exp(Complex(0.0, -0.8));
        };
        ScanOptions o;
        o.theta_max = 2.0;
        o.grid_step = 0.05;
        const auto res = scan_zeros(f, 2, o);
        REQUIRE(!res.zeros.empty());
        CHECK(res.zeros.front().theta[0] == doctest::Approx(0.4).epsilon(1e-6));
        CHECK(res.zeros.front().theta[1] == doctest::Approx(-0.8).epsilon(1e-6));
    }
}

TEST_CASE("check_scalar_determining") {
    SUBCASE("all-ones family is certified") {
        for (int q : {1, 2, 5}) {
            const auto verdict =
                check_scalar_determining(std::vector<double>(static_cast<std::size_t>(q), 1.0), 1.0, fast_opts());
            CHECK(verdict.status == VerdictStatus::Certified);
        }
    }
    SUBCASE("(1,-1) is refuted on the signed condition at theta 0") {
        const auto verdict = check_scalar_determining(std::vector<double>{1.0, -1.0}, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Refuted);
        CHECK(verdict.condition_id == "eq3.4");
        CHECK(verdict.witness_theta[0] == doctest::Approx(0.0));
    }
    SUBCASE("(1, 1/2, 1/2) is refuted on the plain sum at pi/ln 2") {
        const auto verdict = check_scalar_determining(std::vector<double>{1.0, 0.5, 0.5}, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Refuted);
        CHECK(verdict.condition_id == "eq3.3");
        CHECK(verdict.witness_theta[0] == doctest::Approx(kPiOverLn2).epsilon(1e-6));
    }
    SUBCASE("a dominant weight certifies") {
        const auto verdict = check_scalar_determining(std::vector<double>{2.0, 1.0, -0.5}, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Certified);
        CHECK(verdict.certificate == "atom-dominance");
    }
    SUBCASE("a contracting geometric family certifies") {
        const auto verdict =
            check_scalar_determining(std::vector<double>{1.0, -0.6, 0.36, -0.216}, 1.3, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Certified);
        CHECK(verdict.certificate == "geometric-series");
    }
    SUBCASE("verdicts are scale invariant") {
        for (double c : {0.25, 3.0}) {
            const auto base = check_scalar_determining(std::vector<double>{1.0, 0.5, 0.5}, 1.0, fast_opts());
            const auto scaled =
                check_scalar_determining(std::vector<double>{c, 0.5 * c, 0.5 * c}, 1.0, fast_opts());
            CHECK(base.status == scaled.status);
            CHECK(scaled.witness_theta[0] == doctest::Approx(base.witness_theta[0]).epsilon(1e-9));
            CHECK(scaled.condition_id == base.condition_id);
        }
    }
    SUBCASE("enlarging theta_max never un-refutes") {
        const auto small = check_scalar_determining(std::vector<double>{1.0, 0.5, 0.5}, 1.0, fast_opts(6.0));
        const auto large = check_scalar_determining(std::vector<double>{1.0, 0.5, 0.5}, 1.0, fast_opts(50.0));
        CHECK(small.status == VerdictStatus::Refuted);
        CHECK(large.status == VerdictStatus::Refuted);
        CHECK(large.witness_theta[0] == doctest::Approx(small.witness_theta[0]).epsilon(1e-9));
    }
    SUBCASE("all-zero families are rejected") {
        CHECK_THROWS_AS(check_scalar_determining(std::vector<double>{0.0, 0.0}, 1.0, fast_opts()),
                        ValidationError);
    }
}

TEST_CASE("check_diagonal_determining") {
    SUBCASE("a single vector with nonvanishing coordinates is certified") {
        const auto fam = WeightFamily::diagonals({vec({0.7, -2.0, 1.1})});
        const auto verdict = check_diagonal_determining(fam, 1.4, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Certified);
        CHECK(verdict.certificate == "single-atom");
    }
    SUBCASE("the contracting power family is certified by the geometric argument") {
        std::vector<Vec> entries;
        Vec d0 = vec({1.0, 1.0});
        const Vec g = vec({0.5, -0.3});
        Vec cur = d0;
        entries.push_back(cur);
        for (int l = 0; l < 12; ++l) {
            cur = cur.cwiseProduct(g);
            entries.push_back(cur);
        }
        const auto verdict = check_diagonal_determining(WeightFamily::diagonals(entries), 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Certified);
        CHECK(verdict.certificate == "geometric-series");
    }
    SUBCASE("dimension-one reduction matches the scalar check") {
        const std::vector<std::vector<double>> families = {
            {1.0, -1.0}, {1.0, 0.5, 0.5}, {1.0, 1.0, 1.0}, {2.0, 1.0, -0.5}, {1.0, 0.4, -0.9}};
        for (const auto& psis : families) {
            std::vector<Vec> entries;
            for (double p : psis) entries.push_back(Vec::Constant(1, p));
            const auto scalar = check_scalar_determining(psis, 1.0, fast_opts());
            const auto diag = check_diagonal_determining(WeightFamily::diagonals(entries), 1.0, fast_opts());
            CHECK(scalar.status == diag.status);
            if (scalar.status == VerdictStatus::Refuted)
                CHECK(diag.witness_theta[0] == doctest::Approx(scalar.witness_theta[0]).epsilon(1e-8));
        }
    }
    SUBCASE("vanishing coordinates in nonzero vectors are rejected") {
        const auto fam = WeightFamily::diagonals({vec({1.0, 0.0})});
        CHECK_THROWS_AS(check_diagonal_determining(fam, 1.0, fast_opts()), ValidationError);
    }
    SUBCASE("two-dimensional sign flip refutes at theta 0") {
        // d^(1) = (1,1), d^(2) = (-1,-1): pattern (1,0) cancels.
        const auto fam = WeightFamily::diagonals({vec({1.0, 1.0}), vec({-1.0, -1.0})});
        const auto verdict = check_diagonal_determining(fam, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Refuted);
        CHECK(verdict.condition_id == "eq3.2");
        CHECK(verdict.witness_theta.norm() == doctest::Approx(0.0));
        CHECK(!verdict.witness_pattern.empty());
    }
}

TEST_CASE("check_product_determining") {
    SUBCASE("symmetric two-point law fails the signed condition at 0") {
        const ProductLaw law(make_discrete(1, {{{1.0}, 0.5}, {{-1.0}, 0.5}}));
        const auto verdict = check_product_determining(law, 1.7, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Refuted);
        CHECK(verdict.condition_id == "eq4.3");
        CHECK(verdict.witness_theta[0] == doctest::Approx(0.0));
    }
    SUBCASE("a positive constant is certified") {
        const ProductLaw law(make_discrete(1, {{{3.0}, 1.0}}));
        const auto verdict = check_product_determining(law, 1.0, fast_opts());
        CHECK(verdict.status == VerdictStatus::Certified);
    }
    SUBCASE("dominant atom certifies a signed law") {
        const ProductLaw law(make_discrete(1, {{{2.0}, 0.9}, {{-1.0}, 0.1}}));
        const auto verdict = check_product_determining(law, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Certified);
        CHECK(verdict.certificate == "atom-dominance");
    }
    SUBCASE("diagonal symmetric multiplier refutes with a pattern witness") {
        const ProductLaw law(make_discrete(2, {{{1.0, 1.0}, 0.5}, {{-1.0, -1.0}, 0.5}}));
        const auto verdict = check_product_determining(law, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Refuted);
        CHECK(verdict.condition_id == "eq4.1");
        CHECK(!verdict.witness_pattern.empty());
    }
    SUBCASE("zero coordinates are rejected") {
        const ProductLaw law(make_discrete(2, {{{1.0, 0.0}, 1.0}}));
        CHECK_THROWS_AS(check_product_determining(law, 1.0, fast_opts()), ValidationError);
    }
}

TEST_CASE("check_uniform_product") {
    SUBCASE("symmetric uniform is refuted at theta 0") {
        const auto verdict = check_uniform_product(-1.0, 1.0, 1.3, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Refuted);
        CHECK(verdict.condition_id == "eq4.3");
        CHECK(verdict.witness_theta[0] == doctest::Approx(0.0));
    }
    SUBCASE("positive support is certified from the closed form") {
        const auto verdict = check_uniform_product(0.0, 1.0, 1.0, fast_opts());
        REQUIRE(verdict.status == VerdictStatus::Certified);
        CHECK(verdict.certificate == "one-sided-closed-form");
    }
    SUBCASE("asymmetric two-sided support reports grid evidence") {
        const auto verdict = check_uniform_product(-1.0, 2.0, 1.0, fast_opts(20.0));
        CHECK(verdict.status == VerdictStatus::NoZeroUpTo);
        CHECK(verdict.min_abs_value > 1e-9);
    }
    CHECK_THROWS_AS(check_uniform_product(1.0, 1.0, 1.0, fast_opts()), ValidationError);
}

TEST_CASE("certify_atom_dominance") {
    SUBCASE("a single atom always certifies with its full moment as margin") {
        QuadrantMeasures q;
        q.emplace(QuadrantSign(std::vector<int>{+1, -1}), make_discrete(2, {{{2.0, 3.0}, 0.7}}));
        const auto certs = certify_atom_dominance(q, CancellationTask{{1, 2}, 1.0, 0.5});
        REQUIRE(certs.size() == 2);
        REQUIRE(certs[0].has_value());
        REQUIRE(certs[1].has_value());
        CHECK(certs[0]->margin == doctest::Approx(1.4));
        CHECK(certs[1]->margin == doctest::Approx(2.1));
    }
    SUBCASE("worked two-atom example") {
        QuadrantMeasures q;
        q.emplace(QuadrantSign::positive(2), make_discrete(2, {{{1.0, 1.0}, 1.0}, {{0.5, 2.0}, 0.3}}));
        const auto certs = certify_atom_dominance(q, CancellationTask{{1, 2}, 1.0, 0.5});
        REQUIRE(certs[0].has_value());
        CHECK(certs[0]->margin == doctest::Approx(1.0 - 0.15));
        REQUIRE(certs[1].has_value());
        CHECK(certs[1]->margin == doctest::Approx(1.0 - 0.6));
    }
    SUBCASE("an exact tie yields no certificate") {
        const auto q = scalar_quadrants({{1.0, 1.0}}, {{1.0, 1.0}});
        const auto certs = certify_atom_dominance(q, CancellationTask{{1}, 1.0, 0.5});
        CHECK(!certs[0].has_value());
    }
    SUBCASE("dominance implies the grid scan finds no zero") {
        rng::Stream rs(0xd0ULL, 1);
        ScanOptions o;
        o.theta_max = 3.0;
        o.grid_step = 0.05;
        for (int trial = 0; trial < 5; ++trial) {
            const int d = 1 + static_cast<int>(rs.next() * 2.0);
            // One heavy atom plus light signed noise.
            std::vector<Atom> atoms;
            Vec big(d);
            for (int j = 0; j < d; ++j) big[j] = 2.0 + rs.next();
            atoms.push_back(Atom{big, 1.0});
            for (int i = 0; i < 3; ++i) {
                Vec small(d);
                for (int j = 0; j < d; ++j) small[j] = (0.05 + 0.1 * rs.next()) * (rs.next() < 0.5 ? -1.0 : 1.0);
                atoms.push_back(Atom{small, 0.5 + rs.next()});
            }
            const auto split = quadrant_split(DiscreteMeasure(d, atoms));
            CancellationTask task{{}, 1.0, 0.5};
            for (int j = 1; j <= d; ++j) task.coords_k.push_back(j);
            const auto certs = certify_atom_dominance(split.parts, task);
            for (const auto& c : certs) REQUIRE(c.has_value());
            for (int j = 1; j <= d; ++j) {
                for (const auto& m : SignPattern::all(d)) {
                    const auto res = scan_zeros(
                        [&](const Vec& theta) { return mellin_eval(split.parts, task, j, m, theta); }, d, o);
                    CHECK(res.zeros.empty());
                }
            }
        }
    }
}

TEST_CASE("validate_hypotheses") {
    SUBCASE("unit mass off the axes passes") {
        const auto report =
            validate_hypotheses(make_discrete(2, {{{1.0, 1.0}, 1.0}}), {}, CancellationTask{{1, 2}, 1.0, 0.5});
        CHECK(report.nonconcentration == std::vector<double>({1.0, 1.0}));
        CHECK(!report.concentrated_on_subspace);
        CHECK(report.hypotheses_ok);
        CHECK(report.small_multiplier.find("passed") != std::string::npos);
    }
    SUBCASE("mass concentrated on an axis is flagged") {
        const auto report = validate_hypotheses(make_discrete(2, {{{0.0, 1.0}, 1.0}, {{0.0, 2.0}, 0.5}}), {},
                                                CancellationTask{{1, 2}, 1.0, 0.5});
        CHECK(report.nonconcentration[0] == doctest::Approx(0.0));
        CHECK(report.concentrated_on_subspace);
        CHECK(!report.hypotheses_ok);
    }
    SUBCASE("moment sums match direct arithmetic") {
        const auto report = validate_hypotheses(make_discrete(1, {{{1.0}, 1.0}, {{0.5}, 2.0}}), {},
                                                CancellationTask{{1}, 1.0, 0.5});
        CHECK(report.moment_minus == doctest::Approx(1.0 + 2.0 * std::pow(0.5, 0.5)).epsilon(1e-12));
        CHECK(report.moment_plus == doctest::Approx(1.0 + 2.0 * std::pow(0.5, 1.5)).epsilon(1e-12));
    }
    SUBCASE("tail probe is reported as sup s^alpha value") {
        const auto report = validate_hypotheses(make_discrete(1, {{{1.0}, 1.0}}),
                                                {{2.0, 0.3}, {10.0, 0.05}}, CancellationTask{{1}, 1.0, 0.5});
        CHECK(report.tail_probe_sup == doctest::Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("system_residual vanishes for identical families") {
    rng::Stream rs(0xe0ULL, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + static_cast<int>(rs.next() * 2.0);
        const auto random_family = [&](int atoms) {
            QuadrantMeasures q;
            for (const auto& v : QuadrantSign::all(d)) {
                if (rs.next() < 0.3) continue;
                std::vector<Atom> list;
                for (int i = 0; i < atoms; ++i) {
                    Vec p(d);
                    for (int j = 0; j < d; ++j) p[j] = 0.2 + 2.0 * rs.next();
                    list.push_back(Atom{p, 0.1 + rs.next()});
                }
                q.emplace(v, DiscreteMeasure(d, list));
            }
            if (q.empty()) q.emplace(QuadrantSign::positive(d), make_discrete(d, {{std::vector<double>(d, 1.0), 1.0}}));
            return q;
        };
        const auto rho = random_family(2);
        const auto nu = random_family(3);
        std::vector<EvalSet> panel;
        for (double t : {0.5, 1.0, 2.0})
            panel.push_back(EvalSet::half_line(std::vector<int>(static_cast<std::size_t>(d), +1),
                                               Vec::Constant(d, t)));
        CHECK(system_residual(rho, nu, nu, panel) <= 1e-12);
    }
}
