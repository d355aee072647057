#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"
#include "varhardy/errors.hpp"
#include "varhardy/random.hpp"

using namespace varhardy;
using fixtures::rv;

TEST_CASE("build_space accepts the degenerate and smallest nontrivial spaces") {
    const auto one = build_space({1.0}, {{{0}}});
    CHECK(one.outcome_count() == 1);
    CHECK(one.depth() == 0);

    const auto two = build_space({0.5, 0.5}, {{{0, 1}}, {{0}, {1}}});
    CHECK(two.depth() == 1);
    CHECK(two.cells(0).size() == 1);
    CHECK(two.cells(1).size() == 2);
    CHECK(two.cells(-1).size() == 1);
}

TEST_CASE("build_space rejects bad inputs") {
    CHECK_THROWS_AS(build_space({0.5, 0.6}, {{{0}, {1}}}), WeightError);
    CHECK_THROWS_AS(build_space({1.5, -0.5}, {{{0}, {1}}}), WeightError);
    CHECK_THROWS_AS(build_space({}, {{}}), WeightError);
    CHECK_THROWS_AS(build_space({0.5, 0.5}, {{{0}}}), CoverError);
    CHECK_THROWS_AS(build_space({0.5, 0.5}, {{{0, 1}, {1}}}), CoverError);
    CHECK_THROWS_AS(build_space({0.5, 0.5}, {{{0, 2}}}), CoverError);
    CHECK_THROWS_AS(build_space({0.25, 0.25, 0.25, 0.25},
                                {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}}),
                    RefinementError);
}

TEST_CASE("cells are stored canonically") {
    const auto s = build_space({0.25, 0.25, 0.25, 0.25}, {{{3, 2}, {1, 0}}});
    REQUIRE(s.cells(0).size() == 2);
    CHECK(s.cells(0)[0] == std::vector<std::size_t>{0, 1});
    CHECK(s.cells(0)[1] == std::vector<std::size_t>{2, 3});
}

TEST_CASE("conditional expectation examples") {
    const auto s2 = fixtures::uniform(2);
    const auto e = conditional_expectation(s2, rv({1, 3}), -1);
    CHECK(e[0] == doctest::Approx(2.0));
    CHECK(e[1] == doctest::Approx(2.0));
    CHECK(e.level() == -1);

    const auto s4 = build_space({0.25, 0.25, 0.25, 0.25}, {{{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}});
    const auto e1 = conditional_expectation(s4, rv({1, 2, 3, 4}), 0);
    CHECK(e1[0] == 1.5);
    CHECK(e1[1] == 1.5);
    CHECK(e1[2] == 3.5);
    CHECK(e1[3] == 3.5);

    // measurable input is a fixed point
    const auto again = conditional_expectation(s4, e1, 0);
    CHECK(again.values()[0] == e1[0]);
    CHECK(again.values()[3] == e1[3]);

    CHECK_THROWS_AS(conditional_expectation(s4, rv({1, 2, 3, 4}), 2), LevelError);
    CHECK_THROWS_AS(conditional_expectation(s4, rv({1, 2, 3, 4}), -2), LevelError);
    CHECK_THROWS_AS(conditional_expectation(s4, rv({1, 2, INFINITY, 4}), 0), NonFiniteError);
}

TEST_CASE("event measure") {
    const auto s = fixtures::uniform(4);
    CHECK(event_measure(s, std::vector<std::size_t>{}) == 0.0);
    CHECK(event_measure(s, std::vector<std::size_t>{0, 1, 2, 3}) == doctest::Approx(1.0));
    CHECK(event_measure(s, std::vector<std::size_t>{0}) == 0.25);
    CHECK_THROWS_AS(event_measure(s, std::vector<std::size_t>{7}), UnknownOutcomeError);
}

TEST_CASE("stopping time validation") {
    const auto s = fixtures::dyadic1();
    CHECK(validate_stopping_time(s, StoppingTime::constant(2, StoppingTime::kNever)).pass);
    CHECK(validate_stopping_time(s, StoppingTime::constant(2, 0)).pass);

    const auto bad = validate_stopping_time(s, StoppingTime{{0, StoppingTime::kNever}});
    CHECK_FALSE(bad.pass);
    CHECK(bad.first_failure() == 0);

    CHECK(validate_stopping_time(s, StoppingTime{{1, StoppingTime::kNever}}).pass);
    CHECK(validate_stopping_time(s, StoppingTime::constant(2, -1)).pass);
    CHECK_FALSE(validate_stopping_time(s, StoppingTime::constant(2, 5)).pass);
}

TEST_CASE("dyadic generator") {
    const auto d0 = generate_dyadic_space(0, 0.5, 1);
    CHECK(d0.outcome_count() == 1);

    const auto half = generate_dyadic_space(2, 0.5, 1);
    REQUIRE(half.outcome_count() == 4);
    for (double w : half.weights()) CHECK(w == 0.25);

    const auto biased = generate_dyadic_space(2, 0.75, 1);
    const double expected[] = {0.5625, 0.1875, 0.1875, 0.0625};
    for (std::size_t i = 0; i < 4; ++i) CHECK(biased.weights()[i] == doctest::Approx(expected[i]).epsilon(1e-15));

    CHECK_THROWS_AS(generate_dyadic_space(15, 0.5, 1), DepthError);
    CHECK_THROWS_AS(generate_dyadic_space(-1, 0.5, 1), DepthError);

    const auto a = generate_dyadic_space(6, 0.3, 42, true);
    const auto b = generate_dyadic_space(6, 0.3, 42, true);
    CHECK(a == b);
}

TEST_CASE("property: tower, linearity and positivity of E_n on random dyadic spaces") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int depth = rng.uniform_int(1, 7);
        const auto s = generate_dyadic_space(depth, rng.uniform(0.1, 0.9), rng.bits(), true);
        const double total = std::accumulate(s.weights().begin(), s.weights().end(), 0.0);
        CHECK(std::abs(total - 1.0) <= 1e-12);

        std::vector<double> xv(s.outcome_count());
        std::vector<double> yv(s.outcome_count());
        for (auto& v : xv) v = rng.gaussian();
        for (auto& v : yv) v = std::abs(rng.gaussian());
        const RandomVariable x(xv);
        const RandomVariable y(yv);
        const double mean = expectation(s, x);

        for (int n = -1; n <= depth; ++n) {
            const auto en = conditional_expectation(s, x, n);
            CHECK(s.is_measurable(en, n, 1e-12));
            for (int m = -1; m <= n; ++m) {
                const auto lhs = conditional_expectation(s, en, m);
                const auto rhs = conditional_expectation(s, x, m);
                for (std::size_t w = 0; w < x.size(); ++w) CHECK(std::abs(lhs[w] - rhs[w]) <= 1e-12);
            }
            std::vector<double> combo(xv.size());
            for (std::size_t w = 0; w < combo.size(); ++w) combo[w] = 2.0 * xv[w] - 3.0 * yv[w];
            const auto lin = conditional_expectation(s, RandomVariable(combo), n);
            const auto ey = conditional_expectation(s, y, n);
            for (std::size_t w = 0; w < combo.size(); ++w) {
                CHECK(std::abs(lin[w] - (2.0 * en[w] - 3.0 * ey[w])) <= 1e-12);
                CHECK(ey[w] >= 0.0);
            }
            const auto one = conditional_expectation(s, RandomVariable::constant(x.size(), 1.0), n);
            for (double v : one.values()) CHECK(std::abs(v - 1.0) <= 1e-12);
        }
        const auto top = conditional_expectation(s, x, -1);
        CHECK(std::abs(top[0] - mean) <= 1e-12);
    }
}
