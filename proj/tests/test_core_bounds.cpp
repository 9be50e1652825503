#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "riskfloor/core_bounds.hpp"
#include "riskfloor/errors.hpp"
#include "riskfloor/simlab.hpp"

using namespace riskfloor;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("solve_delta examples") {
    CHECK(solve_delta(0.0) == 0.0);
    CHECK(solve_delta(kInf) == 1.0);
    CHECK(std::isinf(solve_delta_log(kInf)));
    const double rhs = -0.5 - std::log(0.5);
    CHECK(solve_delta(rhs) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(oracle::delta_lhs(solve_delta(rhs)) - rhs) <= 1e-12);
}

TEST_CASE("solve_delta rejects bad rhs") {
    CHECK_THROWS_AS(solve_delta(-1e-9), DomainError);
    CHECK_THROWS_AS(solve_delta(std::nan("")), DomainError);
}

TEST_CASE("solve_delta matches long double bisection") {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const double rhs = 5.0 * rng.uniform();
        const double got = solve_delta(rhs);
        const auto want = oracle::delta_bisect(rhs);
        CHECK(std::abs(got - static_cast<double>(want)) <= 1e-13);
    }
}

TEST_CASE("solve_delta forward residual and monotonicity over [0, 50]") {
    Rng rng(12);
    std::vector<double> rhs(1000);
    for (auto& r : rhs) r = 50.0 * rng.uniform();
    std::sort(rhs.begin(), rhs.end());
    double prev_t = -1.0;
    for (double r : rhs) {
        const double t = solve_delta_log(r);
        CHECK(std::abs(delta_equation_lhs_log(t) - r) <= 1e-12 * std::max(1.0, r));
        CHECK(t > prev_t);
        prev_t = t;
        if (r < 5.0) CHECK(std::abs(oracle::delta_lhs(solve_delta(r)) - r) <= 1e-12 * std::max(1.0, r));
    }
}

TEST_CASE("solve_delta tiny rhs") {
    for (double r : {1e-300, 1e-30, 1e-16, 1e-10, 1e-6}) {
        const double D = solve_delta(r);
        CHECK(D > 0.0);
        // -D - log(1-D) = D^2/2 + D^3/3 + ...
        CHECK(D == doctest::Approx(std::sqrt(2.0 * r)).epsilon(1e-2));
    }
}

TEST_CASE("AlphaBudget") {
    const auto even = AlphaBudget::even(0.05);
    CHECK(even.alpha0() == 0.025);
    CHECK(even.alpha1() == 0.025);
    const auto split = AlphaBudget::split(0.1, 0.03);
    CHECK(std::abs(split.alpha0() + split.alpha1() - split.alpha()) <= std::nextafter(0.1, 1.0) - 0.1);
    CHECK_THROWS_AS(AlphaBudget::split(0.1, 0.1), DomainError);
    CHECK_THROWS_AS(AlphaBudget::even(1.0), DomainError);
    CHECK_THROWS_AS(AlphaBudget::even(0.0), DomainError);
}

TEST_CASE("LossSpec") {
    CHECK_FALSE(LossSpec::squared().B.has_value());
    CHECK(*LossSpec::truncated(4.0).B == 4.0);
    CHECK_THROWS_AS(LossSpec::truncated(0.0), DomainError);
}

TEST_CASE("erm_markov examples") {
    CHECK(bound_erm_markov(0.05, 0.0).value == 0.0);
    CHECK(bound_erm_markov(0.05, 0.2).value == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(bound_erm_markov(0.1, 1.5).value == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(bound_erm_markov(0.1, 1.5).certified);
    CHECK_THROWS_AS(bound_erm_markov(1.2, 1.0), DomainError);
    CHECK_THROWS_AS(bound_erm_markov(0.0, 1.0), DomainError);
}

TEST_CASE("erm_chernoff examples") {
    const auto zero = bound_erm_chernoff(0.05, 100, 1.0, 0.0);
    CHECK(zero.value == 0.0);
    CHECK(*zero.delta == 1.0);

    // rhs = ln(20) / 25
    const auto r = bound_erm_chernoff(0.05, 100, 1.0, 0.25);
    const double rhs = std::log(20.0) / 25.0;
    const auto D = static_cast<double>(oracle::delta_bisect(rhs));
    CHECK(std::abs(oracle::delta_lhs(D) - rhs) < 1e-10);
    CHECK(*r.delta == doctest::Approx(D).epsilon(1e-12));
    CHECK(*r.delta == doctest::Approx(0.41314042968341308).epsilon(1e-12));
    CHECK(r.value == doctest::Approx(0.14671489257914673).epsilon(1e-12));
    CHECK(r.value == doctest::Approx((1.0 - *r.delta) * 0.25).epsilon(1e-14));

    CHECK_THROWS_AS(bound_erm_chernoff(0.05, 100, 1.0, 1.5), InconsistencyError);
}

TEST_CASE("erm_trunc examples") {
    CHECK(bound_erm_trunc(0.05, 50, 4.0, 0.0).value == 0.0);
    const auto r = bound_erm_trunc(0.05, 50, 4.0, 1.0);
    const double rhs = 4.0 * std::log(20.0) / 50.0;
    CHECK(rhs == doctest::Approx(0.23965858188431928).epsilon(1e-15));
    const auto D = static_cast<double>(oracle::delta_bisect(rhs));
    CHECK(*r.delta == doctest::Approx(D).epsilon(1e-12));
    CHECK(r.value == doctest::Approx(0.45734809104238535).epsilon(1e-12));
    CHECK(r.value >= 1.0 - std::sqrt(2.0 * 16.0 * std::log(20.0) / 50.0));
}

TEST_CASE("Chernoff postcondition and nonnegativity (property)") {
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        const double alpha = 0.001 + 0.5 * rng.uniform();
        const int n = 1 + static_cast<int>(rng.below(5000));
        const double B = 0.1 + 20.0 * rng.uniform();
        const double risk = B * rng.uniform();
        const auto c = bound_erm_chernoff(alpha, n, B, risk);
        CHECK(c.value >= 0.0);
        CHECK(c.value >= risk - std::sqrt(risk * 2.0 * B * std::log(1.0 / alpha) / n) - 1e-12);
        CHECK(std::abs(c.value - (1.0 - *c.delta) * risk) <= 1e-15 * risk);
        const auto t = bound_erm_trunc(alpha, n, B, risk);
        CHECK(t.value >= risk - std::sqrt(2.0 * B * B * std::log(1.0 / alpha) / n) - 1e-12);
        CHECK(bound_erm_markov(alpha, risk).value >= 0.0);
    }
}

TEST_CASE("Chernoff value nondecreasing in the supplied risk (property)") {
    for (double B : {1.0, 4.0, 12.0}) {
        double prev = 0.0;
        for (int i = 1; i <= 400; ++i) {
            const double risk = B * i / 400.0;
            const double v = bound_erm_trunc(0.05, 60, B, risk).value;
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("trivial randomized bound") {
    Rng rng(14);
    CHECK(trivial_randomized_bound(0.0, rng).value == 0.0);
    CHECK(std::isinf(trivial_randomized_bound(1.0, rng).value));
    long inf = 0;
    const long draws = 100000;
    for (long i = 0; i < draws; ++i) inf += std::isinf(trivial_randomized_bound(0.1, rng).value);
    const double rate = static_cast<double>(inf) / draws;
    CHECK(std::abs(rate - 0.1) <= 3.0 * std::sqrt(0.1 * 0.9 / draws));
}

TEST_CASE("method names round trip") {
    for (auto m : {Method::erm_markov, Method::erm_chernoff, Method::erm_trunc, Method::pwc_basic, Method::pwc_refined,
                   Method::pwc_trunc, Method::trivial_randomized}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK(parse_method("pwc-basic") == Method::pwc_basic);
    CHECK_FALSE(parse_method("nope").has_value());
}

TEST_CASE("Chernoff lemma simulation") {
    ExperimentOptions opt;
    opt.trials = 10000;
    opt.seed = 5;
    CHECK(chernoff_lemma_experiment(std::vector<double>(100, 0.0), 0.05, opt).rate == 1.0);
    CHECK(chernoff_lemma_experiment(std::vector<double>(100, 1.0), 0.05, opt).rate == 1.0);
    const auto half = chernoff_lemma_experiment(std::vector<double>(100, 0.5), 0.05, opt);
    CHECK(half.rate >= 0.95 - 3.0 * half.stderr_);
    std::vector<double> profile(60);
    for (std::size_t i = 0; i < profile.size(); ++i) profile[i] = static_cast<double>(i % 7) / 7.0;
    const auto mixed = chernoff_lemma_experiment(profile, 0.1, opt);
    CHECK(mixed.rate >= 0.9 - 3.0 * mixed.stderr_);
}
