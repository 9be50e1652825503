#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "riskfloor/erm_linear.hpp"
#include "riskfloor/errors.hpp"
#include "riskfloor/simlab.hpp"

using namespace riskfloor;

TEST_CASE("linear_empirical_risk examples") {
    Rng rng(41);
    Dataset sq;
    sq.X = Eigen::MatrixXd::Random(4, 4);
    sq.Y = Eigen::VectorXd::Random(4);
    CHECK(linear_empirical_risk(sq) == doctest::Approx(0.0).scale(1e-12));

    Dataset ones;
    ones.X = Eigen::MatrixXd::Ones(2, 1);
    ones.Y = Eigen::Vector2d(1.0, 3.0);
    CHECK(linear_empirical_risk(ones) == doctest::Approx(1.0).epsilon(1e-14));

    Dataset zero;
    zero.X = Eigen::MatrixXd::Zero(5, 3);
    zero.Y = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
    CHECK(linear_empirical_risk(zero) == doctest::Approx(zero.Y.squaredNorm() / 5.0));

    Dataset bad = ones;
    bad.Y(0) = std::nan("");
    CHECK_THROWS_AS(linear_empirical_risk(bad), DomainError);
}

TEST_CASE("rank deficient design") {
    Rng rng(42);
    Dataset d;
    d.X.resize(30, 3);
    d.Y.resize(30);
    for (int i = 0; i < 30; ++i) {
        d.X(i, 0) = rng.normal();
        d.X(i, 1) = 2.0 * d.X(i, 0);
        d.X(i, 2) = rng.normal();
        d.Y(i) = rng.normal();
    }
    Dataset reduced;
    reduced.X = d.X(Eigen::all, std::vector<int>{0, 2});
    reduced.Y = d.Y;
    CHECK(linear_rank(d.X) == 2);
    CHECK(linear_empirical_risk(d) == doctest::Approx(linear_empirical_risk(reduced)).epsilon(1e-12));
}

TEST_CASE("invariance under invertible column maps") {
    Rng rng(43);
    for (int t = 0; t < 50; ++t) {
        const int d = 1 + static_cast<int>(rng.below(6));
        const int n = d + 1 + static_cast<int>(rng.below(40));
        const auto data = sample(Generator::linear_gaussian(d, 0.8), n, rng);
        Eigen::MatrixXd A(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
        }
        A += 3.0 * Eigen::MatrixXd::Identity(d, d);
        Dataset mapped{data.X * A, data.Y};
        CHECK(linear_empirical_risk(mapped) == doctest::Approx(linear_empirical_risk(data)).epsilon(1e-9));
    }
}

TEST_CASE("linear ERM vs beta grid, d <= 2, n <= 6") {
    Rng rng(44);
    for (int t = 0; t < 60; ++t) {
        const int d = 1 + static_cast<int>(rng.below(2));
        const int n = d + static_cast<int>(rng.below(static_cast<std::uint64_t>(7 - d)));
        Dataset data;
        data.X.resize(n, d);
        data.Y.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) data.X(i, j) = rng.normal();
            data.Y(i) = 2.0 * rng.normal();
        }
        CHECK(std::abs(linear_empirical_risk(data) - oracle::linear_grid(data.X, data.Y)) <= 1e-6);
    }
}

TEST_CASE("truncated heuristic") {
    Rng rng(45);
    const auto data = sample(Generator::linear_gaussian(3, 1.0), 200, rng);
    const double erm = linear_empirical_risk(data);

    // B above every squared residual of the OLS fit
    const auto big = linear_trunc_risk_heuristic(data, 1e6, 4, 7);
    CHECK(big.value == doctest::Approx(erm).epsilon(1e-12));
    CHECK_FALSE(big.certified);

    for (double B : {0.5, 2.0, 8.0}) {
        const auto fit = linear_trunc_risk_heuristic(data, B, 6, 8);
        CHECK(fit.value <= std::min(erm, B) + 1e-12);
        CHECK_FALSE(fit.certified);
    }
    CHECK_THROWS_AS(linear_trunc_risk_heuristic(data, 1.0, 0, 1), DomainError);
}

TEST_CASE("truncated heuristic: thread count does not change the result") {
    Rng rng(46);
    auto data = sample(Generator::heavy_tail_linear(4, 1.0, 2.5), 300, rng);
    const auto a = linear_trunc_risk_heuristic(data, 2.0, 16, 9, ExecPolicy::serial());
    const auto b = linear_trunc_risk_heuristic(data, 2.0, 16, 9, ExecPolicy::parallel(4));
    CHECK(a.value == b.value);
    CHECK(a.beta == b.beta);
}

TEST_CASE("truncated heuristic on Gaussian data tracks the residual variance") {
    Rng rng(47);
    const auto data = sample(Generator::linear_gaussian(5, 1.0), 2000, rng);
    const double resid = linear_empirical_risk(data);
    const auto fit = linear_trunc_risk_heuristic(data, 20.0, 4, 3);
    const double target = (1.0 - 5.0 / 2000.0) * resid;
    CHECK(fit.value >= 0.9 * target);
    CHECK(fit.value <= 1.1 * target);
}

TEST_CASE("check_condition_c3") {
    // orthonormal columns scaled so that X'X / n = I
    Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(40, 3)).householderQ();
    Dataset d{Q.leftCols(3) * std::sqrt(40.0), Eigen::VectorXd::Zero(40)};
    const auto c = check_condition_c3(d, 50, 1);
    CHECK(c.lambda0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.gamma == 0.0);
    CHECK(c.lambda1_is_lower_estimate);

    Rng rng(48);
    const auto g = sample(Generator::linear_gaussian(5, 1.0), 5000, rng);
    const auto cg = check_condition_c3(g, 200, 2);
    CHECK(cg.lambda0 >= 0.8);
    CHECK(cg.lambda0 <= 1.2);
    CHECK(cg.gamma == doctest::Approx(g.Y.array().pow(4).mean()).epsilon(1e-12));
    CHECK(cg.residual_floor == doctest::Approx(linear_empirical_risk(g)).epsilon(1e-12));
    CHECK(cg.c_large_norm() > 0.0);
    CHECK(cg.truncated_risk_floor(1e12) == doctest::Approx(cg.residual_floor).epsilon(1e-6));
}

TEST_CASE("C3 directional moments dominate the squared Gram eigenvalue (property)") {
    Rng rng(49);
    for (int t = 0; t < 40; ++t) {
        const int d = 1 + static_cast<int>(rng.below(5));
        const auto data = sample(Generator::heavy_tail_linear(d, 1.0, 3.0), 30 + static_cast<int>(rng.below(100)), rng);
        const auto c = check_condition_c3(data, 5, static_cast<std::uint64_t>(t));
        CHECK(c.lambda0 * c.lambda0 <= c.lambda1 * (1.0 + 1e-12));
    }
}
