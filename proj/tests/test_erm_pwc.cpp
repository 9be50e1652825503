#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "riskfloor/erm_pwc.hpp"
#include "riskfloor/errors.hpp"
#include "riskfloor/simlab.hpp"

using namespace riskfloor;

namespace {

Dataset make(std::vector<std::vector<double>> X, std::vector<double> Y) {
    Dataset d;
    d.X.resize(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(X[0].size()));
    d.Y.resize(static_cast<Eigen::Index>(Y.size()));
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < X[i].size(); ++j) d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = X[i][j];
        d.Y(static_cast<Eigen::Index>(i)) = Y[i];
    }
    return d;
}

Dataset distinct_x(std::vector<double> Y) {
    std::vector<std::vector<double>> X;
    for (std::size_t i = 0; i < Y.size(); ++i) X.push_back({static_cast<double>(i)});
    return make(X, Y);
}

WeightedInstance unit(std::vector<double> v) {
    WeightedInstance out;
    for (double x : v) out.push_back({x, 1.0, 0.0});
    return out;
}

std::vector<oracle::Pt> to_pts(const WeightedInstance& w) {
    std::vector<oracle::Pt> out;
    for (const auto& p : w) out.push_back({p.value, p.weight, p.offset});
    return out;
}

double recompute_cost(const WeightedInstance& pts, const KmeansSolution& s) {
    double c = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double e = pts[i].value - s.centers[static_cast<std::size_t>(s.assignment[i])];
        c += pts[i].weight * e * e + pts[i].offset;
    }
    return c;
}

}  // namespace

TEST_CASE("group_by_x examples") {
    const auto distinct = group_by_x(distinct_x({3, 1, 2}));
    CHECK(distinct.size() == 3);
    for (const auto& g : distinct) CHECK(g.offset == 0.0);

    const auto one = group_by_x(make({{7}, {7}}, {0, 2}));
    REQUIRE(one.size() == 1);
    CHECK(one[0].value == 1.0);
    CHECK(one[0].weight == 2.0);
    CHECK(one[0].offset == doctest::Approx(2.0));

    const auto two = group_by_x(make({{7, 1}, {7, 1}, {8, 1}}, {0, 2, 5}));
    REQUIRE(two.size() == 2);
    CHECK(two[0].value == 1.0);
    CHECK(two[0].weight == 2.0);
    CHECK(two[0].offset == doctest::Approx(2.0));
    CHECK(two[1].value == 5.0);
    CHECK(two[1].weight == 1.0);
    CHECK(two[1].offset == 0.0);
}

TEST_CASE("kmeans1d_exact examples") {
    CHECK(kmeans1d_exact(unit({0, 0, 1, 1}), 2).cost == 0.0);
    const auto one = kmeans1d_exact(unit({0, 0, 1, 1}), 1);
    CHECK(one.cost == doctest::Approx(1.0));
    CHECK(one.centers[0] == doctest::Approx(0.5));
    const auto two = kmeans1d_exact(unit({0, 1, 4}), 2);
    CHECK(two.cost == doctest::Approx(0.5));
    CHECK(two.centers == std::vector<double>{0.5, 4.0});
    CHECK(two.assignment == std::vector<int>{0, 0, 1});
}

TEST_CASE("kmeans1d_exact large k gives the offsets") {
    WeightedInstance w = {{1.0, 2.0, 0.5}, {3.0, 1.0, 0.25}};
    CHECK(kmeans1d_exact(w, 2).cost == doctest::Approx(0.75));
    CHECK(kmeans1d_exact(w, 9).cost == doctest::Approx(0.75));
}

TEST_CASE("kmeans1d_exact vs exhaustive enumeration, 500 instances") {
    Rng rng(31);
    for (int t = 0; t < 500; ++t) {
        const std::size_t L = 1 + rng.below(10);
        const int k = 1 + static_cast<int>(rng.below(4));
        WeightedInstance w(L);
        for (auto& p : w) {
            p.value = rng.bernoulli(0.3) ? std::round(rng.normal() * 2.0) : rng.normal() * 3.0;
            p.weight = rng.bernoulli(0.5) ? 1.0 : 0.5 + 3.0 * rng.uniform();
            p.offset = rng.bernoulli(0.3) ? rng.uniform() : 0.0;
        }
        const auto got = kmeans1d_exact(w, k);
        const double want = oracle::best_contiguous(to_pts(w), k, oracle::block_sq);
        CAPTURE(t);
        CHECK(got.cost == doctest::Approx(want).epsilon(1e-12).scale(1.0));
        CHECK(recompute_cost(w, got) == doctest::Approx(got.cost).epsilon(1e-12).scale(1.0));
        CHECK(std::is_sorted(got.centers.begin(), got.centers.end()));
        CHECK(static_cast<int>(got.centers.size()) <= k);
    }
}

TEST_CASE("assignment is contiguous in sorted order") {
    Rng rng(32);
    for (int t = 0; t < 100; ++t) {
        WeightedInstance w(30);
        for (auto& p : w) p.value = rng.normal();
        const auto s = kmeans1d_exact(w, 5);
        std::vector<std::size_t> idx(w.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return w[a].value < w[b].value; });
        for (std::size_t i = 1; i < idx.size(); ++i) CHECK(s.assignment[idx[i]] >= s.assignment[idx[i - 1]]);
    }
}

TEST_CASE("cost nonincreasing in k; k = #groups gives offsets") {
    Rng rng(33);
    for (int t = 0; t < 50; ++t) {
        const auto gen = Generator::multinomial_uniform(1, 6);
        auto data = sample(gen, 25, rng);
        for (Eigen::Index i = 0; i < data.n(); ++i) data.Y(i) += rng.normal();
        const auto groups = group_by_x(data);
        double offsets = 0.0;
        for (const auto& g : groups) offsets += g.offset;
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= static_cast<int>(groups.size()) + 2; ++k) {
            const double c = kmeans1d_exact(groups, k).cost;
            CHECK(c <= prev + 1e-12);
            prev = c;
        }
        CHECK(kmeans1d_exact(groups, static_cast<int>(groups.size())).cost == doctest::Approx(offsets));
    }
}

TEST_CASE("kmeans1d_exact_trunc examples") {
    const auto inactive = unit({0.0, 0.3, 1.0, 1.7, 2.0});
    for (int k = 1; k <= 3; ++k) {
        CHECK(kmeans1d_exact_trunc(inactive, k, 4.0).cost == doctest::Approx(kmeans1d_exact(inactive, k).cost));
    }
    // A center on either point leaves only the other one truncated.
    CHECK(kmeans1d_exact_trunc(unit({0.0, 10.0}), 1, 1.0).cost == doctest::Approx(1.0));
    CHECK(oracle::kmeans_trunc_grid(to_pts(unit({0.0, 10.0})), 1, 1.0) == doctest::Approx(1.0));
    const auto three = kmeans1d_exact_trunc(unit({0.0, 0.5, 10.0}), 1, 1.0);
    CHECK(three.cost == doctest::Approx(1.125));
    CHECK(three.centers[0] == doctest::Approx(0.25));
    CHECK(three.cost == doctest::Approx(oracle::kmeans_trunc_grid(to_pts(unit({0.0, 0.5, 10.0})), 1, 1.0)).epsilon(1e-6));
}

TEST_CASE("kmeans1d_exact_trunc vs center grid") {
    Rng rng(34);
    for (int t = 0; t < 150; ++t) {
        const std::size_t L = 1 + rng.below(8);
        const int k = 1 + static_cast<int>(rng.below(2));
        WeightedInstance w(L);
        for (auto& p : w) p.value = rng.normal() * 2.0;
        const double B = 0.1 + 3.0 * rng.uniform();
        const auto got = kmeans1d_exact_trunc(w, k, B);
        const double want = oracle::kmeans_trunc_grid(to_pts(w), k, B);
        CAPTURE(t);
        CHECK(std::abs(got.cost - want) <= 1e-6);
        double recomputed = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            const double e = w[i].value - got.centers[static_cast<std::size_t>(got.assignment[i])];
            recomputed += std::min(e * e, B);
        }
        CHECK(recomputed == doctest::Approx(got.cost).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("near-duplicate responses keep a positive ERM") {
    auto d = distinct_x({1.0, 1.0 + 1e-7, 2.0, 3.0, 4.0, 5.0});
    CHECK(pwc_empirical_risk(d, 5) == doctest::Approx(0.5e-14 / 6.0).epsilon(1e-6));
    CHECK(pwc_empirical_risk(d, 5) > 0.0);
}

TEST_CASE("occupancy_r examples") {
    CHECK(occupancy_r(20, 50, 0.025).r == 0);
    CHECK(occupancy_r(100, 10, 0.05).r == 52);
    CHECK(occupancy_r(100, 1'000'000'000'000LL, 0.05).r == 0);
    Rng rng(35);
    for (int t = 0; t < 500; ++t) {
        const int n = 1 + static_cast<int>(rng.below(400));
        const long m = 1 + static_cast<long>(rng.below(5000));
        const double a0 = 0.001 + 0.3 * rng.uniform();
        const auto p = occupancy_r(n, m, a0);
        CHECK(p.r == oracle::occupancy_r(n, m, a0));
        CHECK(p.r <= n);
        CHECK(p.r >= 0);
    }
}

TEST_CASE("pwc_basic admissibility") {
    CHECK(max_admissible_m(50, 0.025) == 332);
    Rng rng(36);
    const auto data = sample(Generator::pwc_signal(1, 4, 1.0), 50, rng);
    const auto budget = AlphaBudget::split(0.05, 0.025);
    CHECK_NOTHROW(bound_pwc_basic(data, 332, budget));
    try {
        bound_pwc_basic(data, 333, budget);
        FAIL("expected refusal");
    } catch (const ConditionRefused& e) {
        CHECK(e.admissible().find("332") != std::string::npos);
    }
}

TEST_CASE("pwc_basic values") {
    const auto budget = AlphaBudget::split(0.1, 0.05);
    const auto pos = bound_pwc_basic(distinct_x({0.1, 0.7, 0.2, 0.9, 0.4}), 2, budget);
    CHECK(pos.value > 0.0);
    CHECK(pos.certified);
    CHECK(*pos.pieces == 4);
    // pairs (0.1, 0.2) closest: n-1 clusters cost 0.005, divided by n = 5
    CHECK(pos.value == doctest::Approx(0.05 * 0.005 / 5.0));
    CHECK(bound_pwc_basic(distinct_x({0.1, 0.7, 0.1, 0.9, 0.4}), 2, budget).value == 0.0);
}

TEST_CASE("pwc_refined examples") {
    const auto budget = AlphaBudget::split(0.1, 0.05);
    Rng rng(37);
    Dataset data;
    data.X.resize(100, 1);
    data.Y.resize(100);
    for (int i = 0; i < 100; ++i) {
        data.X(i, 0) = i;
        data.Y(i) = rng.normal();
    }
    const auto r = bound_pwc_refined(data, 10, budget);
    CHECK(*r.occupancy_r == 52);
    CHECK(*r.pieces == 48);
    const double want = 0.05 * kmeans1d_exact(unit(std::vector<double>(data.Y.data(), data.Y.data() + 100)), 48).cost / 100.0;
    CHECK(r.value == doctest::Approx(want).epsilon(1e-12));

    // r = 0: n clusters interpolate
    CHECK(bound_pwc_refined(data, 1'000'000, budget).value == 0.0);
}

TEST_CASE("pwc_trunc") {
    Rng rng(38);
    const auto budget = AlphaBudget::split(0.1, 0.05);
    for (int t = 0; t < 30; ++t) {
        const auto data = sample(Generator::pwc_signal(1, 3, 1.0), 80, rng);
        const auto r = bound_pwc_trunc(data, 4, budget, 3.0);
        CHECK(r.value >= 0.0);
        CHECK(r.value >= r.empirical_risk - std::sqrt(2.0 * 9.0 * std::log(1.0 / 0.05) / 80.0) - 1e-12);
        CHECK(std::abs(r.value - (1.0 - *r.delta) * r.empirical_risk) <= 1e-15 * r.empirical_risk);

        // huge B: the truncation is inactive and the arithmetic is the Chernoff one
        const auto big = bound_pwc_trunc(data, 4, budget, 1e6);
        const double erm = pwc_empirical_risk(data, *big.pieces);
        CHECK(big.empirical_risk == doctest::Approx(erm).epsilon(1e-12));
        CHECK(big.value == doctest::Approx(bound_erm_chernoff(0.05, 80, 1e6, erm).value).epsilon(1e-12));
    }
    CHECK(bound_pwc_trunc(distinct_x({1, 2, 3}), 5, budget, 2.0).value == 0.0);
}

TEST_CASE("truncation with tied feature rows relaxes") {
    bool relaxed = false;
    const auto d = make({{1}, {1}, {2}}, {0.0, 5.0, 1.0});
    const double r = pwc_truncated_empirical_risk(d, 2, 1.0, &relaxed);
    CHECK(relaxed);
    CHECK(r <= std::min(pwc_empirical_risk(d, 2), 1.0) + 1e-12);
    bool clean = true;
    pwc_truncated_empirical_risk(distinct_x({0, 1, 2}), 2, 1.0, &clean);
    CHECK_FALSE(clean);
}
