#include "riskfloor/selftest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "riskfloor/core_bounds.hpp"
#include "riskfloor/erm_linear.hpp"
#include "riskfloor/erm_pwc.hpp"
#include "riskfloor/rng.hpp"
#include "riskfloor/specfun.hpp"

namespace riskfloor {
namespace {

constexpr std::uint64_t kSeed = 20240601;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Loss of one contiguous block [a, b) of value-sorted points.
using BlockCost = double (*)(const WeightedInstance&, std::size_t, std::size_t, double);

double block_sse(const WeightedInstance& p, std::size_t a, std::size_t b, double) {
    double w = 0.0, s = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        w += p[i].weight;
        s += p[i].weight * p[i].value;
    }
    const double c = s / w;
    double cost = 0.0;
    for (std::size_t i = a; i < b; ++i) cost += p[i].weight * (p[i].value - c) * (p[i].value - c) + p[i].offset;
    return cost;
}

double block_trunc_grid(const WeightedInstance& p, std::size_t a, std::size_t b, double B) {
    double lo = p[a].value, hi = p[a].value;
    for (std::size_t i = a; i < b; ++i) {
        lo = std::min(lo, p[i].value);
        hi = std::max(hi, p[i].value);
    }
    constexpr int kSteps = 10000;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= kSteps; ++s) {
        const double c = lo + (hi - lo) * s / kSteps;
        double cost = 0.0;
        for (std::size_t i = a; i < b; ++i) cost += p[i].weight * std::min((p[i].value - c) * (p[i].value - c), B);
        best = std::min(best, cost);
    }
    return best;
}

// Minimum over all ways to cut the sorted points into at most k contiguous blocks.
double enumerate_partitions(const WeightedInstance& sorted, int k, BlockCost cost, double B) {
    const std::size_t L = sorted.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << (L - 1)); ++mask) {
        if (std::popcount(mask) + 1 > k) continue;
        double total = 0.0;
        std::size_t start = 0;
        for (std::size_t i = 1; i <= L; ++i) {
            if (i == L || (mask >> (i - 1) & 1u)) {
                total += cost(sorted, start, i, B);
                start = i;
            }
        }
        best = std::min(best, total);
    }
    return best;
}

WeightedInstance random_instance(Rng& rng, std::size_t L, bool weighted) {
    WeightedInstance p(L);
    for (auto& q : p) {
        q.value = std::round(rng.normal() * 4.0) / 4.0;
        if (weighted) {
            q.weight = 1.0 + static_cast<double>(rng.below(3));
            q.offset = 0.25 * static_cast<double>(rng.below(4));
        }
    }
    std::stable_sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    return p;
}

SelftestCheck check_kmeans() {
    Rng rng(kSeed, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = random_instance(rng, 1 + rng.below(8), true);
        const int k = 1 + static_cast<int>(rng.below(4));
        const double got = kmeans1d_exact(p, k).cost;
        const double want = enumerate_partitions(p, k, block_sse, 0.0);
        worst = std::max(worst, std::abs(got - want) / std::max(1.0, want));
    }
    return {"kmeans1d_exact vs partition enumeration", worst <= 1e-12, "max rel diff " + fmt(worst)};
}

SelftestCheck check_kmeans_trunc() {
    Rng rng(kSeed, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = random_instance(rng, 1 + rng.below(8), false);
        const int k = 1 + static_cast<int>(rng.below(2));
        const double B = 0.25 + 2.0 * rng.uniform();
        const double got = kmeans1d_exact_trunc(p, k, B).cost;
        const double want = enumerate_partitions(p, k, block_trunc_grid, B);
        worst = std::max(worst, std::abs(got - want));
    }
    return {"kmeans1d_exact_trunc vs center grid", worst <= 1e-6, "max abs diff " + fmt(worst)};
}

SelftestCheck check_root_solver() {
    Rng rng(kSeed, 3);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double rhs = 50.0 * rng.uniform();
        const double t = solve_delta_log(rhs);
        worst = std::max(worst, std::abs(delta_equation_lhs_log(t) - rhs) / std::max(1.0, rhs));
    }
    return {"solve_delta forward residual", worst <= 1e-12, "max residual " + fmt(worst)};
}

struct SpecRef {
    double u, lgamma, digamma;
};

SelftestCheck check_specfun(double perturbation) {
    static constexpr SpecRef refs[] = {
        {0.001, 6.9071788853838537, -1000.5755719318103},
        {0.1, 2.2527126517342060, -10.423754940411077},
        {0.5, 0.57236494292470009, -1.9635100260214235},
        {1.0, 0.0, -0.57721566490153286},
        {1.5, -0.12078223763524522, 0.036489973978576521},
        {2.5, 0.28468287047291916, 0.70315664064524319},
        {7.3, 7.1478925230222490, 1.9178203356379861},
        {10.0, 12.801827480081470, 2.2517525890667211},
        {33.3, 82.603723581654953, 3.4904672385202429},
        {1000.0, 5905.2204232091812, 6.9072551956488121},
    };
    double worst = 0.0;
    for (const auto& r : refs) {
        worst = std::max(worst, std::abs(specfun::lgamma_value(r.u) + perturbation - r.lgamma));
        worst = std::max(worst, std::abs(specfun::digamma_value(r.u) + perturbation - r.digamma));
    }
    return {"specfun reference values", worst <= 1e-10, "max abs diff " + fmt(worst)};
}

SelftestCheck check_digamma_recurrence(double perturbation) {
    Rng rng(kSeed, 4);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double u = 100.0 * (1.0 - rng.uniform());
        const double lhs = specfun::digamma_value(u + 1.0) - (specfun::digamma_value(u) + perturbation);
        worst = std::max(worst, std::abs(lhs - 1.0 / u));
    }
    return {"digamma recurrence", worst <= 1e-12, "max diff " + fmt(worst)};
}

double grid_linear_risk(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    const auto d = X.cols();
    auto risk = [&](const Eigen::VectorXd& b) { return (Y - X * b).squaredNorm() / static_cast<double>(Y.size()); };
    Eigen::VectorXd center = Eigen::VectorXd::Zero(d), best = center;
    double best_risk = risk(best);
    double half = 32.0;
    constexpr int kSide = 40;
    for (int zoom = 0; zoom < 60; ++zoom) {
        const double step = 2.0 * half / kSide;
        Eigen::VectorXd b(d);
        const int outer = d == 2 ? kSide : 0;
        for (int i = 0; i <= kSide; ++i) {
            for (int j = 0; j <= outer; ++j) {
                b(0) = center(0) - half + step * i;
                if (d == 2) b(1) = center(1) - half + step * j;
                const double r = risk(b);
                if (r < best_risk) {
                    best_risk = r;
                    best = b;
                }
            }
        }
        center = best;
        half *= 0.5;
    }
    return best_risk;
}

SelftestCheck check_linear() {
    Rng rng(kSeed, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(2));
        const int n = d + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(6 - d)));
        Dataset data;
        data.X.resize(n, d);
        data.Y.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) data.X(i, j) = rng.normal();
            data.Y(i) = rng.normal() + data.X(i, 0);
        }
        worst = std::max(worst, std::abs(linear_empirical_risk(data) - grid_linear_risk(data.X, data.Y)));
    }
    return {"linear ERM vs beta grid", worst <= 1e-6, "max abs diff " + fmt(worst)};
}

SelftestCheck check_occupancy() {
    const int r1 = occupancy_r(100, 10, 0.05).r;
    const int r2 = occupancy_r(20, 50, 0.025).r;
    const auto limit = max_admissible_m(50, 0.025);
    const bool ok = r1 == 52 && r2 == 0 && limit == 332;
    return {"occupancy r and admissible m", ok,
            "r(100,10)=" + std::to_string(r1) + " r(20,50)=" + std::to_string(r2) + " m_max(50)=" +
                std::to_string(limit)};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions& opt) {
    return {
        check_kmeans(),
        check_kmeans_trunc(),
        check_root_solver(),
        check_specfun(opt.specfun_perturbation),
        check_digamma_recurrence(opt.specfun_perturbation),
        check_linear(),
        check_occupancy(),
    };
}

}  // namespace riskfloor
