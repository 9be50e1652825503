#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "riskfloor/core_bounds.hpp"
#include "riskfloor/dataset.hpp"

namespace riskfloor {

// One group of samples sharing a feature row. Its squared loss around a
// common prediction c is weight * (c - value)^2 + offset.
struct WeightedPoint {
    double value = 0.0;
    double weight = 1.0;
    double offset = 0.0;
};

using WeightedInstance = std::vector<WeightedPoint>;

struct KmeansSolution {
    double cost = 0.0;                // total (unnormalized) loss
    std::vector<double> centers;      // sorted ascending
    std::vector<int> assignment;      // per instance point, index into centers
};

struct OccupancyParams {
    int r = 0;
    int n = 0;
    std::int64_t m = 0;
    double alpha0 = 0.0;
};

/// Merge rows with identical features. Output is ordered by feature row.
WeightedInstance group_by_x(const Dataset& data);

/// Variant for the truncated loss, which does not decompose around a group
/// mean. Groups whose responses all coincide stay merged (offset 0); other
/// groups are split into unit points, which drops the shared-prediction
/// constraint and can only lower the optimum. `relaxed` reports whether any
/// group was split.
WeightedInstance group_by_x_for_truncation(const Dataset& data, bool* relaxed = nullptr);

/// Globally optimal clustering of the instance into at most k groups under
/// weighted squared loss. Clusters are contiguous in sorted value order.
KmeansSolution kmeans1d_exact(std::span<const WeightedPoint> points, int k);

/// Same under per-point loss min{(y - c)^2, B}. Every point must have
/// offset 0 (see group_by_x_for_truncation).
KmeansSolution kmeans1d_exact_trunc(std::span<const WeightedPoint> points, int k, double B);

/// r = ceil( (t - 2 sqrt(t log(1/alpha0)))_+ ), t = n(n-1)/(n+2m).
OccupancyParams occupancy_r(int n, std::int64_t m, double alpha0);

/// Largest m with m <= n(n-1) / (2 log(1/alpha0)).
std::int64_t max_admissible_m(int n, double alpha0);

/// Empirical risk of the best function with at most k output values.
double pwc_empirical_risk(const Dataset& data, int k);

/// Truncated counterpart. Exact when feature rows are distinct; otherwise a
/// lower bound on the exact value (`relaxed` set).
double pwc_truncated_empirical_risk(const Dataset& data, int k, double B, bool* relaxed = nullptr);

/// alpha1 * R-hat(F_pwc^(n-1)). Throws ConditionRefused when m exceeds
/// max_admissible_m(n, alpha0).
BoundResult bound_pwc_basic(const Dataset& data, std::int64_t m, const AlphaBudget& budget);

/// alpha1 * R-hat(F_pwc^(n-r)) with r from occupancy_r. Valid for every m.
BoundResult bound_pwc_refined(const Dataset& data, std::int64_t m, const AlphaBudget& budget);

/// (1 - Delta) * R-hat(F_pwc^(n-r); B) with Delta solved at alpha1.
BoundResult bound_pwc_trunc(const Dataset& data, std::int64_t m, const AlphaBudget& budget, double B);

}  // namespace riskfloor
