#pragma once

#include <cstdint>

#include "riskfloor/dataset.hpp"
#include "riskfloor/parallel.hpp"

namespace riskfloor {

// Relative pivot threshold of the rank-revealing QR (times the largest
// column norm).
inline constexpr double kRankTolerance = 1e-10;

/// (1/n) * ||Y - proj_{col(X)} Y||^2 via column-pivoted Householder QR.
/// Rank-deficient X is fine.
double linear_empirical_risk(const Dataset& data);

/// Rank of X as decided by the same factorization.
Eigen::Index linear_rank(const Eigen::MatrixXd& X);

struct TruncatedLinearFit {
    double value = 0.0;           // best truncated objective found
    Eigen::VectorXd beta;
    int restarts_run = 0;
    bool certified = false;       // always false: an upper estimate of the infimum
};

/// Iteratively reweighted least squares on (1/n) sum min{(y - x'b)^2, B}.
/// Points at or above the cap get weight 0. Restart 0 starts at the OLS fit;
/// restart i > 0 starts at OLS plus a Gaussian perturbation drawn from stream
/// derive_seed(seed, i). Restarts are independent and may run concurrently.
TruncatedLinearFit linear_trunc_risk_heuristic(const Dataset& data, double B, int restarts, std::uint64_t seed,
                                               const ExecPolicy& policy = ExecPolicy::serial());

struct C3Diagnostics {
    double gamma = 0.0;           // (1/n) sum Y^4
    double lambda0 = 0.0;         // min eigenvalue of (1/n) X'X
    double lambda1 = 0.0;         // max over probed unit b of (1/n) sum (x'b)^4; a LOWER estimate of the sup
    double residual_floor = 0.0;  // (1/n) ||P_perp Y||^2
    bool lambda1_is_lower_estimate = true;

    // Constants of the two cases in the truncated-risk argument:
    //   large ||beta||: 4 gamma lambda1 / lambda0^2
    //   small ||beta||: 8 (gamma + lambda1 (4 sqrt(gamma) / lambda0)^2)
    double c_large_norm() const;
    double c_small_norm() const;
    /// residual_floor - max(c_large, c_small) / B: the implied floor on the
    /// truncated empirical risk (using the estimated lambda1).
    double truncated_risk_floor(double B) const;
};

/// Probes the eigenvectors of the Gram matrix plus `directions` random unit
/// vectors for lambda1.
C3Diagnostics check_condition_c3(const Dataset& data, int directions, std::uint64_t seed);

}  // namespace riskfloor
