#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "riskfloor/parallel.hpp"
#include "riskfloor/rng.hpp"

namespace riskfloor {

enum class LambdaMethod { gaussian_closed_form, mc_general, kl_chain, transfer };

std::string_view to_string(LambdaMethod m);

struct LambdaEstimate {
    double value = 0.0;                  // in [0, 1]
    LambdaMethod method = LambdaMethod::gaussian_closed_form;
    std::optional<double> mc_stderr;
    std::optional<std::string> omega_id;
    long rejected = 0;                   // singular Monte-Carlo trials
    long trials = 0;
};

/// Draws one n x d feature matrix (rows iid from P_X).
using FeatureSampler = std::function<Eigen::MatrixXd(int n, Rng& rng)>;

/// min(1, 0.5 sqrt(n / (d - n - 1))). Requires d >= n + 2.
LambdaEstimate lambda_gaussian(int n, int d);

/// Plug-in estimate of 0.5 E|h(X) / E h(X) - 1| with h(X) = det(X Omega X')^(-1/2).
/// log h is taken from a QR factorization of (X L)' where Omega = L L'.
/// Trial i uses stream derive_seed(seed, i). Singular trials are dropped and
/// counted; more than 1% of them is an error.
LambdaEstimate lambda_general_mc(const FeatureSampler& sampler, int n, int d, const Eigen::MatrixXd& omega,
                                 long trials, std::uint64_t seed,
                                 const ExecPolicy& policy = ExecPolicy::serial(),
                                 std::string omega_id = "identity");

/// log det(A A') for a k x p matrix A (k <= p) via Householder QR of A'.
/// Returns nullopt if A A' is numerically singular.
std::optional<double> log_det_gram(const Eigen::MatrixXd& A);

struct WishartMoments {
    double log_E_invsqrtdet = 0.0;  // log E[det(XX')^(-1/2)]
    double E_logdet = 0.0;          // E[log det(XX')]
    double chain = 0.0;             // log_E_invsqrtdet + E_logdet / 2
    double kl_chain_bound = 0.0;    // sqrt(chain / 2)
};

/// Moments of det(XX') for X an n x d standard Gaussian matrix. Requires d >= n + 2.
WishartMoments wishart_logdet_moments(int n, int d);

/// LambdaEstimate wrapping wishart_logdet_moments(n, d).kl_chain_bound.
LambdaEstimate lambda_kl_chain(int n, int d);

struct TransferResult {
    LambdaEstimate estimate;
    long N = 0;  // sample size at which lambda_base must have been computed
};

/// min(1, lambda_base + exp(-n/4)), with N = ceil(2n / epsilon).
TransferResult density_ratio_transfer(double lambda_base, int n, double epsilon);

/// Transfer sample size alone: ceil(2n / epsilon).
long transfer_sample_size(int n, double epsilon);

/// min(1, alpha + lambda). Ceiling on P(L > 0) for any valid linear-class lower bound.
double hardness_ceiling(double alpha, const LambdaEstimate& lambda);

/// alpha + n^2 / (2N). Not clamped.
double sample_resample_ceiling(double alpha, long n, long N);

}  // namespace riskfloor
