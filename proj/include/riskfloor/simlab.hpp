#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riskfloor/core_bounds.hpp"
#include "riskfloor/dataset.hpp"
#include "riskfloor/evaluate.hpp"
#include "riskfloor/hardness.hpp"
#include "riskfloor/parallel.hpp"

namespace riskfloor {

enum class GeneratorKind { linear_gaussian, pwc_signal, multinomial_uniform, heavy_tail_linear };

std::string_view to_string(GeneratorKind k);
std::optional<GeneratorKind> parse_generator(std::string_view name);

/// A synthetic distribution P over (X, Y).
///
///   linear_gaussian    X ~ N(0, cov), Y = X'beta + sigma * N(0,1)
///   heavy_tail_linear  X ~ N(0, I),   Y = X'beta + sigma * t_nu / sd(t_nu)
///   pwc_signal         X ~ U[0,1]^d,  Y = levels[floor(m_true * X_1)] + sigma * N(0,1)
///   multinomial_uniform X_1 = J uniform on {0..M-1} (other columns 0), Y = atoms[J]
struct Generator {
    GeneratorKind kind = GeneratorKind::linear_gaussian;
    int d = 1;
    double sigma = 1.0;
    Eigen::VectorXd beta;              // linear kinds
    Eigen::MatrixXd cov;               // linear_gaussian; empty means identity
    std::vector<double> levels;        // pwc_signal, size m_true, equiprobable
    std::vector<double> atoms;         // multinomial_uniform, size M
    double tail_dof = 3.0;             // heavy_tail_linear, > 2

    static Generator linear_gaussian(int d, double sigma);
    static Generator linear_gaussian(Eigen::VectorXd beta, Eigen::MatrixXd cov, double sigma);
    static Generator heavy_tail_linear(int d, double sigma, double dof);
    /// levels 0, 1, ..., m_true - 1.
    static Generator pwc_signal(int d, int m_true, double sigma);
    static Generator pwc_signal(int d, std::vector<double> levels, double sigma);
    /// atoms[j] = j.
    static Generator multinomial_uniform(int d, long support);

    int m_true() const { return static_cast<int>(levels.size()); }
    long support() const { return static_cast<long>(atoms.size()); }

    /// Covariance of X when it is Gaussian (identity if cov is empty).
    Eigen::MatrixXd feature_covariance() const;

    /// Throws DomainError when the parameters are inconsistent.
    void validate() const;
};

/// n iid rows drawn from `rng`.
Dataset sample(const Generator& gen, int n, Rng& rng);
/// Same with a fresh engine seeded by `seed`.
Dataset sample(const Generator& gen, int n, std::uint64_t seed);

/// Feature part of `sample` as a standalone sampler.
FeatureSampler feature_sampler(const Generator& gen);

/// R_P(F). Throws UnknownTrueRisk when the pair has no closed form here.
double true_risk(const Generator& gen, const ModelClassSpec& cls);

/// Mean squared error of the optimal m-level quantizer of N(0,1)
/// (Lloyd-Max fixed point). m <= 64.
double gaussian_quantizer_mse(int m);

struct CoverageReport {
    std::string experiment;
    std::string generator;
    std::string cls;
    long n = 0;
    long m_or_d = 0;
    double alpha = 0.0;
    long trials = 0;
    long miscoverage_count = 0;
    double miscoverage_rate = 0.0;
    double stderr_ = 0.0;
    double true_risk = 0.0;
    long positive_count = 0;
    double positivity_rate = 0.0;
    long refusals = 0;             // trials where the bound refused (treated as 0)
    double ceiling = 0.0;          // rate must stay below ceiling + 3 stderr
    bool pass = false;
    std::string method;
};

/// rate / stderr from a count; pass = rate <= ceiling + 3 stderr.
void finalize_report(CoverageReport& r);

struct ExperimentOptions {
    long trials = 1000;
    std::uint64_t seed = 0;
    ExecPolicy policy = ExecPolicy::serial();
};

/// Fraction of fresh datasets where the bound exceeds the true risk.
CoverageReport coverage_experiment(const Generator& gen, const ModelClassSpec& cls, const BoundRequest& req, int n,
                                   const ExperimentOptions& opt);

/// Per trial: draw D_N, bound on the first n points, exceedance of the exact
/// ERM on all N points. Ceiling alpha + n^2 / 2N. A bound that refuses its
/// applicability condition counts as the vacuous bound 0.
CoverageReport sample_resample_experiment(const Generator& gen, const ModelClassSpec& cls, const BoundRequest& req,
                                          int n, long N, const ExperimentOptions& opt);

struct RateEstimate {
    long count = 0;
    long trials = 0;
    double rate = 0.0;
    double stderr_ = 0.0;

    static RateEstimate from_count(long count, long trials);
};

struct OccupancyReport {
    RateEstimate all_distinct;       // P(I = n)
    RateEstimate within_n_minus_r;   // P(I <= n - r)
    int r_used = 0;
    double distinct_ceiling = 0.0;   // exp(-n(n-1) / 2m)
};

/// n uniform draws over m cells; I = number of occupied cells.
OccupancyReport occupancy_experiment(std::int64_t m, int n, double alpha0, const ExperimentOptions& opt);

/// Frequency of (1 - D) S <= mu for S a sum of independent Bernoulli(means[i]),
/// D the root at log(1/alpha) / S (D = 1 when S = 0).
RateEstimate chernoff_lemma_experiment(const std::vector<double>& means, double alpha, const ExperimentOptions& opt);

struct InterpolationCapacity {
    std::optional<long> N_lower;       // nullopt means infinity
    std::optional<long> N_plus_lower;  // nullopt means infinity
    enum class Source { analytic, simulated } source = Source::analytic;
};

std::string_view to_string(InterpolationCapacity::Source s);

/// Analytic where known; otherwise the largest probe n (powers of two up to
/// max_n) at which every / some of `probe_trials` samples is interpolated.
InterpolationCapacity capacity_profile(const ModelClassSpec& cls, const Generator& gen, std::uint64_t seed = 0,
                                       int probe_trials = 200, long max_n = 4096);

}  // namespace riskfloor
