#include "riskfloor/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "riskfloor/errors.hpp"
#include "riskfloor/specfun.hpp"

namespace riskfloor {

std::string_view to_string(LambdaMethod m) {
    switch (m) {
        case LambdaMethod::gaussian_closed_form: return "gaussian_closed_form";
        case LambdaMethod::mc_general: return "mc_general";
        case LambdaMethod::kl_chain: return "kl_chain";
        case LambdaMethod::transfer: return "transfer";
    }
    return "unknown";
}

namespace {

void require_gap(int n, int d) {
    if (n < 1 || d < n + 2) {
        std::ostringstream os;
        os << "corollary inapplicable: need d >= n + 2 (n=" << n << ", d=" << d << ")";
        throw DomainError(os.str());
    }
}

double clamp_unit(double v, const char* what) {
    if (!(v >= 0.0)) throw DomainError(std::string(what) + " must be nonnegative");
    return std::min(1.0, v);
}

}  // namespace

LambdaEstimate lambda_gaussian(int n, int d) {
    require_gap(n, d);
    LambdaEstimate out;
    out.method = LambdaMethod::gaussian_closed_form;
    out.value = clamp_unit(0.5 * std::sqrt(static_cast<double>(n) / static_cast<double>(d - n - 1)), "lambda");
    return out;
}

std::optional<double> log_det_gram(const Eigen::MatrixXd& A) {
    const Eigen::Index k = A.rows();
    if (k == 0) return 0.0;
    if (A.cols() < k) return std::nullopt;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A.transpose());
    const auto& R = qr.matrixQR();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) scale = std::max(scale, std::abs(R(i, i)));
    if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;
    const double floor = scale * static_cast<double>(A.cols()) * std::numeric_limits<double>::epsilon();
    double s = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double r = std::abs(R(i, i));
        if (!(r > floor)) return std::nullopt;
        s += 2.0 * std::log(r);
    }
    return s;
}

LambdaEstimate lambda_general_mc(const FeatureSampler& sampler, int n, int d, const Eigen::MatrixXd& omega,
                                 long trials, std::uint64_t seed, const ExecPolicy& policy, std::string omega_id) {
    if (n < 1 || d < n) throw DomainError("lambda_general_mc needs 1 <= n <= d");
    if (trials < 100) throw DomainError("lambda_general_mc needs at least 100 trials");
    if (omega.rows() != d || omega.cols() != d) throw DomainError("omega must be d x d");
    if (!omega.isApprox(omega.transpose(), 1e-12)) throw DomainError("omega must be symmetric");
    const Eigen::LLT<Eigen::MatrixXd> chol(omega);
    if (chol.info() != Eigen::Success) throw DomainError("omega must be positive definite");
    const Eigen::MatrixXd L = chol.matrixL();

    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    const auto log_h = map_trials<double>(static_cast<std::size_t>(trials), policy, [&](std::size_t i) {
        Rng rng(seed, i);
        const Eigen::MatrixXd X = sampler(n, rng);
        if (X.rows() != n || X.cols() != d) throw DomainError("sampler returned a matrix of the wrong shape");
        const auto ld = log_det_gram(X * L);
        return ld ? -0.5 * *ld : kNaN;
    });

    std::vector<double> kept;
    kept.reserve(log_h.size());
    for (double v : log_h) {
        if (std::isfinite(v)) kept.push_back(v);
    }
    const long rejected = trials - static_cast<long>(kept.size());
    if (static_cast<double>(rejected) > 0.01 * static_cast<double>(trials)) {
        std::ostringstream os;
        os << "lambda_general_mc: " << rejected << " of " << trials << " trials numerically singular";
        throw InconsistencyError(os.str());
    }

    // A_i = h_i / mean(h), evaluated relative to the largest log h.
    const double top = *std::max_element(kept.begin(), kept.end());
    const auto T = static_cast<double>(kept.size());
    std::vector<double> w(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) w[i] = std::exp(kept[i] - top);
    const double wbar = pairwise_sum(w) / T;
    std::vector<double> dev(w.size()), signed_a(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double a = w[i] / wbar;
        dev[i] = std::abs(a - 1.0);
        signed_a[i] = a > 1.0 ? a : (a < 1.0 ? -a : 0.0);
        w[i] = a;
    }
    const double est = 0.5 * pairwise_sum(dev) / T;
    const double c = pairwise_sum(signed_a) / T;

    // Delta-method influence of each trial, including the estimated mean.
    std::vector<double> psi(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) psi[i] = 0.5 * (dev[i] - c * (w[i] - 1.0));
    const double psi_bar = pairwise_sum(psi) / T;
    for (double& p : psi) p = (p - psi_bar) * (p - psi_bar);
    const double var = T > 1.0 ? pairwise_sum(psi) / (T - 1.0) : 0.0;

    LambdaEstimate out;
    out.method = LambdaMethod::mc_general;
    out.value = clamp_unit(est, "lambda estimate");
    out.mc_stderr = std::sqrt(var / T);
    out.omega_id = std::move(omega_id);
    out.rejected = rejected;
    out.trials = trials;
    return out;
}

WishartMoments wishart_logdet_moments(int n, int d) {
    require_gap(n, d);
    const double ln2 = std::numbers::ln2;
    WishartMoments out;
    for (int k = d - n + 1; k <= d; ++k) {
        const double half_k = 0.5 * k;
        out.log_E_invsqrtdet += -0.5 * ln2 + specfun::lgamma_value(0.5 * (k - 1)) - specfun::lgamma_value(half_k);
        out.E_logdet += ln2 + specfun::digamma_value(half_k);
    }
    out.chain = out.log_E_invsqrtdet + 0.5 * out.E_logdet;
    const double cap = static_cast<double>(n) / (2.0 * static_cast<double>(d - 1 - n));
    if (out.chain > cap + 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "wishart chain " << out.chain << " exceeds " << cap << " at n=" << n << ", d=" << d;
        throw InconsistencyError(os.str());
    }
    out.kl_chain_bound = std::sqrt(std::max(0.0, out.chain) / 2.0);
    return out;
}

LambdaEstimate lambda_kl_chain(int n, int d) {
    LambdaEstimate out;
    out.method = LambdaMethod::kl_chain;
    out.value = clamp_unit(wishart_logdet_moments(n, d).kl_chain_bound, "lambda");
    return out;
}

long transfer_sample_size(int n, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
    if (n < 1) throw DomainError("n must be positive");
    return static_cast<long>(std::ceil(2.0 * static_cast<double>(n) / epsilon));
}

TransferResult density_ratio_transfer(double lambda_base, int n, double epsilon) {
    TransferResult out;
    out.N = transfer_sample_size(n, epsilon);
    if (!(lambda_base >= 0.0 && lambda_base <= 1.0)) throw DomainError("lambda_base must lie in [0, 1]");
    out.estimate.method = LambdaMethod::transfer;
    out.estimate.value = std::min(1.0, lambda_base + std::exp(-0.25 * static_cast<double>(n)));
    return out;
}

double hardness_ceiling(double alpha, const LambdaEstimate& lambda) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    return std::min(1.0, alpha + clamp_unit(lambda.value, "lambda"));
}

double sample_resample_ceiling(double alpha, long n, long N) {
    if (n < 1 || N < n) throw DomainError("need 1 <= n <= N");
    const double nd = static_cast<double>(n);
    return alpha + nd * nd / (2.0 * static_cast<double>(N));
}

}  // namespace riskfloor
