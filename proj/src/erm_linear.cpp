#include "riskfloor/erm_linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskfloor/errors.hpp"
#include "riskfloor/rng.hpp"

namespace riskfloor {
namespace {

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> factor(const Eigen::MatrixXd& X) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.rows(), X.cols());
    qr.setThreshold(kRankTolerance);
    qr.compute(X);
    return qr;
}

double residual_sq_norm(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    if (X.rows() == 0) return 0.0;
    const auto qr = factor(X);
    const Eigen::Index rank = qr.rank();
    const Eigen::VectorXd qty = qr.householderQ().adjoint() * Y;
    return qty.tail(qty.size() - rank).squaredNorm();
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    if (X.rows() == 0) return Eigen::VectorXd::Zero(X.cols());
    return factor(X).solve(Y);
}

double truncated_objective(const Dataset& data, const Eigen::VectorXd& beta, double B) {
    const Eigen::VectorXd r = data.Y - data.X * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += std::min(r(i) * r(i), B);
    return s / static_cast<double>(data.n());
}

struct Fit {
    double value;
    Eigen::VectorXd beta;
};

Fit irls(const Dataset& data, Eigen::VectorXd beta, double B) {
    constexpr int kMaxIter = 100;
    double value = truncated_objective(data, beta, B);
    std::vector<Eigen::Index> active;
    for (int it = 0; it < kMaxIter; ++it) {
        const Eigen::VectorXd r = data.Y - data.X * beta;
        active.clear();
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (r(i) * r(i) < B) active.push_back(i);
        }
        Eigen::MatrixXd Xa(static_cast<Eigen::Index>(active.size()), data.d());
        Eigen::VectorXd Ya(static_cast<Eigen::Index>(active.size()));
        for (std::size_t t = 0; t < active.size(); ++t) {
            Xa.row(static_cast<Eigen::Index>(t)) = data.X.row(active[t]);
            Ya(static_cast<Eigen::Index>(t)) = data.Y(active[t]);
        }
        const Eigen::VectorXd next = least_squares(Xa, Ya);
        const double next_value = truncated_objective(data, next, B);
        if (!(next_value < value)) break;
        beta = next;
        value = next_value;
    }
    return {value, beta};
}

}  // namespace

Eigen::Index linear_rank(const Eigen::MatrixXd& X) { return factor(X).rank(); }

double linear_empirical_risk(const Dataset& data) {
    data.validate();
    return residual_sq_norm(data.X, data.Y) / static_cast<double>(data.n());
}

TruncatedLinearFit linear_trunc_risk_heuristic(const Dataset& data, double B, int restarts, std::uint64_t seed,
                                               const ExecPolicy& policy) {
    data.validate();
    if (!(B > 0.0)) throw DomainError("truncation level B must be positive");
    if (restarts < 1) throw DomainError("restarts must be at least 1");

    const Eigen::VectorXd ols = least_squares(data.X, data.Y);
    // Perturbation scale: a coefficient change that moves a typical
    // prediction by about sqrt(B).
    const double row_scale = std::sqrt(data.X.squaredNorm() / static_cast<double>(data.n()));
    const double scale = row_scale > 0.0 ? std::sqrt(B) / row_scale : 0.0;

    const auto fits = map_trials<Fit>(static_cast<std::size_t>(restarts), policy, [&](std::size_t i) {
        Eigen::VectorXd start = ols;
        if (i > 0) {
            Rng rng(seed, i);
            for (Eigen::Index j = 0; j < start.size(); ++j) start(j) += scale * rng.normal();
        }
        return irls(data, start, B);
    });

    TruncatedLinearFit out;
    out.value = std::numeric_limits<double>::infinity();
    for (const auto& f : fits) {  // first strict minimum, in restart order
        if (f.value < out.value) {
            out.value = f.value;
            out.beta = f.beta;
        }
    }
    out.restarts_run = restarts;
    out.certified = false;
    return out;
}

double C3Diagnostics::c_large_norm() const {
    return lambda0 > 0.0 ? 4.0 * gamma * lambda1 / (lambda0 * lambda0) : std::numeric_limits<double>::infinity();
}

double C3Diagnostics::c_small_norm() const {
    if (!(lambda0 > 0.0)) return std::numeric_limits<double>::infinity();
    const double r = 4.0 * std::sqrt(gamma) / lambda0;
    return 8.0 * (gamma + lambda1 * r * r);
}

double C3Diagnostics::truncated_risk_floor(double B) const {
    return residual_floor - std::max(c_large_norm(), c_small_norm()) / B;
}

C3Diagnostics check_condition_c3(const Dataset& data, int directions, std::uint64_t seed) {
    data.validate();
    if (directions < 1) throw DomainError("directions must be at least 1");
    const double n = static_cast<double>(data.n());
    C3Diagnostics out;
    out.gamma = data.Y.array().pow(4).sum() / n;
    out.residual_floor = linear_empirical_risk(data);

    const Eigen::MatrixXd gram = data.X.transpose() * data.X / n;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    out.lambda0 = std::max(0.0, eig.eigenvalues().minCoeff());

    auto fourth_moment = [&](const Eigen::VectorXd& b) { return (data.X * b).array().pow(4).sum() / n; };
    double best = 0.0;
    for (Eigen::Index j = 0; j < eig.eigenvectors().cols(); ++j) {
        best = std::max(best, fourth_moment(eig.eigenvectors().col(j).normalized()));
    }
    Rng rng(seed);
    Eigen::VectorXd b(data.d());
    for (int t = 0; t < directions; ++t) {
        for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = rng.normal();
        const double norm = b.norm();
        if (norm == 0.0) continue;
        best = std::max(best, fourth_moment(b / norm));
    }
    out.lambda1 = best;
    return out;
}

}  // namespace riskfloor
