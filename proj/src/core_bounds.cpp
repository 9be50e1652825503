#include "riskfloor/core_bounds.hpp"

#include <cmath>
#include <limits>

#include "riskfloor/errors.hpp"

namespace riskfloor {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// t -> t - 1 + exp(-t), written to avoid cancellation near 0.
double lhs_log(double t) {
    if (t < 1e-4) {
        // t^2/2 - t^3/6 + t^4/24
        return t * t * (0.5 - t * (1.0 / 6.0 - t / 24.0));
    }
    return t + std::expm1(-t);
}

BoundResult chernoff_like(Method method, double alpha, int n, double B, double risk) {
    require_probability(alpha, "alpha");
    if (n < 1) throw DomainError("n must be positive");
    if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("loss bound B must be positive and finite");
    if (!(risk >= 0.0) || !std::isfinite(risk)) throw DomainError("empirical risk must be finite and nonnegative");
    if (risk > B) {
        throw InconsistencyError("empirical risk " + std::to_string(risk) + " exceeds the loss bound B = " +
                                 std::to_string(B));
    }
    BoundResult r;
    r.method = method;
    r.empirical_risk = risk;
    if (risk == 0.0) {
        r.delta = 1.0;
        r.value = 0.0;
        return r;
    }
    const double rhs = B * std::log(1.0 / alpha) / (static_cast<double>(n) * risk);
    // 1 - delta = exp(-t) keeps the factor accurate when delta is close to 1.
    const double t = solve_delta_log(rhs);
    r.delta = -std::expm1(-t);
    r.value = std::exp(-t) * risk;
    return r;
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::erm_markov: return "erm_markov";
        case Method::erm_chernoff: return "erm_chernoff";
        case Method::erm_trunc: return "erm_trunc";
        case Method::pwc_basic: return "pwc_basic";
        case Method::pwc_refined: return "pwc_refined";
        case Method::pwc_trunc: return "pwc_trunc";
        case Method::trivial_randomized: return "trivial_randomized";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    std::string key(name);
    for (char& c : key) {
        if (c == '-') c = '_';
    }
    for (Method m : {Method::erm_markov, Method::erm_chernoff, Method::erm_trunc, Method::pwc_basic,
                     Method::pwc_refined, Method::pwc_trunc, Method::trivial_randomized}) {
        if (key == to_string(m)) return m;
    }
    if (key == "trivial") return Method::trivial_randomized;
    return std::nullopt;
}

void require_probability(double p, const char* name) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(std::string(name) + " must lie strictly inside (0,1), got " + std::to_string(p));
    }
}

AlphaBudget AlphaBudget::even(double alpha) {
    require_probability(alpha, "alpha");
    return AlphaBudget(alpha, 0.5 * alpha, alpha - 0.5 * alpha);
}

AlphaBudget AlphaBudget::split(double alpha, double alpha0) {
    require_probability(alpha, "alpha");
    require_probability(alpha0, "alpha0");
    const double alpha1 = alpha - alpha0;
    if (!(alpha1 > 0.0)) throw DomainError("alpha0 must be smaller than alpha");
    return AlphaBudget(alpha, alpha0, alpha1);
}

LossSpec LossSpec::truncated(double B) {
    if (!(B > 0.0)) throw DomainError("truncation level B must be positive");
    return {LossKind::truncated_squared, B};
}

double delta_equation_lhs_log(double t) { return lhs_log(t); }

double solve_delta_log(double rhs) {
    if (std::isnan(rhs) || rhs < 0.0) throw DomainError("solve_delta: rhs must be nonnegative");
    if (rhs == 0.0) return 0.0;
    if (std::isinf(rhs)) return kInf;

    // lhs_log is increasing, t^2/2 - t^3/6 <= lhs <= t^2/2 and lhs >= t - 1,
    // so the root lies in [0, max(rhs + 1, sqrt(2 rhs))]. Expanding slightly
    // keeps the bracket strict.
    double lo = 0.0;
    double hi = std::max(rhs + 1.0, std::sqrt(2.0 * rhs)) * (1.0 + 1e-12) + 1e-300;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (lhs_log(mid) < rhs) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double t = 0.5 * (lo + hi);
    // One Newton polish; d/dt lhs = 1 - exp(-t).
    const double slope = -std::expm1(-t);
    if (slope > 0.0) {
        const double step = (lhs_log(t) - rhs) / slope;
        const double polished = t - step;
        if (polished >= lo && polished <= hi &&
            std::abs(lhs_log(polished) - rhs) <= std::abs(lhs_log(t) - rhs)) {
            t = polished;
        }
    }
    return t;
}

double solve_delta(double rhs) {
    const double t = solve_delta_log(rhs);
    if (std::isinf(t)) return 1.0;
    return -std::expm1(-t);
}

BoundResult bound_erm_markov(double alpha, double empirical_risk) {
    require_probability(alpha, "alpha");
    if (!(empirical_risk >= 0.0) || !std::isfinite(empirical_risk)) {
        throw DomainError("empirical risk must be finite and nonnegative");
    }
    BoundResult r;
    r.method = Method::erm_markov;
    r.empirical_risk = empirical_risk;
    r.value = alpha * empirical_risk;
    return r;
}

BoundResult bound_erm_chernoff(double alpha, int n, double B, double empirical_risk) {
    return chernoff_like(Method::erm_chernoff, alpha, n, B, empirical_risk);
}

BoundResult bound_erm_trunc(double alpha, int n, double B, double truncated_empirical_risk) {
    return chernoff_like(Method::erm_trunc, alpha, n, B, truncated_empirical_risk);
}

BoundResult trivial_randomized_bound(double alpha, Rng& rng) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
    BoundResult r;
    r.method = Method::trivial_randomized;
    r.value = rng.uniform() < alpha ? kInf : 0.0;
    return r;
}

}  // namespace riskfloor
