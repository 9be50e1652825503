#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "riskfloor/rng.hpp"

namespace riskfloor {

enum class Method {
    erm_markov,
    erm_chernoff,
    erm_trunc,
    pwc_basic,
    pwc_refined,
    pwc_trunc,
    trivial_randomized,
};

std::string_view to_string(Method m);
/// Accepts both snake_case and kebab-case spellings ("pwc_basic", "pwc-basic").
std::optional<Method> parse_method(std::string_view name);

/// Split of the total error budget: alpha0 pays for the occupancy event,
/// alpha1 for the Markov/Chernoff step.
class AlphaBudget {
public:
    /// alpha0 = alpha1 = alpha / 2.
    static AlphaBudget even(double alpha);
    /// alpha1 = alpha - alpha0.
    static AlphaBudget split(double alpha, double alpha0);

    double alpha() const { return alpha_; }
    double alpha0() const { return alpha0_; }
    double alpha1() const { return alpha1_; }

private:
    AlphaBudget(double alpha, double alpha0, double alpha1)
        : alpha_(alpha), alpha0_(alpha0), alpha1_(alpha1) {}

    double alpha_;
    double alpha0_;
    double alpha1_;
};

enum class LossKind { squared, truncated_squared };

struct LossSpec {
    LossKind kind = LossKind::squared;
    std::optional<double> B;

    static LossSpec squared() { return {}; }
    static LossSpec truncated(double B);
};

struct BoundResult {
    double value = 0.0;                 // may be +inf (trivial_randomized only)
    std::optional<double> delta;        // Chernoff-type methods
    double empirical_risk = 0.0;        // the R-hat fed into the formula
    Method method = Method::erm_markov;
    bool certified = true;
    std::optional<int> pieces;          // pwc methods: k used for the ERM
    std::optional<int> occupancy_r;     // pwc refined/trunc
    bool ties_relaxed = false;          // pwc_trunc with duplicate feature rows
};

/// Root of -D - log(1 - D) = rhs on [0, 1]. rhs = +inf gives exactly 1.
double solve_delta(double rhs);

/// Same root, returned as t = -log(1 - D). Stays accurate when D is within
/// rounding of 1, where the D form cannot be evaluated.
double solve_delta_log(double rhs);

/// Forward map of solve_delta_log: t - (1 - exp(-t)).
double delta_equation_lhs_log(double t);

BoundResult bound_erm_markov(double alpha, double empirical_risk);

/// Requires the loss to lie in [0, B]; throws InconsistencyError when
/// empirical_risk > B.
BoundResult bound_erm_chernoff(double alpha, int n, double B, double empirical_risk);

/// Same arithmetic as bound_erm_chernoff on the truncated empirical risk.
BoundResult bound_erm_trunc(double alpha, int n, double B, double truncated_empirical_risk);

/// 0 with probability 1 - alpha, +inf with probability alpha. Accepts the
/// closed interval [0, 1] so the limits can be exercised.
BoundResult trivial_randomized_bound(double alpha, Rng& rng);

void require_probability(double p, const char* name);

}  // namespace riskfloor
