#pragma once

namespace riskfloor::specfun {

struct SpecFunResult {
    double value;
    double est_abs_error;
};

/// log Gamma(u) for u > 0. Lanczos (g = 7, 9 terms) on [0.5, inf), one step
/// of Gamma(u+1) = u Gamma(u) below 0.5.
SpecFunResult lgamma(double u);

/// psi(u) = d/du log Gamma(u) for u > 0, by upward recurrence to u >= 10 and
/// the asymptotic Bernoulli series.
SpecFunResult digamma(double u);

double lgamma_value(double u);
double digamma_value(double u);

}  // namespace riskfloor::specfun
