#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "riskfloor/core_bounds.hpp"
#include "riskfloor/dataset.hpp"
#include "riskfloor/rng.hpp"

namespace riskfloor {

struct ModelClassSpec {
    enum class Kind { pwc, linear };

    Kind kind = Kind::pwc;
    std::int64_t m = 1;  // pwc: maximal number of output values
    int d = 1;           // linear: feature dimension

    static ModelClassSpec pwc(std::int64_t m);
    static ModelClassSpec linear(int d);

    bool is_pwc() const { return kind == Kind::pwc; }
    std::string name() const;      // "pwc" or "linear"
    long size_param() const;       // m or d
};

struct BoundRequest {
    Method method = Method::erm_markov;
    AlphaBudget budget = AlphaBudget::even(0.05);
    std::optional<double> B;       // required by erm_chernoff, erm_trunc, pwc_trunc
    int restarts = 8;              // linear truncated heuristic
};

/// Exact squared-loss ERM of the class on the data.
double class_empirical_risk(const Dataset& data, const ModelClassSpec& cls);

/// Runs one bound. erm_* methods spend the whole budget alpha; pwc_* methods
/// split it into alpha0 / alpha1. The linear truncated ERM is heuristic, so
/// erm_trunc on the linear class comes back with certified = false.
/// `rng` feeds the trivial bound and the heuristic restarts.
BoundResult evaluate_bound(const Dataset& data, const ModelClassSpec& cls, const BoundRequest& req, Rng& rng);

}  // namespace riskfloor
