#include "riskfloor/evaluate.hpp"

#include <algorithm>

#include "riskfloor/erm_linear.hpp"
#include "riskfloor/erm_pwc.hpp"
#include "riskfloor/errors.hpp"

namespace riskfloor {

ModelClassSpec ModelClassSpec::pwc(std::int64_t m) {
    if (m < 1) throw DomainError("pwc class needs m >= 1");
    ModelClassSpec c;
    c.kind = Kind::pwc;
    c.m = m;
    return c;
}

ModelClassSpec ModelClassSpec::linear(int d) {
    if (d < 1) throw DomainError("linear class needs d >= 1");
    ModelClassSpec c;
    c.kind = Kind::linear;
    c.d = d;
    return c;
}

std::string ModelClassSpec::name() const { return is_pwc() ? "pwc" : "linear"; }

long ModelClassSpec::size_param() const { return is_pwc() ? static_cast<long>(m) : d; }

namespace {

int pieces_for(const Dataset& data, const ModelClassSpec& cls) {
    return static_cast<int>(std::min<std::int64_t>(cls.m, data.n()));
}

double require_B(const BoundRequest& req) {
    if (!req.B) throw DomainError(std::string(to_string(req.method)) + " needs a loss bound B");
    return *req.B;
}

void check_dimension(const Dataset& data, const ModelClassSpec& cls) {
    if (!cls.is_pwc() && data.d() != cls.d) throw DomainError("linear class dimension does not match the data");
}

}  // namespace

double class_empirical_risk(const Dataset& data, const ModelClassSpec& cls) {
    check_dimension(data, cls);
    return cls.is_pwc() ? pwc_empirical_risk(data, pieces_for(data, cls)) : linear_empirical_risk(data);
}

BoundResult evaluate_bound(const Dataset& data, const ModelClassSpec& cls, const BoundRequest& req, Rng& rng) {
    check_dimension(data, cls);
    const double alpha = req.budget.alpha();
    const int n = static_cast<int>(data.n());
    switch (req.method) {
        case Method::trivial_randomized:
            return trivial_randomized_bound(alpha, rng);
        case Method::erm_markov:
            return bound_erm_markov(alpha, class_empirical_risk(data, cls));
        case Method::erm_chernoff:
            return bound_erm_chernoff(alpha, n, require_B(req), class_empirical_risk(data, cls));
        case Method::erm_trunc: {
            const double B = require_B(req);
            if (cls.is_pwc()) {
                bool relaxed = false;
                const double risk = pwc_truncated_empirical_risk(data, pieces_for(data, cls), B, &relaxed);
                auto out = bound_erm_trunc(alpha, n, B, std::min(risk, B));
                out.ties_relaxed = relaxed;
                return out;
            }
            const auto fit = linear_trunc_risk_heuristic(data, B, req.restarts, rng.engine()());
            auto out = bound_erm_trunc(alpha, n, B, std::min(fit.value, B));
            out.certified = false;
            return out;
        }
        case Method::pwc_basic:
        case Method::pwc_refined:
        case Method::pwc_trunc:
            if (!cls.is_pwc()) {
                throw DomainError(std::string(to_string(req.method)) + " applies to the pwc class only");
            }
            if (req.method == Method::pwc_basic) return bound_pwc_basic(data, cls.m, req.budget);
            if (req.method == Method::pwc_refined) return bound_pwc_refined(data, cls.m, req.budget);
            return bound_pwc_trunc(data, cls.m, req.budget, require_B(req));
    }
    throw DomainError("unknown method");
}

}  // namespace riskfloor
