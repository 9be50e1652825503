#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "riskfloor/erm_pwc.hpp"
#include "riskfloor/errors.hpp"
#include "riskfloor/simlab.hpp"

namespace riskfloor {

RateEstimate RateEstimate::from_count(long count, long trials) {
    RateEstimate r;
    r.count = count;
    r.trials = trials;
    r.rate = trials > 0 ? static_cast<double>(count) / static_cast<double>(trials) : 0.0;
    r.stderr_ = trials > 0 ? std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(trials)) : 0.0;
    return r;
}

void finalize_report(CoverageReport& r) {
    const auto rate = RateEstimate::from_count(r.miscoverage_count, r.trials);
    r.miscoverage_rate = rate.rate;
    r.stderr_ = rate.stderr_;
    r.positivity_rate = RateEstimate::from_count(r.positive_count, r.trials).rate;
    r.pass = r.miscoverage_rate <= r.ceiling + 3.0 * r.stderr_;
}

namespace {

struct TrialOutcome {
    bool exceeded = false;
    bool positive = false;
    bool refused = false;
};

void require_trials(long trials, long minimum, const char* what) {
    if (trials < minimum) {
        throw DomainError(std::string(what) + " needs at least " + std::to_string(minimum) + " trials");
    }
}

CoverageReport start_report(const char* experiment, const Generator& gen, const ModelClassSpec& cls,
                            const BoundRequest& req, int n, long trials) {
    CoverageReport r;
    r.experiment = experiment;
    r.generator = std::string(to_string(gen.kind));
    r.cls = cls.name();
    r.n = n;
    r.m_or_d = cls.size_param();
    r.alpha = req.budget.alpha();
    r.trials = trials;
    r.method = std::string(to_string(req.method));
    return r;
}

void tally(CoverageReport& r, const std::vector<TrialOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        r.miscoverage_count += o.exceeded;
        r.positive_count += o.positive;
        r.refusals += o.refused;
    }
    finalize_report(r);
}

}  // namespace

CoverageReport coverage_experiment(const Generator& gen, const ModelClassSpec& cls, const BoundRequest& req, int n,
                                   const ExperimentOptions& opt) {
    require_trials(opt.trials, 1000, "coverage_experiment");
    if (n < 1) throw DomainError("n must be positive");
    const double risk = true_risk(gen, cls);
    auto report = start_report("coverage", gen, cls, req, n, opt.trials);
    report.true_risk = risk;
    report.ceiling = req.budget.alpha();

    const auto outcomes = map_trials<TrialOutcome>(static_cast<std::size_t>(opt.trials), opt.policy, [&](std::size_t i) {
        Rng rng(opt.seed, i);
        const Dataset data = sample(gen, n, rng);
        const BoundResult b = evaluate_bound(data, cls, req, rng);
        return TrialOutcome{b.value > risk, b.value > 0.0, false};
    });
    tally(report, outcomes);
    return report;
}

CoverageReport sample_resample_experiment(const Generator& gen, const ModelClassSpec& cls, const BoundRequest& req,
                                          int n, long N, const ExperimentOptions& opt) {
    require_trials(opt.trials, 1000, "sample_resample_experiment");
    auto report = start_report("sample_resample", gen, cls, req, n, opt.trials);
    report.ceiling = sample_resample_ceiling(req.budget.alpha(), n, N);
    try {
        report.true_risk = true_risk(gen, cls);
    } catch (const UnknownTrueRisk&) {
        report.true_risk = std::numeric_limits<double>::quiet_NaN();
    }

    const auto outcomes = map_trials<TrialOutcome>(static_cast<std::size_t>(opt.trials), opt.policy, [&](std::size_t i) {
        Rng rng(opt.seed, i);
        const Dataset pool = sample(gen, static_cast<int>(N), rng);
        TrialOutcome o;
        double value = 0.0;
        try {
            value = evaluate_bound(pool.head(n), cls, req, rng).value;
        } catch (const ConditionRefused&) {
            o.refused = true;
        }
        o.positive = value > 0.0;
        o.exceeded = value > 0.0 && value > class_empirical_risk(pool, cls);
        return o;
    });
    tally(report, outcomes);
    return report;
}

OccupancyReport occupancy_experiment(std::int64_t m, int n, double alpha0, const ExperimentOptions& opt) {
    if (m < 1 || n < 1) throw DomainError("occupancy_experiment needs m >= 1 and n >= 1");
    require_trials(opt.trials, 1, "occupancy_experiment");
    OccupancyReport out;
    out.r_used = occupancy_r(n, m, alpha0).r;
    const double nd = static_cast<double>(n);
    out.distinct_ceiling = std::exp(-nd * (nd - 1.0) / (2.0 * static_cast<double>(m)));

    struct Hit {
        bool distinct = false;
        bool within = false;
    };
    const int limit = n - out.r_used;
    const auto hits = map_trials<Hit>(static_cast<std::size_t>(opt.trials), opt.policy, [&](std::size_t i) {
        Rng rng(opt.seed, i);
        std::vector<std::uint64_t> cells(static_cast<std::size_t>(n));
        for (auto& c : cells) c = rng.below(static_cast<std::uint64_t>(m));
        std::sort(cells.begin(), cells.end());
        const auto occupied = static_cast<int>(std::unique(cells.begin(), cells.end()) - cells.begin());
        return Hit{occupied == n, occupied <= limit};
    });
    long distinct = 0, within = 0;
    for (const auto& h : hits) {
        distinct += h.distinct;
        within += h.within;
    }
    out.all_distinct = RateEstimate::from_count(distinct, opt.trials);
    out.within_n_minus_r = RateEstimate::from_count(within, opt.trials);
    return out;
}

RateEstimate chernoff_lemma_experiment(const std::vector<double>& means, double alpha, const ExperimentOptions& opt) {
    require_trials(opt.trials, 1000, "chernoff_lemma_experiment");
    require_probability(alpha, "alpha");
    if (means.empty()) throw DomainError("mean profile must be nonempty");
    for (double p : means) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("means must lie in [0, 1]");
    }
    const double mu = pairwise_sum(means);
    const double log_inv_alpha = std::log(1.0 / alpha);

    const auto held = map_trials<char>(static_cast<std::size_t>(opt.trials), opt.policy, [&](std::size_t i) {
        Rng rng(opt.seed, i);
        long s = 0;
        for (double p : means) s += rng.bernoulli(p);
        if (s == 0) return char{1};
        const double S = static_cast<double>(s);
        const double t = solve_delta_log(log_inv_alpha / S);
        return static_cast<char>(std::exp(-t) * S <= mu);
    });
    long count = 0;
    for (char h : held) count += h;
    return RateEstimate::from_count(count, opt.trials);
}

std::string_view to_string(InterpolationCapacity::Source s) {
    return s == InterpolationCapacity::Source::analytic ? "analytic" : "simulated";
}

namespace {

bool continuous_features(const Generator& gen) { return gen.kind != GeneratorKind::multinomial_uniform; }

InterpolationCapacity analytic(std::optional<long> lower, std::optional<long> plus_lower) {
    InterpolationCapacity c;
    c.N_lower = lower;
    c.N_plus_lower = plus_lower;
    c.source = InterpolationCapacity::Source::analytic;
    return c;
}

}  // namespace

InterpolationCapacity capacity_profile(const ModelClassSpec& cls, const Generator& gen, std::uint64_t seed,
                                       int probe_trials, long max_n) {
    gen.validate();
    const bool noisy = gen.sigma > 0.0;
    if (cls.is_pwc()) {
        if (gen.kind == GeneratorKind::multinomial_uniform &&
            static_cast<std::size_t>(cls.m) >= std::set<double>(gen.atoms.begin(), gen.atoms.end()).size()) {
            return analytic(std::nullopt, std::nullopt);
        }
        if (continuous_features(gen) && noisy) return analytic(cls.m, cls.m);
    } else if (continuous_features(gen) && noisy && cls.d == gen.d) {
        return analytic(cls.d, cls.d);
    }

    InterpolationCapacity c;
    c.source = InterpolationCapacity::Source::simulated;
    c.N_lower = 0;
    c.N_plus_lower = 0;
    for (long n = 1; n <= max_n; n *= 2) {
        int zeros = 0;
        for (int t = 0; t < probe_trials; ++t) {
            Rng rng(seed, static_cast<std::uint64_t>(n) * 1000003ULL + static_cast<std::uint64_t>(t));
            const Dataset data = sample(gen, static_cast<int>(n), rng);
            const double scale = 1.0 + data.Y.squaredNorm() / static_cast<double>(n);
            zeros += class_empirical_risk(data, cls) <= 1e-12 * scale;
        }
        if (zeros == probe_trials) c.N_lower = n;
        if (zeros > 0) c.N_plus_lower = n;
        if (zeros == 0) break;
    }
    return c;
}

}  // namespace riskfloor
