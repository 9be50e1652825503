// riskfloor command-line driver.
//
// Exit codes: 0 ok, 1 internal error, 2 bad input or config, 3 a bound's
// applicability condition refused, 4 an experiment cell failed, 5 selftest failed.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskfloor/core_bounds.hpp"
#include "riskfloor/dataset.hpp"
#include "riskfloor/errors.hpp"
#include "riskfloor/evaluate.hpp"
#include "riskfloor/hardness.hpp"
#include "riskfloor/report.hpp"
#include "riskfloor/selftest.hpp"
#include "riskfloor/simlab.hpp"

namespace rf = riskfloor;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kInput = 2, kRefused = 3, kCellFailed = 4, kSelftest = 5 };

struct Options {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "csv";
    std::string out_path;
    std::string summary_path;

    std::string data_path;
    std::string cls = "pwc";
    std::int64_t m = 1;
    int d = 2;
    std::vector<double> alphas{0.05};
    std::optional<double> alpha0;
    std::vector<std::string> methods;
    bool refined = false;
    std::optional<double> trunc_B;
    std::optional<double> loss_B;
    int restarts = 8;

    std::string gen = "linear_gaussian";
    double sigma = 1.0;
    int m_true = 4;
    long support = 100;
    double dof = 3.0;
    double rho = 0.0;
    std::vector<int> ns{100};
    std::vector<long> Ns{5000};
    long trials = 1000;

    std::string lambda_method = "gaussian";
    std::string omega = "identity";
    double epsilon = 1.0;
    std::optional<double> lambda_base;

    double inject_specfun_error = 0.0;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

rf::AlphaBudget budget_for(const Options& o, double alpha) {
    return o.alpha0 ? rf::AlphaBudget::split(alpha, *o.alpha0) : rf::AlphaBudget::even(alpha);
}

rf::ModelClassSpec class_for(const Options& o) {
    if (o.cls == "pwc") return rf::ModelClassSpec::pwc(o.m);
    if (o.cls == "linear") return rf::ModelClassSpec::linear(o.d);
    throw InputError("--class must be pwc or linear");
}

rf::Method method_named(const std::string& name) {
    const auto m = rf::parse_method(name);
    if (!m) throw InputError("unknown method '" + name + "'");
    return *m;
}

Eigen::MatrixXd ar1_covariance(int d, double rho) {
    Eigen::MatrixXd S(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) S(i, j) = std::pow(rho, std::abs(i - j));
    }
    return S;
}

rf::Generator generator_for(const Options& o) {
    const auto kind = rf::parse_generator(o.gen);
    if (!kind) throw InputError("unknown generator '" + o.gen + "'");
    switch (*kind) {
        case rf::GeneratorKind::linear_gaussian: {
            auto g = rf::Generator::linear_gaussian(o.d, o.sigma);
            if (o.rho != 0.0) g.cov = ar1_covariance(o.d, o.rho);
            g.validate();
            return g;
        }
        case rf::GeneratorKind::pwc_signal: return rf::Generator::pwc_signal(o.d, o.m_true, o.sigma);
        case rf::GeneratorKind::multinomial_uniform: return rf::Generator::multinomial_uniform(o.d, o.support);
        case rf::GeneratorKind::heavy_tail_linear: return rf::Generator::heavy_tail_linear(o.d, o.sigma, o.dof);
    }
    throw InputError("unknown generator");
}

rf::BoundRequest request_for(const Options& o, rf::Method method, double alpha) {
    rf::BoundRequest req;
    req.method = method;
    req.budget = budget_for(o, alpha);
    req.B = method == rf::Method::erm_chernoff ? o.loss_B : o.trunc_B;
    if (!req.B) req.B = o.trunc_B ? o.trunc_B : o.loss_B;
    req.restarts = o.restarts;
    return req;
}

rf::ExperimentOptions experiment_options(const Options& o) {
    rf::ExperimentOptions e;
    e.trials = o.trials;
    e.seed = o.seed;
    e.policy = o.threads == 1 ? rf::ExecPolicy::serial() : rf::ExecPolicy::parallel(o.threads);
    return e;
}

// Writes to --out, or stdout.
void emit(const Options& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) throw InputError("cannot open output file " + o.out_path);
    f << text;
}

int emit_cells(const Options& o, const std::vector<rf::CoverageReport>& cells) {
    if (o.format == "json") {
        emit(o, rf::cells_json(cells) + "\n");
    } else {
        std::ostringstream os;
        rf::write_cells_csv(os, cells);
        emit(o, os.str());
    }
    if (!o.summary_path.empty()) {
        std::ofstream f(o.summary_path, std::ios::binary);
        if (!f) throw InputError("cannot open summary file " + o.summary_path);
        f << rf::cells_json(cells) << "\n";
    }
    return rf::all_pass(cells) ? kOk : kCellFailed;
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

int run_bound(const Options& o) {
    if (o.data_path.empty()) throw InputError("bound needs --data");
    if (o.alphas.size() != 1) throw InputError("bound takes a single --alpha");
    const rf::Dataset data = rf::read_csv_file(o.data_path);
    auto cls = o.cls == "linear" ? rf::ModelClassSpec::linear(static_cast<int>(data.d())) : class_for(o);

    rf::Method method;
    if (!o.methods.empty()) {
        if (o.methods.size() != 1) throw InputError("bound takes a single --method");
        method = method_named(o.methods.front());
    } else if (cls.is_pwc()) {
        method = o.trunc_B ? rf::Method::pwc_trunc : (o.refined ? rf::Method::pwc_refined : rf::Method::pwc_basic);
    } else {
        method = o.trunc_B ? rf::Method::erm_trunc : rf::Method::erm_markov;
    }
    const double alpha = o.alphas.front();
    const auto req = request_for(o, method, alpha);
    rf::Rng rng(o.seed);
    const rf::BoundResult r = rf::evaluate_bound(data, cls, req, rng);

    json j{
        {"method", std::string(rf::to_string(r.method))},
        {"value", std::isfinite(r.value) ? json(r.value) : json("inf")},
        {"delta", optional_number(r.delta)},
        {"empirical_risk", r.empirical_risk},
        {"certified", r.certified},
        {"n", data.n()},
        {"d", data.d()},
        {"class", cls.name()},
        {"alpha", alpha},
    };
    if (cls.is_pwc()) {
        j["m"] = cls.m;
        j["alpha0"] = req.budget.alpha0();
        j["alpha1"] = req.budget.alpha1();
    }
    if (r.pieces) j["pieces"] = *r.pieces;
    if (r.occupancy_r) j["occupancy_r"] = *r.occupancy_r;
    if (r.ties_relaxed) j["ties_relaxed"] = true;
    if (!r.certified) {
        j["warning"] =
            "truncated linear ERM computed by a heuristic (upper estimate of the infimum); the value is not a certified "
            "lower bound";
    }
    emit(o, j.dump(2) + "\n");
    return kOk;
}

int run_coverage(const Options& o) {
    if (o.methods.empty()) throw InputError("coverage needs --method");
    const auto gen = generator_for(o);
    const auto cls = class_for(o);
    std::vector<rf::CoverageReport> cells;
    for (const auto& name : o.methods) {
        const auto method = method_named(name);
        for (double alpha : o.alphas) {
            for (int n : o.ns) {
                cells.push_back(rf::coverage_experiment(gen, cls, request_for(o, method, alpha), n,
                                                        experiment_options(o)));
            }
        }
    }
    return emit_cells(o, cells);
}

int run_hardness(const Options& o) {
    if (o.methods.empty()) throw InputError("hardness needs --method");
    const auto gen = generator_for(o);
    const auto cls = class_for(o);
    std::vector<rf::CoverageReport> cells;
    for (const auto& name : o.methods) {
        const auto method = method_named(name);
        for (double alpha : o.alphas) {
            for (int n : o.ns) {
                for (long N : o.Ns) {
                    cells.push_back(rf::sample_resample_experiment(gen, cls, request_for(o, method, alpha), n, N,
                                                                   experiment_options(o)));
                }
            }
        }
    }
    return emit_cells(o, cells);
}

int run_occupancy(const Options& o) {
    const double alpha0 = o.alpha0.value_or(o.alphas.front() / 2.0);
    std::vector<rf::CoverageReport> cells;
    for (int n : o.ns) {
        const auto rep = rf::occupancy_experiment(o.m, n, alpha0, experiment_options(o));
        rf::CoverageReport distinct;
        distinct.experiment = "occupancy_all_distinct";
        distinct.generator = "multinomial_uniform";
        distinct.cls = "pwc";
        distinct.method = "birthday";
        distinct.n = n;
        distinct.m_or_d = static_cast<long>(o.m);
        distinct.alpha = alpha0;
        distinct.trials = o.trials;
        distinct.true_risk = std::numeric_limits<double>::quiet_NaN();
        distinct.miscoverage_count = rep.all_distinct.count;
        distinct.ceiling = rep.distinct_ceiling;
        rf::finalize_report(distinct);

        rf::CoverageReport floor = distinct;
        floor.experiment = "occupancy_exceeds_n_minus_r";
        floor.method = "r=" + std::to_string(rep.r_used);
        floor.miscoverage_count = o.trials - rep.within_n_minus_r.count;
        floor.ceiling = alpha0;
        rf::finalize_report(floor);
        cells.push_back(distinct);
        cells.push_back(floor);
    }
    return emit_cells(o, cells);
}

json lambda_json(const rf::LambdaEstimate& l) {
    json j{{"value", l.value}, {"method", std::string(rf::to_string(l.method))}};
    j["mc_stderr"] = optional_number(l.mc_stderr);
    j["omega_id"] = l.omega_id ? json(*l.omega_id) : json(nullptr);
    if (l.method == rf::LambdaMethod::mc_general) {
        j["rejected"] = l.rejected;
        j["trials"] = l.trials;
    }
    return j;
}

int run_lambda(const Options& o) {
    if (o.ns.size() != 1) throw InputError("lambda takes a single --n");
    const int n = o.ns.front();
    const double alpha = o.alphas.front();
    json j;
    if (o.lambda_method == "gaussian") {
        j = lambda_json(rf::lambda_gaussian(n, o.d));
    } else if (o.lambda_method == "kl-chain" || o.lambda_method == "kl_chain") {
        const auto w = rf::wishart_logdet_moments(n, o.d);
        j = lambda_json(rf::lambda_kl_chain(n, o.d));
        j["log_E_invsqrtdet"] = w.log_E_invsqrtdet;
        j["E_logdet"] = w.E_logdet;
    } else if (o.lambda_method == "mc") {
        auto gen = generator_for(o);
        Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(o.d, o.d);
        if (o.omega == "inverse-cov" || o.omega == "inverse_cov") {
            omega = gen.feature_covariance().inverse();
            omega = 0.5 * (omega + omega.transpose());
        } else if (o.omega != "identity") {
            throw InputError("--omega must be identity or inverse-cov");
        }
        const auto policy = o.threads == 1 ? rf::ExecPolicy::serial() : rf::ExecPolicy::parallel(o.threads);
        j = lambda_json(rf::lambda_general_mc(rf::feature_sampler(gen), n, o.d, omega, o.trials, o.seed, policy,
                                              o.omega));
    } else if (o.lambda_method == "transfer") {
        if (!o.lambda_base) throw InputError("transfer needs --lambda-base");
        const auto t = rf::density_ratio_transfer(*o.lambda_base, n, o.epsilon);
        j = lambda_json(t.estimate);
        j["N"] = t.N;
    } else {
        throw InputError("--method must be gaussian, kl-chain, mc or transfer");
    }
    rf::LambdaEstimate l;
    l.value = j["value"].get<double>();
    j["n"] = n;
    j["d"] = o.d;
    j["alpha"] = alpha;
    j["ceiling"] = rf::hardness_ceiling(alpha, l);
    emit(o, j.dump(2) + "\n");
    return kOk;
}

int run_capacity(const Options& o) {
    const auto cap = rf::capacity_profile(class_for(o), generator_for(o), o.seed);
    auto opt = [](const std::optional<long>& v) { return v ? json(*v) : json("inf"); };
    json j{{"class", o.cls}, {"generator", o.gen}, {"N_lower", opt(cap.N_lower)},
           {"N_plus_lower", opt(cap.N_plus_lower)}, {"source", std::string(rf::to_string(cap.source))}};
    emit(o, j.dump(2) + "\n");
    return kOk;
}

int run_selftest(const Options& o) {
    rf::SelftestOptions opt;
    opt.specfun_perturbation = o.inject_specfun_error;
    const auto checks = rf::run_selftest(opt);
    std::ostringstream os;
    bool ok = true;
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.pass;
    }
    os << (ok ? "selftest: all checks passed\n" : "selftest: FAILED\n");
    emit(o, os.str());
    return ok ? kOk : kSelftest;
}

void add_experiment_flags(CLI::App* sub, Options& o) {
    sub->add_option("--gen", o.gen, "generator: linear_gaussian, pwc_signal, multinomial_uniform, heavy_tail_linear");
    sub->add_option("--class", o.cls, "model class: pwc or linear");
    sub->add_option("--m", o.m, "pwc class size");
    sub->add_option("--d", o.d, "feature dimension");
    sub->add_option("--n", o.ns, "sample sizes")->delimiter(',');
    sub->add_option("--alpha", o.alphas, "error levels")->delimiter(',');
    sub->add_option("--alpha0", o.alpha0, "occupancy share of alpha (default alpha/2)");
    sub->add_option("--method", o.methods, "bound methods")->delimiter(',');
    sub->add_option("--trials", o.trials, "Monte-Carlo trials");
    sub->add_option("--trunc-B", o.trunc_B, "truncation level");
    sub->add_option("--B", o.loss_B, "loss bound for erm-chernoff");
    sub->add_option("--restarts", o.restarts, "restarts of the truncated linear heuristic");
    sub->add_option("--sigma", o.sigma, "noise standard deviation");
    sub->add_option("--m-true", o.m_true, "pwc_signal levels");
    sub->add_option("--support", o.support, "multinomial_uniform support size");
    sub->add_option("--dof", o.dof, "heavy_tail_linear degrees of freedom");
    sub->add_option("--rho", o.rho, "AR(1) correlation of linear_gaussian features");
    sub->add_option("--summary", o.summary_path, "also write a JSON summary here");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"riskfloor: distribution-free lower bounds on model class risk"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value experiment config (sections named after subcommands)");
    Options o;
    app.add_option("--seed", o.seed, "master seed")->envname("RISKFLOOR_SEED");
    app.add_option("--threads", o.threads, "worker threads (0 = all cores, 1 = serial reference)");
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out_path, "output file (default stdout)");

    auto* bound = app.add_subcommand("bound", "lower bound on a CSV dataset");
    bound->add_option("--data", o.data_path, "CSV with header x1,...,xd,y");
    bound->add_option("--class", o.cls, "pwc or linear");
    bound->add_option("--m", o.m, "pwc class size");
    bound->add_option("--alpha", o.alphas, "error level");
    bound->add_option("--alpha0", o.alpha0, "occupancy share of alpha (default alpha/2)");
    bound->add_option("--method", o.methods, "override the default method");
    bound->add_flag("--refined", o.refined, "pwc: use the occupancy-refined bound");
    bound->add_option("--trunc-B", o.trunc_B, "truncation level");
    bound->add_option("--B", o.loss_B, "loss bound for erm-chernoff");
    bound->add_option("--restarts", o.restarts, "restarts of the truncated linear heuristic");

    auto* coverage = app.add_subcommand("coverage", "miscoverage of a bound against the true risk");
    add_experiment_flags(coverage, o);
    auto* hardness = app.add_subcommand("hardness", "sample-resample exceedance against alpha + n^2/2N");
    add_experiment_flags(hardness, o);
    hardness->add_option("--N", o.Ns, "pool sizes")->delimiter(',');
    auto* occupancy = app.add_subcommand("occupancy", "occupied-cell counts of uniform multinomial draws");
    add_experiment_flags(occupancy, o);
    auto* capacity = app.add_subcommand("capacity", "interpolation capacity of a class under a generator");
    add_experiment_flags(capacity, o);

    auto* lambda = app.add_subcommand("lambda", "linear-class hardness lambda_{n,d}");
    add_experiment_flags(lambda, o);
    lambda->remove_option(lambda->get_option("--method"));
    lambda->add_option("--method", o.lambda_method, "gaussian, kl-chain, mc or transfer");
    lambda->add_option("--omega", o.omega, "identity or inverse-cov");
    lambda->add_option("--epsilon", o.epsilon, "density-ratio epsilon");
    lambda->add_option("--lambda-base", o.lambda_base, "lambda at the transferred sample size");

    auto* selftest = app.add_subcommand("selftest", "brute-force oracle suite");
    selftest->add_option("--inject-specfun-error", o.inject_specfun_error)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }
    if (o.alphas.empty() || o.ns.empty()) {
        std::cerr << "error: --alpha and --n need at least one value\n";
        return kInput;
    }

    try {
        if (*bound) return run_bound(o);
        if (*coverage) return run_coverage(o);
        if (*hardness) return run_hardness(o);
        if (*occupancy) return run_occupancy(o);
        if (*lambda) return run_lambda(o);
        if (*capacity) return run_capacity(o);
        if (*selftest) return run_selftest(o);
    } catch (const rf::CsvError& e) {
        std::cerr << "error: malformed CSV at row " << e.row() << ": " << e.what() << "\n";
        return kInput;
    } catch (const rf::ConditionRefused& e) {
        std::cerr << "refused: " << e.what() << "\nadmissible: " << e.admissible() << "\n";
        return kRefused;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const rf::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const rf::UnknownTrueRisk& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
