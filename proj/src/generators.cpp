#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "riskfloor/erm_pwc.hpp"
#include "riskfloor/errors.hpp"
#include "riskfloor/simlab.hpp"

namespace riskfloor {

std::string_view to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::linear_gaussian: return "linear_gaussian";
        case GeneratorKind::pwc_signal: return "pwc_signal";
        case GeneratorKind::multinomial_uniform: return "multinomial_uniform";
        case GeneratorKind::heavy_tail_linear: return "heavy_tail_linear";
    }
    return "unknown";
}

std::optional<GeneratorKind> parse_generator(std::string_view name) {
    std::string s(name);
    std::replace(s.begin(), s.end(), '-', '_');
    for (auto k : {GeneratorKind::linear_gaussian, GeneratorKind::pwc_signal, GeneratorKind::multinomial_uniform,
                   GeneratorKind::heavy_tail_linear}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

Generator Generator::linear_gaussian(int d, double sigma) {
    if (d < 1) throw DomainError("d must be positive");
    return linear_gaussian(Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))),
                           Eigen::MatrixXd(), sigma);
}

Generator Generator::linear_gaussian(Eigen::VectorXd beta, Eigen::MatrixXd cov, double sigma) {
    Generator g;
    g.kind = GeneratorKind::linear_gaussian;
    g.d = static_cast<int>(beta.size());
    g.beta = std::move(beta);
    g.cov = std::move(cov);
    g.sigma = sigma;
    g.validate();
    return g;
}

Generator Generator::heavy_tail_linear(int d, double sigma, double dof) {
    Generator g;
    g.kind = GeneratorKind::heavy_tail_linear;
    g.d = d;
    g.beta = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(std::max(d, 1))));
    g.sigma = sigma;
    g.tail_dof = dof;
    g.validate();
    return g;
}

Generator Generator::pwc_signal(int d, int m_true, double sigma) {
    if (m_true < 1) throw DomainError("m_true must be positive");
    std::vector<double> levels(static_cast<std::size_t>(m_true));
    for (int j = 0; j < m_true; ++j) levels[static_cast<std::size_t>(j)] = j;
    return pwc_signal(d, std::move(levels), sigma);
}

Generator Generator::pwc_signal(int d, std::vector<double> levels, double sigma) {
    Generator g;
    g.kind = GeneratorKind::pwc_signal;
    g.d = d;
    g.levels = std::move(levels);
    g.sigma = sigma;
    g.validate();
    return g;
}

Generator Generator::multinomial_uniform(int d, long support) {
    if (support < 1) throw DomainError("support must be positive");
    Generator g;
    g.kind = GeneratorKind::multinomial_uniform;
    g.d = d;
    g.sigma = 0.0;
    g.atoms.resize(static_cast<std::size_t>(support));
    for (long j = 0; j < support; ++j) g.atoms[static_cast<std::size_t>(j)] = static_cast<double>(j);
    g.validate();
    return g;
}

Eigen::MatrixXd Generator::feature_covariance() const {
    return cov.size() == 0 ? Eigen::MatrixXd::Identity(d, d) : cov;
}

void Generator::validate() const {
    if (d < 1) throw DomainError("generator dimension must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and nonnegative");
    switch (kind) {
        case GeneratorKind::linear_gaussian:
        case GeneratorKind::heavy_tail_linear:
            if (beta.size() != d) throw DomainError("beta length must equal d");
            if (!beta.allFinite()) throw DomainError("beta must be finite");
            if (cov.size() != 0) {
                if (cov.rows() != d || cov.cols() != d) throw DomainError("covariance must be d x d");
                if (Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success) {
                    throw DomainError("covariance must be positive definite");
                }
            }
            if (kind == GeneratorKind::heavy_tail_linear && !(tail_dof > 2.0)) {
                throw DomainError("heavy_tail_linear needs dof > 2");
            }
            break;
        case GeneratorKind::pwc_signal:
            if (levels.empty()) throw DomainError("pwc_signal needs at least one level");
            break;
        case GeneratorKind::multinomial_uniform:
            if (atoms.empty()) throw DomainError("multinomial_uniform needs at least one atom");
            break;
    }
}

namespace {

// Fills X row by row from rng; the draw order is part of the determinism contract.
Eigen::MatrixXd draw_features(const Generator& gen, int n, Rng& rng, std::vector<long>* cells) {
    Eigen::MatrixXd X(n, gen.d);
    switch (gen.kind) {
        case GeneratorKind::linear_gaussian:
        case GeneratorKind::heavy_tail_linear:
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < gen.d; ++j) X(i, j) = rng.normal();
            }
            if (gen.cov.size() != 0) {
                const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(gen.cov).matrixL();
                X = X * L.transpose();
            }
            break;
        case GeneratorKind::pwc_signal:
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < gen.d; ++j) X(i, j) = rng.uniform();
            }
            break;
        case GeneratorKind::multinomial_uniform:
            X.setZero();
            for (int i = 0; i < n; ++i) {
                const auto J = static_cast<long>(rng.below(static_cast<std::uint64_t>(gen.support())));
                X(i, 0) = static_cast<double>(J);
                if (cells) cells->push_back(J);
            }
            break;
    }
    return X;
}

}  // namespace

Dataset sample(const Generator& gen, int n, Rng& rng) {
    gen.validate();
    if (n < 1) throw DomainError("n must be positive");
    Dataset out;
    std::vector<long> cells;
    out.X = draw_features(gen, n, rng, &cells);
    out.Y.resize(n);
    switch (gen.kind) {
        case GeneratorKind::linear_gaussian:
            out.Y = out.X * gen.beta;
            for (int i = 0; i < n; ++i) out.Y(i) += gen.sigma * rng.normal();
            break;
        case GeneratorKind::heavy_tail_linear: {
            const double scale = std::sqrt((gen.tail_dof - 2.0) / gen.tail_dof);
            out.Y = out.X * gen.beta;
            for (int i = 0; i < n; ++i) out.Y(i) += gen.sigma * scale * rng.student_t(gen.tail_dof);
            break;
        }
        case GeneratorKind::pwc_signal: {
            const int m = gen.m_true();
            for (int i = 0; i < n; ++i) {
                const int level = std::min(m - 1, static_cast<int>(std::floor(out.X(i, 0) * m)));
                out.Y(i) = gen.levels[static_cast<std::size_t>(level)] + gen.sigma * rng.normal();
            }
            break;
        }
        case GeneratorKind::multinomial_uniform:
            for (int i = 0; i < n; ++i) out.Y(i) = gen.atoms[static_cast<std::size_t>(cells[static_cast<std::size_t>(i)])];
            break;
    }
    return out;
}

Dataset sample(const Generator& gen, int n, std::uint64_t seed) {
    Rng rng(seed);
    return sample(gen, n, rng);
}

FeatureSampler feature_sampler(const Generator& gen) {
    gen.validate();
    return [gen](int n, Rng& rng) { return draw_features(gen, n, rng, nullptr); };
}

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Population k-means cost of equiprobable support points.
double population_kmeans(const std::vector<double>& support, std::int64_t m) {
    WeightedInstance pts;
    const double w = 1.0 / static_cast<double>(support.size());
    for (double v : support) pts.push_back({v, w, 0.0});
    return kmeans1d_exact(pts, static_cast<int>(std::min<std::int64_t>(m, static_cast<std::int64_t>(pts.size())))).cost;
}

std::size_t distinct_count(const std::vector<double>& v) { return std::set<double>(v.begin(), v.end()).size(); }

}  // namespace

double gaussian_quantizer_mse(int m) {
    if (m < 1 || m > 64) throw DomainError("gaussian_quantizer_mse supports 1 <= m <= 64");
    if (m == 1) return 1.0;
    std::vector<double> c(static_cast<std::size_t>(m)), p(c.size());
    for (int j = 0; j < m; ++j) c[static_cast<std::size_t>(j)] = -3.0 + 6.0 * (j + 0.5) / m;
    const double inf = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 2000000; ++it) {
        double change = 0.0;
        double lo = -inf;
        for (int j = 0; j < m; ++j) {
            const auto J = static_cast<std::size_t>(j);
            const double hi = j + 1 < m ? 0.5 * (c[J] + c[J + 1]) : inf;
            const double mass = lo < 0.0 ? Phi(hi) - Phi(lo) : Phi(-lo) - Phi(-hi);
            const double next = (phi(lo) - phi(hi)) / mass;
            change = std::max(change, std::abs(next - c[J]));
            c[J] = next;
            p[J] = mass;
            lo = hi;
        }
        if (change < 1e-15) break;
    }
    double explained = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) explained += p[j] * c[j] * c[j];
    return std::max(0.0, 1.0 - explained);
}

double true_risk(const Generator& gen, const ModelClassSpec& cls) {
    gen.validate();
    const double noise = gen.sigma * gen.sigma;
    auto unknown = [&]() -> double {
        throw UnknownTrueRisk(std::string("no closed-form risk for ") + std::string(to_string(gen.kind)) + " vs " +
                              cls.name());
    };
    switch (gen.kind) {
        case GeneratorKind::linear_gaussian:
        case GeneratorKind::heavy_tail_linear: {
            if (!cls.is_pwc()) return cls.d == gen.d ? noise : unknown();
            const double s2 = gen.beta.dot(gen.feature_covariance() * gen.beta);
            if (s2 == 0.0) return noise;
            if (cls.m > 64) return unknown();
            return noise + s2 * gaussian_quantizer_mse(static_cast<int>(cls.m));
        }
        case GeneratorKind::pwc_signal:
            if (!cls.is_pwc()) return unknown();
            if (static_cast<std::size_t>(cls.m) >= distinct_count(gen.levels)) return noise;
            return noise + population_kmeans(gen.levels, cls.m);
        case GeneratorKind::multinomial_uniform:
            if (!cls.is_pwc()) return unknown();
            if (static_cast<std::size_t>(cls.m) >= distinct_count(gen.atoms)) return 0.0;
            return population_kmeans(gen.atoms, cls.m);
    }
    return unknown();
}

}  // namespace riskfloor
