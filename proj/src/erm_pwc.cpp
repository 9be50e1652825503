#include "riskfloor/erm_pwc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "riskfloor/errors.hpp"

namespace riskfloor {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Points sorted by value, with prefix sums over centered values so that the
// segment SSE S2 - S1^2/W loses as little as possible to cancellation.
class SortedInstance {
public:
    explicit SortedInstance(std::span<const WeightedPoint> points) : order_(points.size()) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return points[a].value < points[b].value; });
        const std::size_t L = points.size();
        value_.resize(L);
        weight_.resize(L);
        double wsum = 0.0, vsum = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            const auto& p = points[order_[i]];
            if (!(p.weight > 0.0) || !std::isfinite(p.weight) || !std::isfinite(p.value) || !(p.offset >= 0.0)) {
                throw DomainError("weighted instance needs positive weights, finite values, nonnegative offsets");
            }
            value_[i] = p.value;
            weight_[i] = p.weight;
            wsum += p.weight;
            vsum += p.weight * p.value;
            offsets_ += p.offset;
        }
        center_ = wsum > 0.0 ? vsum / wsum : 0.0;
        w_.assign(L + 1, 0.0);
        s1_.assign(L + 1, 0.0);
        s2_.assign(L + 1, 0.0);
        noise_ = 8.0 * static_cast<double>(L + 1) * std::numeric_limits<double>::epsilon();
        for (std::size_t i = 0; i < L; ++i) {
            const double v = value_[i] - center_;
            w_[i + 1] = w_[i] + weight_[i];
            s1_[i + 1] = s1_[i] + weight_[i] * v;
            s2_[i + 1] = s2_[i] + weight_[i] * v * v;
        }
    }

    std::size_t size() const { return value_.size(); }
    double offsets() const { return offsets_; }
    double value(std::size_t i) const { return value_[i]; }
    double weight(std::size_t i) const { return weight_[i]; }
    std::size_t original(std::size_t i) const { return order_[i]; }

    // Weighted SSE of sorted positions [i, j) around their weighted mean.
    double sse(std::size_t i, std::size_t j) const {
        if (j - i <= 1 || value_[i] == value_[j - 1]) return 0.0;
        if (j - i == 2) {
            const double gap = value_[i + 1] - value_[i];
            return weight_[i] * weight_[i + 1] / (weight_[i] + weight_[i + 1]) * gap * gap;
        }
        const double W = w_[j] - w_[i];
        const double S1 = s1_[j] - s1_[i];
        const double S2 = s2_[j] - s2_[i];
        const double fast = S2 - S1 * S1 / W;
        // Below the rounding noise of the prefix sums: redo it in two passes.
        if (fast > noise_ * (s2_[j] + s2_[i])) return fast;
        return direct_sse(i, j);
    }

    double mean(std::size_t i, std::size_t j) const {
        if (value_[i] == value_[j - 1]) return value_[i];
        return center_ + (s1_[j] - s1_[i]) / (w_[j] - w_[i]);
    }

private:
    double direct_sse(std::size_t i, std::size_t j) const {
        double W = 0.0, S = 0.0;
        for (std::size_t t = i; t < j; ++t) {
            W += weight_[t];
            S += weight_[t] * (value_[t] - value_[i]);
        }
        const double mean = S / W;
        double out = 0.0;
        for (std::size_t t = i; t < j; ++t) {
            const double e = value_[t] - value_[i] - mean;
            out += weight_[t] * e * e;
        }
        return out;
    }

    std::vector<std::size_t> order_;
    std::vector<double> value_, weight_;
    std::vector<double> w_, s1_, s2_;
    double offsets_ = 0.0;
    double center_ = 0.0;
    double noise_ = 0.0;
};

struct Partition {
    double cost = 0.0;
    std::vector<std::size_t> bounds;  // cluster c covers [bounds[c], bounds[c+1])
};

// Exact interval DP over contiguous partitions into exactly k nonempty
// segments. With L points and k segments no segment is longer than
// L - k + 1, which bounds the inner loop.
template <class SegCost>
Partition partition_dp(std::size_t L, std::size_t k, SegCost&& seg) {
    const std::size_t width = L - k + 1;
    std::vector<double> prev(L + 1, kInf), cur(L + 1, kInf);
    std::vector<std::uint32_t> parent(k * (L + 1), 0);

    for (std::size_t j = 1; j <= width; ++j) prev[j] = seg(0, j);
    for (std::size_t c = 2; c <= k; ++c) {
        std::fill(cur.begin(), cur.end(), kInf);
        const std::size_t jmax = L - (k - c);
        for (std::size_t j = c; j <= jmax; ++j) {
            const std::size_t ilo = std::max(c - 1, j > width ? j - width : std::size_t{0});
            double best = kInf;
            std::size_t arg = ilo;
            for (std::size_t i = ilo; i < j; ++i) {
                if (prev[i] == kInf) continue;
                const double v = prev[i] + seg(i, j);
                if (v < best) {
                    best = v;
                    arg = i;
                }
            }
            cur[j] = best;
            parent[(c - 1) * (L + 1) + j] = static_cast<std::uint32_t>(arg);
        }
        std::swap(prev, cur);
    }

    Partition p;
    p.cost = prev[L];
    p.bounds.assign(k + 1, 0);
    p.bounds[k] = L;
    std::size_t j = L;
    for (std::size_t c = k; c >= 2; --c) {
        j = parent[(c - 1) * (L + 1) + j];
        p.bounds[c - 1] = j;
    }
    p.bounds[0] = 0;
    return p;
}

KmeansSolution assemble(const SortedInstance& s, const Partition& part,
                        const std::vector<double>& centers, double cost) {
    KmeansSolution sol;
    sol.cost = cost;
    sol.centers = centers;
    sol.assignment.assign(s.size(), 0);
    for (std::size_t c = 0; c + 1 < part.bounds.size(); ++c) {
        for (std::size_t i = part.bounds[c]; i < part.bounds[c + 1]; ++i) {
            sol.assignment[s.original(i)] = static_cast<int>(c);
        }
    }
    return sol;
}

KmeansSolution singletons(const SortedInstance& s, double cost) {
    Partition part;
    part.bounds.resize(s.size() + 1);
    std::iota(part.bounds.begin(), part.bounds.end(), std::size_t{0});
    std::vector<double> centers(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) centers[i] = s.value(i);
    return assemble(s, part, centers, cost);
}

void require_k(int k, std::size_t L) {
    if (k < 1) throw DomainError("number of clusters k must be at least 1");
    if (L == 0) throw DomainError("instance is empty");
}

bool lexicographic_less(const Eigen::MatrixXd& X, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (X(a, j) < X(b, j)) return true;
        if (X(b, j) < X(a, j)) return false;
    }
    return false;
}

bool same_row(const Eigen::MatrixXd& X, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (X(a, j) != X(b, j)) return false;
    }
    return true;
}

// Calls fn(begin, end) for every run of identical feature rows in `order`.
template <class Fn>
void for_each_group(const Dataset& data, Fn&& fn) {
    data.validate();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.n()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return lexicographic_less(data.X, a, b); });
    std::size_t start = 0;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i == order.size() || !same_row(data.X, order[start], order[i])) {
            fn(std::span<const Eigen::Index>(order).subspan(start, i - start));
            start = i;
        }
    }
}

int checked_n(const Dataset& data) {
    data.validate();
    if (data.n() > std::numeric_limits<int>::max()) throw DomainError("dataset too large");
    return static_cast<int>(data.n());
}

}  // namespace

WeightedInstance group_by_x(const Dataset& data) {
    WeightedInstance out;
    for_each_group(data, [&](std::span<const Eigen::Index> rows) {
        if (rows.size() == 1) {
            out.push_back({data.Y(rows[0]), 1.0, 0.0});
            return;
        }
        double sum = 0.0;
        for (auto r : rows) sum += data.Y(r);
        const double w = static_cast<double>(rows.size());
        const double mean = sum / w;
        double offset = 0.0;
        for (auto r : rows) offset += (data.Y(r) - mean) * (data.Y(r) - mean);
        out.push_back({mean, w, offset});
    });
    return out;
}

WeightedInstance group_by_x_for_truncation(const Dataset& data, bool* relaxed) {
    WeightedInstance out;
    bool any = false;
    for_each_group(data, [&](std::span<const Eigen::Index> rows) {
        const double y0 = data.Y(rows[0]);
        const bool constant = std::all_of(rows.begin(), rows.end(), [&](auto r) { return data.Y(r) == y0; });
        if (constant) {
            out.push_back({y0, static_cast<double>(rows.size()), 0.0});
        } else {
            any = true;
            for (auto r : rows) out.push_back({data.Y(r), 1.0, 0.0});
        }
    });
    if (relaxed) *relaxed = any;
    return out;
}

KmeansSolution kmeans1d_exact(std::span<const WeightedPoint> points, int k) {
    require_k(k, points.size());
    const SortedInstance s(points);
    const std::size_t L = s.size();
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), L);
    if (kk == L) return singletons(s, s.offsets());

    const Partition part = partition_dp(L, kk, [&](std::size_t i, std::size_t j) { return s.sse(i, j); });
    std::vector<double> centers(kk);
    for (std::size_t c = 0; c < kk; ++c) centers[c] = s.mean(part.bounds[c], part.bounds[c + 1]);
    return assemble(s, part, centers, part.cost + s.offsets());
}

KmeansSolution kmeans1d_exact_trunc(std::span<const WeightedPoint> points, int k, double B) {
    require_k(k, points.size());
    if (!(B > 0.0)) throw DomainError("truncation level B must be positive");
    for (const auto& p : points) {
        if (p.offset != 0.0) {
            throw DomainError("truncated clustering needs zero-offset points (use group_by_x_for_truncation)");
        }
    }
    const SortedInstance s(points);
    const std::size_t L = s.size();
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), L);
    if (kk == L) return singletons(s, 0.0);

    // best[i][len]: min over sub-windows [a,b) of [i, i+len) of
    //   SSE(a,b) + B * (weight of [i, i+len) outside [a,b)).
    // The optimal center of a segment is the mean of the points it leaves
    // untruncated, and those form a contiguous window, so this is the exact
    // segment cost. Recurrence on which endpoint (if any) is excluded.
    const std::size_t width = L - kk + 1;
    const std::size_t stride = width + 1;
    std::vector<double> best(L * stride, kInf);
    for (std::size_t len = 1; len <= width; ++len) {
        for (std::size_t i = 0; i + len <= L; ++i) {
            double v = s.sse(i, i + len);
            if (len == 1) {
                v = std::min(v, B * s.weight(i));
            } else {
                v = std::min(v, best[(i + 1) * stride + len - 1] + B * s.weight(i));
                v = std::min(v, best[i * stride + len - 1] + B * s.weight(i + len - 1));
            }
            best[i * stride + len] = v;
        }
    }
    auto seg = [&](std::size_t i, std::size_t j) { return best[i * stride + (j - i)]; };
    const Partition part = partition_dp(L, kk, seg);

    // Recover each segment's center from its best window.
    std::vector<double> centers(kk);
    for (std::size_t c = 0; c < kk; ++c) {
        const std::size_t i = part.bounds[c], j = part.bounds[c + 1];
        double wsum = 0.0;
        for (std::size_t t = i; t < j; ++t) wsum += s.weight(t);
        double bestv = kInf;
        double center = s.mean(i, j);
        for (std::size_t a = i; a < j; ++a) {
            double inside = 0.0;
            for (std::size_t b = a + 1; b <= j; ++b) {
                inside += s.weight(b - 1);
                const double v = s.sse(a, b) + B * (wsum - inside);
                if (v < bestv) {
                    bestv = v;
                    center = s.mean(a, b);
                }
            }
        }
        centers[c] = center;
    }
    return assemble(s, part, centers, part.cost);
}

OccupancyParams occupancy_r(int n, std::int64_t m, double alpha0) {
    if (n < 1) throw DomainError("n must be positive");
    if (m < 1) throw DomainError("m must be positive");
    require_probability(alpha0, "alpha0");
    const double nn = static_cast<double>(n);
    const double t = nn * (nn - 1.0) / (nn + 2.0 * static_cast<double>(m));
    const double inner = t - 2.0 * std::sqrt(t * std::log(1.0 / alpha0));
    int r = inner > 0.0 ? static_cast<int>(std::ceil(inner)) : 0;
    r = std::min(r, n);
    return {r, n, m, alpha0};
}

std::int64_t max_admissible_m(int n, double alpha0) {
    require_probability(alpha0, "alpha0");
    const double nn = static_cast<double>(n);
    return static_cast<std::int64_t>(std::floor(nn * (nn - 1.0) / (2.0 * std::log(1.0 / alpha0))));
}

double pwc_empirical_risk(const Dataset& data, int k) {
    const int n = checked_n(data);
    const auto inst = group_by_x(data);
    return kmeans1d_exact(inst, k).cost / n;
}

double pwc_truncated_empirical_risk(const Dataset& data, int k, double B, bool* relaxed) {
    const int n = checked_n(data);
    const auto inst = group_by_x_for_truncation(data, relaxed);
    return kmeans1d_exact_trunc(inst, k, B).cost / n;
}

BoundResult bound_pwc_basic(const Dataset& data, std::int64_t m, const AlphaBudget& budget) {
    const int n = checked_n(data);
    if (m < 1) throw DomainError("m must be positive");
    const std::int64_t limit = max_admissible_m(n, budget.alpha0());
    if (m > limit) {
        throw ConditionRefused("pwc_basic requires m <= n(n-1)/(2 log(1/alpha0)); m = " + std::to_string(m) +
                                   " exceeds the limit for n = " + std::to_string(n),
                               "m <= " + std::to_string(limit));
    }
    const double risk = pwc_empirical_risk(data, n - 1);
    BoundResult r;
    r.method = Method::pwc_basic;
    r.empirical_risk = risk;
    r.value = budget.alpha1() * risk;
    r.pieces = n - 1;
    return r;
}

BoundResult bound_pwc_refined(const Dataset& data, std::int64_t m, const AlphaBudget& budget) {
    const int n = checked_n(data);
    const OccupancyParams occ = occupancy_r(n, m, budget.alpha0());
    const int k = n - occ.r;
    const double risk = pwc_empirical_risk(data, k);
    BoundResult r;
    r.method = Method::pwc_refined;
    r.empirical_risk = risk;
    r.value = budget.alpha1() * risk;
    r.pieces = k;
    r.occupancy_r = occ.r;
    return r;
}

BoundResult bound_pwc_trunc(const Dataset& data, std::int64_t m, const AlphaBudget& budget, double B) {
    const int n = checked_n(data);
    const OccupancyParams occ = occupancy_r(n, m, budget.alpha0());
    const int k = n - occ.r;
    bool relaxed = false;
    const double risk = pwc_truncated_empirical_risk(data, k, B, &relaxed);
    BoundResult r = bound_erm_trunc(budget.alpha1(), n, B, std::min(risk, B));
    r.method = Method::pwc_trunc;
    r.pieces = k;
    r.occupancy_r = occ.r;
    r.ties_relaxed = relaxed;
    return r;
}

}  // namespace riskfloor
