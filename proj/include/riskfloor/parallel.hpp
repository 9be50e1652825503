#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace riskfloor {

// How a batch of independent trials is executed. threads == 1 selects the
// serial reference loop; anything else runs the OpenMP kernel. Results are
// identical either way.
struct ExecPolicy {
    int threads = 1;

    static ExecPolicy serial() { return {1}; }
    static ExecPolicy parallel(int threads = 0) { return {threads}; }
    bool is_serial() const { return threads == 1; }
};

inline int resolve_threads(const ExecPolicy& policy) {
#if defined(_OPENMP)
    return policy.threads > 0 ? policy.threads : omp_get_max_threads();
#else
    (void)policy;
    return 1;
#endif
}

/// out[i] = fn(i) for i in [0, count). Each index writes only its own slot.
/// If any call throws, the exception from the lowest index is rethrown once
/// the loop has finished.
template <class T, class Fn>
std::vector<T> map_trials(std::size_t count, const ExecPolicy& policy, Fn&& fn) {
    std::vector<T> out(count);
    if (policy.is_serial()) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    const auto n = static_cast<std::ptrdiff_t>(count);
    std::exception_ptr first_error;
    std::ptrdiff_t first_index = n;
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_threads(policy))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(riskfloor_map_trials_error)
            if (i < first_index) {
                first_index = i;
                first_error = std::current_exception();
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

/// Pairwise (cascade) summation in index order. Deterministic for a given
/// input, independent of how the values were produced.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace riskfloor
