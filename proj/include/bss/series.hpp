#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace bss {

/// Controls adaptive truncation of infinite series (the k-summation of all
/// operator evaluators and the bilateral Jackson sums).
struct SeriesPolicy {
    double rel_tol = 1e-12;
    int consecutive_small = 10;
    std::int64_t k_max = 200000;
};

enum class SeriesTermination {
    converged,    // consecutive_small successive negligible terms
    cap_reached,  // k_max hit without convergence; value is the partial sum
};

struct SeriesResult {
    double value = 0.0;
    std::int64_t terms = 0;  // number of terms consumed
    SeriesTermination termination = SeriesTermination::converged;

    bool converged() const { return termination == SeriesTermination::converged; }
};

/// Sums term(0) + term(1) + ... until `consecutive_small` successive terms
/// satisfy |term| <= rel_tol * |partial sum|, or k_max is reached (flagged,
/// never silent). Partial sums of nonnegative terms are nondecreasing.
template <class TermFn>
SeriesResult sum_series(TermFn&& term, const SeriesPolicy& policy = {}) {
    SeriesResult res;
    int small_run = 0;
    for (std::int64_t k = 0; k < policy.k_max; ++k) {
        const double t = term(k);
        res.value += t;
        ++res.terms;
        const double scale = std::max(std::fabs(res.value),
                                      std::numeric_limits<double>::min());
        if (std::fabs(t) <= policy.rel_tol * scale) {
            if (++small_run >= policy.consecutive_small) return res;
        } else {
            small_run = 0;
        }
    }
    res.termination = SeriesTermination::cap_reached;
    return res;
}

}  // namespace bss
