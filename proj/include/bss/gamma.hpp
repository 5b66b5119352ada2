#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bss {

/// ln Gamma(x) for x > 0. Thin wrapper so every call site shares the same
/// domain contract.
inline double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: require x > 0, got x=" + std::to_string(x));
    return std::lgamma(x);
}

/// Log of the negative-binomial mass b^k = C(r+k-1, k) x^k (1+x)^{-(r+k)},
/// the basis weight of the operator series with r = n+p. Entirely in log
/// space; at x = 0 only the k = 0 term survives (returns -inf for k > 0).
inline double log_negbin_weight(std::int64_t k, std::int64_t r, double x) {
    if (k < 0) throw std::domain_error("log_negbin_weight: require k >= 0");
    if (r < 1) throw std::domain_error("log_negbin_weight: require r >= 1");
    if (!(x >= 0.0)) throw std::domain_error("log_negbin_weight: require x >= 0");
    if (x == 0.0)
        return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    const double rd = static_cast<double>(r);
    const double kd = static_cast<double>(k);
    return std::lgamma(rd + kd) - std::lgamma(kd + 1.0) - std::lgamma(rd)
         + kd * std::log(x) - (rd + kd) * std::log1p(x);
}

}  // namespace bss
