#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bss/gamma.hpp"

namespace bss {

/// Generalized Gauss-Laguerre rule for the weight t^alpha e^{-t} on [0,inf).
/// Weights are stored in log scale: the true weights sum to Gamma(alpha+1),
/// which overflows double for alpha beyond ~170 (the evaluators use alpha = k
/// with k in the thousands).
struct QuadRule {
    int order = 0;
    double alpha = 0.0;
    std::vector<double> nodes;        // strictly increasing, all > 0
    std::vector<double> log_weights;  // ln w_i with sum_i w_i = Gamma(alpha+1)

    /// Raw integral sum w_i f(x_i) ~ int f(t) t^alpha e^{-t} dt.
    /// Overflows for large alpha; prefer mean() there.
    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (int i = 0; i < order; ++i) s += std::exp(log_weights[i]) * f(nodes[i]);
        return s;
    }

    /// Normalized sum w_i/Gamma(alpha+1) f(x_i): the mean of f under a
    /// Gamma(alpha+1) variable. Safe for any alpha.
    template <class F>
    double mean(F&& f) const {
        const double lg = std::lgamma(alpha + 1.0);
        double s = 0.0;
        for (int i = 0; i < order; ++i) s += std::exp(log_weights[i] - lg) * f(nodes[i]);
        return s;
    }

    std::vector<double> weights() const {
        std::vector<double> w(log_weights.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i]);
        return w;
    }
};

namespace detail {

// ln of the Christoffel denominator sum_{k<order} p_k(x)^2 where the p_k are
// the orthonormal Laguerre polynomials scaled so p_0 = 1 (i.e. without the
// 1/sqrt(mu_0) factor). Rescales on the fly: at extreme nodes the sum reaches
// e^{+x} territory.
inline double log_christoffel_sum(int order, double alpha, double x) {
    double qm1 = 0.0, q0 = 1.0, s = 1.0, ln_shift = 0.0;
    double sb_prev = 0.0;
    for (int k = 0; k + 1 < order; ++k) {
        const double a_k = 2.0 * k + alpha + 1.0;
        const double sb_next = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
        const double q1 = ((x - a_k) * q0 - sb_prev * qm1) / sb_next;
        s += q1 * q1;
        qm1 = q0;
        q0 = q1;
        sb_prev = sb_next;
        if (std::fabs(q0) > 1e150) {
            const double g = 1e-150;
            q0 *= g;
            qm1 *= g;
            s *= g * g;
            ln_shift += -2.0 * std::log(g);
        }
    }
    return std::log(s) + ln_shift;
}

inline QuadRule build_gauss_laguerre(int order, double alpha) {
    // Golub-Welsch nodes: eigenvalues of the Jacobi matrix of the monic
    // generalized Laguerre recurrence, diag a_i = 2i+alpha+1, offdiag
    // sqrt(i(i+alpha)). Weights come from the Christoffel function instead of
    // the eigenvector first components, whose absolute eps-level accuracy is
    // far too coarse for the e^{-x}-sized extreme weights.
    Eigen::VectorXd diag(order), sub(std::max(order - 1, 0));
    for (int i = 0; i < order; ++i) diag[i] = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < order; ++i)
        sub[i - 1] = std::sqrt(static_cast<double>(i) * (i + alpha));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error(
            "gauss_laguerre: tridiagonal eigen-solve failed to converge (order=" +
            std::to_string(order) + ", alpha=" + std::to_string(alpha) + ")");

    QuadRule rule;
    rule.order = order;
    rule.alpha = alpha;
    rule.nodes.resize(order);
    rule.log_weights.resize(order);
    const double lg = std::lgamma(alpha + 1.0);  // mu_0 = Gamma(alpha+1)
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = solver.eigenvalues()[i];  // ascending
        rule.log_weights[i] = lg - log_christoffel_sum(order, alpha, rule.nodes[i]);
    }
    for (int i = 0; i + 1 < order; ++i)
        if (!(rule.nodes[i] > 0.0 && rule.nodes[i] < rule.nodes[i + 1]))
            throw std::runtime_error("gauss_laguerre: nodes not strictly increasing positive");
    if (!(rule.nodes[order - 1] > 0.0))
        throw std::runtime_error("gauss_laguerre: nonpositive node");
    return rule;
}

// Cache of built rules keyed by (order, alpha). Concurrent readers take a
// shared lock; insertion is serialized. Rough LRU via per-entry use stamps,
// capped at 4096 entries (alpha = k ranges into the thousands for large x).
class QuadCache {
  public:
    static constexpr std::size_t kMaxEntries = 4096;

    std::shared_ptr<const QuadRule> get(int order, double alpha) {
        const Key key{order, alpha};
        {
            std::shared_lock lock(mutex_);
            auto it = map_.find(key);
            if (it != map_.end()) {
                it->second.last_used.store(++clock_, std::memory_order_relaxed);
                return it->second.rule;
            }
        }
        auto rule = std::make_shared<const QuadRule>(build_gauss_laguerre(order, alpha));
        std::unique_lock lock(mutex_);
        auto [it, inserted] = map_.try_emplace(key);
        if (inserted) {
            it->second.rule = rule;
            it->second.last_used.store(++clock_, std::memory_order_relaxed);
            if (map_.size() > kMaxEntries) evict_oldest();
        }
        return it->second.rule;
    }

    static QuadCache& instance() {
        static QuadCache cache;
        return cache;
    }

  private:
    struct Key {
        int order;
        double alpha;
        bool operator==(const Key& o) const { return order == o.order && alpha == o.alpha; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<int>()(k.order) ^ (std::hash<double>()(k.alpha) << 1);
        }
    };
    struct Entry {
        std::shared_ptr<const QuadRule> rule;
        std::atomic<std::uint64_t> last_used{0};
    };

    void evict_oldest() {
        auto oldest = map_.begin();
        for (auto it = map_.begin(); it != map_.end(); ++it)
            if (it->second.last_used.load(std::memory_order_relaxed) <
                oldest->second.last_used.load(std::memory_order_relaxed))
                oldest = it;
        map_.erase(oldest);
    }

    std::shared_mutex mutex_;
    std::unordered_map<Key, Entry, KeyHash> map_;
    std::atomic<std::uint64_t> clock_{0};
};

}  // namespace detail

/// Cached generalized Gauss-Laguerre rule of the given order for weight
/// t^alpha e^{-t}. Exact for polynomials of degree <= 2*order-1.
inline std::shared_ptr<const QuadRule> gauss_laguerre(int order, double alpha) {
    if (order < 1) throw std::domain_error("gauss_laguerre: require order >= 1");
    if (!(alpha >= 0.0)) throw std::domain_error("gauss_laguerre: require alpha >= 0");
    return detail::QuadCache::instance().get(order, alpha);
}

}  // namespace bss
