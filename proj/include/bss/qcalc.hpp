#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "bss/function.hpp"
#include "bss/operators.hpp"
#include "bss/series.hpp"

namespace bss {

/// q-integer [n]_q = (1-q^n)/(1-q); equals n at q = 1. Written via expm1 so
/// schedules with q -> 1 keep full precision.
inline double q_integer(std::int64_t n, double q) {
    if (n < 0) throw std::domain_error("q_integer: require n >= 0");
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("q_integer: require q in (0,1]");
    if (q == 1.0) return static_cast<double>(n);
    return -std::expm1(static_cast<double>(n) * std::log1p(q - 1.0)) / (1.0 - q);
}

/// Gaussian binomial coefficient [n choose k]_q via log-space sums of
/// ln [i]_q.
inline double q_binomial(std::int64_t n, std::int64_t k, double q) {
    if (k < 0 || k > n)
        throw std::domain_error("q_binomial: require 0 <= k <= n");
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("q_binomial: require q in (0,1]");
    double s = 0.0;
    for (std::int64_t i = 1; i <= k; ++i)
        s += std::log(q_integer(n - k + i, q)) - std::log(q_integer(i, q));
    return std::exp(s);
}

/// (1+x)_q^m = prod_{j=0}^{m-1} (1 + q^j x).
inline double q_pochhammer_1px(double x, std::int64_t m, double q) {
    if (m < 1) throw std::domain_error("q_pochhammer_1px: require m >= 1");
    if (!(x >= 0.0)) throw std::domain_error("q_pochhammer_1px: require x >= 0");
    double s = 0.0, qj = 1.0;
    for (std::int64_t j = 0; j < m; ++j) {
        s += std::log1p(qj * x);
        qj *= q;
    }
    return std::exp(s);
}

namespace qdetail {

// Incrementally extended log-space tables shared by the evaluators:
// prefix sums of ln [i]_q and of ln(1 + q^j x). Concurrent reads are fine;
// extension is serialized.
class LogTable {
  public:
    explicit LogTable(std::function<double(std::int64_t)> term) : term_(std::move(term)) {
        partial_.push_back(0.0);  // empty sum
    }

    // sum of term(0..m-1)
    double prefix(std::int64_t m) const {
        {
            std::shared_lock lock(mutex_);
            if (m < static_cast<std::int64_t>(partial_.size())) return partial_[m];
        }
        std::unique_lock lock(mutex_);
        while (static_cast<std::int64_t>(partial_.size()) <= m)
            partial_.push_back(partial_.back() +
                               term_(static_cast<std::int64_t>(partial_.size()) - 1));
        return partial_[m];
    }

  private:
    std::function<double(std::int64_t)> term_;
    mutable std::vector<double> partial_;
    mutable std::shared_mutex mutex_;
};

}  // namespace qdetail

/// Evaluation context for the q-operators: q, the Jackson lattice scale A
/// (nodes q^j/A), truncation caps for the bilateral sum, and the relative
/// tolerance of adaptive truncation.
struct QContext {
    double q = 0.9;
    double A = 1.0;
    std::int64_t j_min = -600;
    std::int64_t j_max = 600;
    double rel_tol = 1e-12;

    void validate() const {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("QContext: require 0 < q < 1");
        if (!(A > 0.0)) throw std::domain_error("QContext: require A > 0");
        if (!(j_min <= 0 && 0 <= j_max)) throw std::domain_error("QContext: require j_min <= 0 <= j_max");
        if (!(rel_tol > 0.0)) throw std::domain_error("QContext: require rel_tol > 0");
    }

    /// Default caps cover the double range at moderate q and scale like
    /// 1/(1-q) as q -> 1, where the lattice refines.
    static QContext for_q(double q, double A = 1.0) {
        QContext ctx;
        ctx.q = q;
        ctx.A = A;
        const double need = 90.0 / std::max(1.0 - q, 1e-12);
        const std::int64_t cap =
            std::max<std::int64_t>(600, static_cast<std::int64_t>(std::min(need, 4.0e7)));
        ctx.j_min = -cap;
        ctx.j_max = cap;
        return ctx;
    }
};

struct QOperatorSpec {
    int n = 1;
    int p = 1;
    QContext ctx;

    int r() const { return n + p; }
    void validate() const {
        if (n < 1 || p < 1) throw std::domain_error("QOperatorSpec: require n >= 1 and p >= 1");
        ctx.validate();
    }
};

struct JacksonResult {
    double value = 0.0;
    std::int64_t nodes = 0;
    std::int64_t j_lo = 0, j_hi = 0;  // inclusive window actually summed
    bool converged = true;
};

/// Improper Jackson q-integral (1-q) sum_j (q^j/A) g(q^j/A) over all integer
/// j, truncated adaptively: the small-node side stops when terms fall below
/// rel_tol of the accumulated scale, the large-node side additionally
/// requires the integrand to decay (20 consecutively growing terms raise an
/// error).
template <class G>
JacksonResult jackson_improper_integral(G&& g, const QContext& ctx) {
    ctx.validate();
    const double q = ctx.q, lnq = std::log1p(ctx.q - 1.0);
    JacksonResult res;
    double sum_abs = 0.0;

    auto node_term = [&](std::int64_t j) {
        const double le = static_cast<double>(j) * lnq;
        if (le < -700.0 || le > 700.0) return 0.0;
        const double t = std::exp(le) / ctx.A;
        return (1.0 - q) * t * g(t);
    };

    // j >= 0: nodes shrinking towards 0
    int small_run = 0;
    std::int64_t j = 0;
    for (; j <= ctx.j_max; ++j) {
        const double term = node_term(j);
        res.value += term;
        sum_abs += std::fabs(term);
        ++res.nodes;
        if (std::fabs(term) <= ctx.rel_tol * std::max(sum_abs, 1e-300)) {
            if (++small_run >= 10) break;
        } else {
            small_run = 0;
        }
    }
    res.j_hi = std::min(j, ctx.j_max);
    if (j > ctx.j_max) res.converged = false;

    // j < 0: nodes growing; g must decay (the e_q factor guarantees it at
    // every operator call site)
    small_run = 0;
    int grow_run = 0;
    double prev_abs = std::numeric_limits<double>::infinity();
    for (j = -1; j >= ctx.j_min; --j) {
        const double term = node_term(j);
        res.value += term;
        sum_abs += std::fabs(term);
        ++res.nodes;
        const double a = std::fabs(term);
        if (a > prev_abs && a > ctx.rel_tol * std::max(sum_abs, 1e-300)) {
            if (++grow_run >= 20)
                throw std::runtime_error(
                    "jackson_improper_integral: integrand does not decay at large nodes "
                    "(20 consecutive growing terms at j < 0)");
        } else {
            grow_run = 0;
        }
        prev_abs = a;
        if (a <= ctx.rel_tol * std::max(sum_abs, 1e-300)) {
            if (++small_run >= 10) break;
        } else {
            small_run = 0;
        }
    }
    res.j_lo = std::max(j, ctx.j_min);
    if (j < ctx.j_min) res.converged = false;
    return res;
}

struct QEvalResult {
    double value = 0.0;
    std::int64_t lattice_nodes = 0;
    std::int64_t k_terms = 0;   // largest k index reached by the inner sums
    bool converged = true;
    bool moment_route = false;  // exact degree<=2 route where the lattice is infeasible

    bool flagged() const { return !converged; }
};

struct QEvalPolicy {
    SeriesPolicy series;
    std::int64_t max_lattice_nodes = 2000000;
};

namespace qdetail {

struct QClosed {
    double e0, e1, e2, m1, m2, bound;
};

inline QClosed q_closed_moments(int n, int p, double q, double x) {
    const std::int64_t r = n + p;
    const double rq = q_integer(r, q);
    const double rq1 = q_integer(r + 1, q);
    QClosed c;
    c.e0 = 1.0;
    c.e1 = x / (q * q) + 1.0 / (q * rq);
    c.e2 = rq1 / (std::pow(q, 6) * rq) * x * x
         + (1.0 + 2.0 * q + q * q) / (std::pow(q, 5) * rq) * x
         + (1.0 + q) / (std::pow(q, 3) * rq * rq);
    c.m1 = (1.0 - 1.0 / (q * q)) * x + 1.0 / (q * rq);
    c.m2 = c.e2 - 2.0 * x * c.e1 + x * x;
    c.bound = 9.0 / std::pow(q, 6) * (1.0 - q * q * q + 1.0 / rq) * (x + 1.0) * (x + 1.0);
    return c;
}

}  // namespace qdetail

/// q-analogue evaluator: [n+p]_q sum_k b^k(x;q) * Jackson integral of
/// f(t) s^k(t;q). The kernel uses the decaying q-exponential
/// e_q(-z) = 1/prod_{j>=0}(1+(1-q)q^j z) and q-factorials, the unique
/// combination under which the closed-form moment identities hold for every
/// lattice scale A. On the lattice the q-exponential advances by one exact
/// factor per node. For q so close to 1 that the lattice exceeds the node
/// budget, polynomial f of degree <= 2 falls back to the exact moment route.
inline QEvalResult q_evaluate_detailed(const QOperatorSpec& spec, const FuncExpr& f, double x,
                                       const QEvalPolicy& policy = {}) {
    spec.validate();
    if (!(x >= 0.0)) throw std::domain_error("q_evaluate: require x >= 0");
    if (!f.growth().admissible_for_operators())
        throw std::domain_error("q_evaluate: function '" + f.source() +
                                "' grows super-polynomially");

    const double q = spec.ctx.q, A = spec.ctx.A;
    const std::int64_t r = spec.r();
    const double lnq = std::log1p(q - 1.0);
    const double rq = q_integer(r, q);

    const double projected = 90.0 / (1.0 - q);
    if (projected > static_cast<double>(policy.max_lattice_nodes)) {
        const GrowthInfo& gi = f.growth();
        if (gi.polynomial && gi.degree <= 2) {
            // exact by linearity on 1, t, t^2
            const double f0 = f(0.0), f1 = f(1.0), f2 = f(2.0);
            const double c2 = (f2 - 2.0 * f1 + f0) / 2.0;
            const double c1 = f1 - f0 - c2;
            const double c0 = f0;
            const auto cm = qdetail::q_closed_moments(spec.n, spec.p, q, x);
            QEvalResult res;
            res.value = c0 * cm.e0 + c1 * cm.e1 + c2 * cm.e2;
            res.moment_route = true;
            return res;
        }
        throw std::runtime_error(
            "q_evaluate: q=" + std::to_string(q) +
            " needs ~" + std::to_string(static_cast<std::int64_t>(projected)) +
            " lattice nodes (budget " + std::to_string(policy.max_lattice_nodes) +
            "); only polynomials of degree <= 2 are supported this close to q = 1");
    }

    // lam = (1-q)[r]_q = 1-q^r; e_q(-[r]_q t) steps by the factor (1+lam*t)
    const double lam = (1.0 - q) * rq;

    qdetail::LogTable lnqint([q](std::int64_t i) { return std::log(q_integer(i + 1, q)); });
    qdetail::LogTable lnpoch([q, x](std::int64_t j) {
        return std::log1p(std::pow(q, static_cast<double>(j)) * x);
    });

    std::vector<double> lnb;  // basis logs, extended on demand
    auto ln_basis = [&](std::int64_t k) {
        while (static_cast<std::int64_t>(lnb.size()) <= k) {
            const std::int64_t kk = static_cast<std::int64_t>(lnb.size());
            double v;
            if (x == 0.0) {
                v = kk == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
            } else {
                const double lbin = lnqint.prefix(r + kk - 1) - lnqint.prefix(r - 1) - lnqint.prefix(kk);
                v = lbin + static_cast<double>(kk) * static_cast<double>(kk) * lnq +
                    static_cast<double>(kk) * std::log(x) - lnpoch.prefix(r + kk);
            }
            lnb.push_back(v);
        }
        return lnb[k];
    };

    QEvalResult res;

    // ln of sum_k b^k(x;q) ([r]t)^k/[k]_q! at one node; terms are positive
    // and unimodal in k (consecutive ratios decrease), so the tail stop is safe
    auto ln_inner = [&](double t) -> double {
        const double lrt = std::log(rq * t);
        double shift = ln_basis(0);
        double acc = 1.0;
        std::int64_t k = 1;
        for (; k < policy.series.k_max; ++k) {
            const double lt = ln_basis(k) + static_cast<double>(k) * lrt - lnqint.prefix(k);
            if (lt > shift) {
                acc = acc * std::exp(shift - lt) + 1.0;
                shift = lt;
            } else {
                const double e = std::exp(lt - shift);
                acc += e;
                if (e < 1e-17 * acc) break;
            }
        }
        res.k_terms = std::max(res.k_terms, k);
        if (k >= policy.series.k_max) res.converged = false;
        return shift + std::log(acc);
    };

    // anchor ln e_q(-[r]_q/A) at j = 0
    double lnE0 = 0.0;
    {
        double zf = lam / A;  // (1-q) * z at j = 0
        while (zf > 1e-18) {
            lnE0 -= std::log1p(zf);
            zf *= q;
        }
    }

    const double lnw_base = std::log1p(-q) - std::log(A);
    double total = 0.0, sum_abs = 0.0;

    // dir=+1 walks j upward (nodes shrinking); dir=-1 walks j downward
    // (nodes growing, killed by the q-exponential). Returns false on a cap.
    auto accumulate_side = [&](int dir) -> bool {
        double lnE = lnE0;
        int small_run = 0, grow_run = 0;
        double prev_abs = std::numeric_limits<double>::infinity();
        const std::int64_t cap = dir > 0 ? spec.ctx.j_max : -spec.ctx.j_min;
        for (std::int64_t step = dir > 0 ? 0 : 1; step <= cap; ++step) {
            const std::int64_t j = dir > 0 ? step : -step;
            const double le = static_cast<double>(j) * lnq;
            if (le < -700.0) return true;   // nodes underflowed: exact zeros onward
            if (le > 690.0) return false;   // node overflow before convergence
            const double t = std::exp(le) / A;
            if (dir < 0) lnE -= std::log1p(lam * t);  // moving to the larger node first
            const double lnmag = lnw_base + le + lnE + ln_inner(t);
            double term = 0.0;
            if (lnmag > -740.0) term = std::exp(lnmag) * f(t);
            total += term;
            sum_abs += std::fabs(term);
            ++res.lattice_nodes;
            if (dir > 0) lnE += std::log1p(lam * t);  // prepare next smaller node
            const double a = std::fabs(term);
            const double scale = std::max(sum_abs, 1e-300);
            if (a <= spec.ctx.rel_tol * scale) {
                if (++small_run >= 10) return true;
            } else {
                small_run = 0;
            }
            if (dir < 0) {
                if (a > prev_abs && a > spec.ctx.rel_tol * scale) {
                    if (++grow_run >= 20)
                        throw std::runtime_error("q_evaluate: lattice terms fail to decay");
                } else {
                    grow_run = 0;
                }
                prev_abs = a;
            }
        }
        return false;  // cap hit
    };

    const bool up_ok = accumulate_side(+1);
    const bool down_ok = accumulate_side(-1);
    res.converged = res.converged && up_ok && down_ok;
    res.value = rq * total;
    return res;
}

inline double q_evaluate(const QOperatorSpec& spec, const FuncExpr& f, double x,
                         const QEvalPolicy& policy = {}) {
    return q_evaluate_detailed(spec, f, x, policy).value;
}

/// Closed-form q-moments (with the central second-moment bound attached in
/// `central_bound`) against their lattice-evaluated counterparts.
inline MomentReport q_moments(const QOperatorSpec& spec, double x,
                              const QEvalPolicy& policy = {}) {
    spec.validate();
    const auto c = qdetail::q_closed_moments(spec.n, spec.p, spec.ctx.q, x);
    MomentReport rep;
    rep.x = x;
    rep.e0 = c.e0;
    rep.e1 = c.e1;
    rep.e2 = c.e2;
    rep.m1 = c.m1;
    rep.m2 = c.m2;
    rep.central_bound = c.bound;

    static const FuncExpr e0f = catalog("e0");
    static const FuncExpr e1f = catalog("e1");
    static const FuncExpr e2f = catalog("e2");
    const QEvalResult r0 = q_evaluate_detailed(spec, e0f, x, policy);
    const QEvalResult r1 = q_evaluate_detailed(spec, e1f, x, policy);
    const QEvalResult r2 = q_evaluate_detailed(spec, e2f, x, policy);
    rep.numeric_e0 = r0.value;
    rep.numeric_e1 = r1.value;
    rep.numeric_e2 = r2.value;
    rep.flagged = r0.flagged() || r1.flagged() || r2.flagged();
    auto rel = [](double closed, double numeric) {
        return std::fabs(closed - numeric) / std::max(std::fabs(closed), 1e-12);
    };
    rep.max_rel_discrepancy = std::max({rel(rep.e0, rep.numeric_e0),
                                        rel(rep.e1, rep.numeric_e1),
                                        rel(rep.e2, rep.numeric_e2)});
    return rep;
}

}  // namespace bss
