#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bss/qcalc.hpp"

namespace bss {

/// A set of positive integers given either by a membership predicate or an
/// explicit sorted list.
class IndexSet {
  public:
    static IndexSet from_predicate(std::function<bool(std::int64_t)> pred) {
        IndexSet s;
        s.pred_ = std::move(pred);
        return s;
    }
    static IndexSet from_list(std::vector<std::int64_t> sorted) {
        IndexSet s;
        s.list_ = std::move(sorted);
        return s;
    }

    bool contains(std::int64_t k) const {
        if (pred_) return pred_(k);
        return std::binary_search(list_.begin(), list_.end(), k);
    }

  private:
    std::function<bool(std::int64_t)> pred_;
    std::vector<std::int64_t> list_;
};

/// |{k <= N : k in s}| / N.
inline double natural_density(const IndexSet& s, std::int64_t N) {
    if (N < 1) throw std::domain_error("natural_density: require N >= 1");
    std::int64_t count = 0;
    for (std::int64_t k = 1; k <= N; ++k)
        if (s.contains(k)) ++count;
    return static_cast<double>(count) / static_cast<double>(N);
}

/// A sequence n -> q_n in (0,1) with a printable description.
struct QSequence {
    std::function<double(std::int64_t)> q_n;
    std::string description;

    double operator()(std::int64_t n) const {
        const double q = q_n(n);
        if (!(q > 0.0 && q < 1.0))
            throw std::domain_error("QSequence: q_" + std::to_string(n) + " = " +
                                    std::to_string(q) + " outside (0,1)");
        return q;
    }
};

/// Named schedules.
///   one-minus-inv-n     q_n = 1 - 1/n           (ordinary convergence to 1)
///   one-minus-inv-n2    q_n = 1 - 1/n^2
///   square-perturbed    q_n = 1/2 on perfect squares, else 1 - 1/n
///                       (statistically but not ordinarily convergent to 1)
///   constant:c          q_n = c
inline QSequence make_schedule(const std::string& name) {
    auto is_square = [](std::int64_t n) {
        const auto rt = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
        for (std::int64_t r = std::max<std::int64_t>(rt - 1, 0); r <= rt + 1; ++r)
            if (r * r == n) return true;
        return false;
    };
    if (name == "one-minus-inv-n")
        return {[](std::int64_t n) { return n < 2 ? 0.5 : 1.0 - 1.0 / static_cast<double>(n); },
                name};
    if (name == "one-minus-inv-n2")
        return {[](std::int64_t n) {
                    return n < 2 ? 0.5 : 1.0 - 1.0 / (static_cast<double>(n) * static_cast<double>(n));
                },
                name};
    if (name == "square-perturbed")
        return {[is_square](std::int64_t n) {
                    if (n < 2 || is_square(n)) return 0.5;
                    return 1.0 - 1.0 / static_cast<double>(n);
                },
                name};
    if (name.rfind("constant:", 0) == 0) {
        const double c = std::stod(name.substr(9));
        if (!(c > 0.0 && c < 1.0))
            throw std::domain_error("make_schedule: constant must lie in (0,1)");
        return {[c](std::int64_t) { return c; }, name};
    }
    throw std::invalid_argument("make_schedule: unknown schedule '" + name +
                                "' (known: one-minus-inv-n, one-minus-inv-n2, "
                                "square-perturbed, constant:c)");
}

/// Finite-data check of st-lim x_n = L: densities of the exception set
/// {j <= N : |x_j - L| >= eps} for each N. The verdict is "consistent with"
/// the statistical limit -- nonincreasing densities beyond max(N)/10 and a
/// final density below 0.01 -- never a proof.
struct StLimitReport {
    double L = 0.0;
    double eps = 0.0;
    std::vector<std::int64_t> N_list;
    std::vector<double> densities;
    double final_density = 0.0;
    bool consistent = false;
};

inline StLimitReport st_limit_check(const std::function<double(std::int64_t)>& seq, double L,
                                    double eps, std::vector<std::int64_t> N_list) {
    if (!(eps > 0.0)) throw std::domain_error("st_limit_check: require eps > 0");
    if (N_list.empty()) throw std::domain_error("st_limit_check: empty N list");
    std::sort(N_list.begin(), N_list.end());
    StLimitReport rep;
    rep.L = L;
    rep.eps = eps;
    rep.N_list = N_list;

    const std::int64_t N_max = N_list.back();
    std::int64_t exceptions = 0;
    std::size_t next = 0;
    for (std::int64_t j = 1; j <= N_max && next < N_list.size(); ++j) {
        if (std::fabs(seq(j) - L) >= eps) ++exceptions;
        while (next < N_list.size() && N_list[next] == j) {
            rep.densities.push_back(static_cast<double>(exceptions) / static_cast<double>(j));
            ++next;
        }
    }
    rep.final_density = rep.densities.back();

    bool nonincreasing = true;
    for (std::size_t i = 1; i < rep.N_list.size(); ++i)
        if (rep.N_list[i] >= N_max / 10 && rep.N_list[i - 1] >= N_max / 10 &&
            rep.densities[i] > rep.densities[i - 1])
            nonincreasing = false;
    rep.consistent = nonincreasing && rep.final_density < 0.01;
    return rep;
}

/// The three moment-gap sequences of the weighted statistical convergence
/// argument, generated under q = q_n:
///   alpha_n = [n+p+1]_q/(q^6 [n+p]_q) - 1
///   beta_n  = (1+2q+q^2)/(q^5 [n+p]_q)
///   gamma_n = (1+q)/(q^3 [n+p]_q^2)
struct MomentGapSequences {
    std::vector<double> alpha, beta, gamma;
};

inline MomentGapSequences moment_gap_sequences(int p, const QSequence& qs, std::int64_t N) {
    if (N < 1) throw std::domain_error("moment_gap_sequences: require N >= 1");
    if (p < 1) throw std::domain_error("moment_gap_sequences: require p >= 1");
    MomentGapSequences out;
    out.alpha.resize(N);
    out.beta.resize(N);
    out.gamma.resize(N);
    for (std::int64_t n = 1; n <= N; ++n) {
        const double q = qs(n);
        const std::int64_t r = n + p;
        const double rq = q_integer(r, q);
        const double rq1 = q_integer(r + 1, q);
        out.alpha[n - 1] = rq1 / (std::pow(q, 6) * rq) - 1.0;
        out.beta[n - 1] = (1.0 + 2.0 * q + q * q) / (std::pow(q, 5) * rq);
        out.gamma[n - 1] = (1.0 + q) / (std::pow(q, 3) * rq * rq);
    }
    return out;
}

}  // namespace bss
