#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bss/function.hpp"
#include "bss/operators.hpp"
#include "bss/qcalc.hpp"

namespace bss {

enum class ModulusKind { omega1, omega2, omega_b, omega_weighted };

/// Grid estimate of a modulus of continuity/smoothness. The value is a grid
/// lower bound of the true supremum; grid_resolution records the x-step used.
struct ModulusEstimate {
    double delta = 0.0;
    double value = 0.0;
    double grid_resolution = 0.0;
    ModulusKind kind = ModulusKind::omega1;
};

namespace detail {

inline double modulus_x_step(double delta, double X, std::int64_t max_steps = (1 << 21)) {
    double step = delta / 16.0;
    const double needed = X / step;
    if (needed > static_cast<double>(max_steps)) step = X / static_cast<double>(max_steps);
    return step;
}

}  // namespace detail

/// omega(f, delta) or omega_2(f, delta) on [0, X]: grid supremum over
/// x-steps of delta/16 and h in (0, delta] in 64 steps. omega_b is the usual
/// modulus restricted to the finite interval.
inline ModulusEstimate modulus(const FuncExpr& f, double delta, ModulusKind kind, double X) {
    if (!(delta > 0.0)) throw std::domain_error("modulus: require delta > 0");
    if (!(X > delta)) throw std::domain_error("modulus: require X > delta");
    if (kind == ModulusKind::omega_weighted)
        throw std::invalid_argument("modulus: use weighted_modulus for the weighted kind");

    const double xstep = detail::modulus_x_step(delta, X);
    const int reach = kind == ModulusKind::omega2 ? 2 : 1;
    double best = 0.0;
    for (double x = 0.0; x + reach * (delta / 64.0) <= X; x += xstep) {
        for (int j = 1; j <= 64; ++j) {
            const double h = j * delta / 64.0;
            if (x + reach * h > X) break;
            double d;
            if (kind == ModulusKind::omega2)
                d = std::fabs(f(x + 2 * h) - 2.0 * f(x + h) + f(x));
            else
                d = std::fabs(f(x + h) - f(x));
            best = std::max(best, d);
        }
    }
    return ModulusEstimate{delta, best, xstep, kind};
}

/// Weighted modulus Omega_{rho_gamma}(f; delta): grid supremum of
/// |f(x+h)-f(x)| / (1+(x+h)^{2+gamma}) over x >= 0 (truncated at X) and
/// 0 <= h <= delta.
inline ModulusEstimate weighted_modulus(const FuncExpr& f, double delta, double gamma,
                                        double X = 1000.0) {
    if (!(delta > 0.0)) throw std::domain_error("weighted_modulus: require delta > 0");
    if (!(gamma >= 0.0)) throw std::domain_error("weighted_modulus: require gamma >= 0");
    const double xstep = detail::modulus_x_step(delta, X);
    double best = 0.0;
    for (double x = 0.0; x <= X; x += xstep) {
        for (int j = 1; j <= 64; ++j) {
            const double h = j * delta / 64.0;
            const double num = std::fabs(f(x + h) - f(x));
            const double den = 1.0 + std::pow(x + h, 2.0 + gamma);
            best = std::max(best, num / den);
        }
    }
    return ModulusEstimate{delta, best, xstep, ModulusKind::omega_weighted};
}

enum class WeightKind { rho, rho_gamma };  // 1+x^2 and 1+x^{2+gamma}

struct WeightedNormResult {
    double norm_value = 0.0;
    WeightKind weight = WeightKind::rho;
    double gamma = 0.0;
    double x_max = 0.0;
    std::string grid;
};

/// sup over {0} and a log-spaced grid (64 points per decade, from 1e-3 to
/// x_max) of |g(x)| / weight(x).
template <class G>
WeightedNormResult weighted_norm(G&& g, WeightKind weight, double gamma, double x_max) {
    if (!(x_max > 0.0)) throw std::domain_error("weighted_norm: require x_max > 0");
    const double expo = weight == WeightKind::rho ? 2.0 : 2.0 + gamma;
    auto ratio = [&](double x) {
        return std::fabs(g(x)) / (1.0 + std::pow(x, expo));
    };
    double best = ratio(0.0);
    const double lo = 1e-3;
    const int decades_pts = static_cast<int>(std::ceil(64.0 * std::log10(x_max / lo)));
    for (int i = 0; i <= decades_pts; ++i) {
        const double x = lo * std::pow(10.0, static_cast<double>(i) / 64.0);
        if (x > x_max) break;
        best = std::max(best, ratio(x));
    }
    best = std::max(best, ratio(x_max));
    WeightedNormResult r;
    r.norm_value = best;
    r.weight = weight;
    r.gamma = gamma;
    r.x_max = x_max;
    r.grid = "{0} + logspace(1e-3," + std::to_string(x_max) + "), 64/decade";
    return r;
}

/// One row of an asymptotic experiment.
struct ConvergenceRecord {
    std::int64_t n = 0;
    double scaled_error = 0.0;  // n (Lf - f) or [n]_q (L^q f - f)
    double target = 0.0;
    double abs_gap = 0.0;
};

/// Least-squares slope of ln(abs_gap) against ln(n); NaN when fewer than two
/// usable points.
inline double loglog_slope(const std::vector<ConvergenceRecord>& records) {
    std::vector<double> lx, ly;
    for (const auto& r : records)
        if (r.abs_gap > 0.0 && r.n > 0) {
            lx.push_back(std::log(static_cast<double>(r.n)));
            ly.push_back(std::log(r.abs_gap));
        }
    const std::size_t m = lx.size();
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Scaled-error records n (L_{n,p} f - f)(x) against the asymptotic value
/// f'(x) + (x^2+2x)/2 f''(x), over the given n list (p and the variant fixed
/// by `base`).
inline std::vector<ConvergenceRecord> voronovskaja_run(const OperatorSpec& base,
                                                       const FuncExpr& f, double x,
                                                       std::vector<std::int64_t> n_list,
                                                       const EvalPolicy& policy = {}) {
    if (!f.has_analytic_derivatives())
        throw std::runtime_error(
            "voronovskaja_run: f needs analytic derivatives; use catalog functions or "
            "parsed expressions");
    std::sort(n_list.begin(), n_list.end());
    const double target = f.deriv1(x) + 0.5 * (x * x + 2.0 * x) * f.deriv2(x);
    std::vector<ConvergenceRecord> out;
    out.reserve(n_list.size());
    for (const std::int64_t n : n_list) {
        OperatorSpec spec = base;
        spec.n = static_cast<int>(n);
        const double scaled = static_cast<double>(n) * (evaluate(spec, f, x, policy) - f(x));
        out.push_back({n, scaled, target, std::fabs(scaled - target)});
    }
    return out;
}

/// q-analogue: [n]_{q_n} (L^{q_n}_{n,p} f - f)(x) against f'(x) + x f''(x)
/// under a schedule n -> q_n in (0,1).
inline std::vector<ConvergenceRecord> q_voronovskaja_run(
    int p, const FuncExpr& f, double x, std::vector<std::int64_t> n_list,
    const std::function<double(std::int64_t)>& q_schedule, double A = 1.0,
    const QEvalPolicy& policy = {}) {
    if (!f.has_analytic_derivatives())
        throw std::runtime_error(
            "q_voronovskaja_run: f needs analytic derivatives; use catalog functions or "
            "parsed expressions");
    std::sort(n_list.begin(), n_list.end());
    const double target = f.deriv1(x) + x * f.deriv2(x);
    std::vector<ConvergenceRecord> out;
    out.reserve(n_list.size());
    for (const std::int64_t n : n_list) {
        const double q = q_schedule(n);
        if (!(q > 0.0 && q < 1.0))
            throw std::domain_error("q_voronovskaja_run: schedule must give q in (0,1)");
        QOperatorSpec spec;
        spec.n = static_cast<int>(n);
        spec.p = p;
        spec.ctx = QContext::for_q(q, A);
        const double scaled =
            q_integer(n, q) * (q_evaluate(spec, f, x, policy) - f(x));
        out.push_back({n, scaled, target, std::fabs(scaled - target)});
    }
    return out;
}

/// Empirical check of the finite-interval error bound
///   sup_{[0,b]} |Lf - f| <= N_f (1+b^2) delta_n(b) + 2 omega_{b+1}(f, sqrt(delta_n(b)))
/// with N_f = 6 M_f and M_f the weighted sup of |f|/(1+x^2).
struct T2Report {
    double b = 0.0;
    double m_f = 0.0, n_f = 0.0;
    double delta_nb = 0.0;       // closed-form second central moment, sup over [0,b]
    double lhs = 0.0;            // grid sup of |Lf - f| on [0,b]
    double omega_term = 0.0;     // omega_{b+1}(f, sqrt(delta_nb))
    double rhs = 0.0;
    double ratio = 0.0;          // lhs / rhs
    bool holds = false;
};

inline T2Report bound_check_theorem_t2(const FuncExpr& f, const OperatorSpec& spec, double b,
                                       const EvalPolicy& policy = {}) {
    if (!(b > 0.0)) throw std::domain_error("bound_check_theorem_t2: require b > 0");
    const GrowthInfo& g = f.growth();
    if (g.kind == Growth::poly && g.degree > 2)
        throw std::domain_error(
            "bound_check_theorem_t2: f must satisfy |f(x)| <= M (1+x^2)");

    T2Report rep;
    rep.b = b;
    rep.m_f = weighted_norm(f, WeightKind::rho, 0.0, 1000.0).norm_value;
    rep.n_f = 6.0 * rep.m_f;

    constexpr int kGrid = 33;
    double delta_sup = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        const double x = b * i / (kGrid - 1);
        rep.lhs = std::max(rep.lhs, std::fabs(evaluate(spec, f, x, policy) - f(x)));
        delta_sup = std::max(delta_sup, closed_moments(spec, x, policy).m2);
    }
    rep.delta_nb = delta_sup;

    rep.omega_term =
        modulus(f, std::sqrt(rep.delta_nb), ModulusKind::omega_b, b + 1.0).value;
    rep.rhs = rep.n_f * (1.0 + b * b) * rep.delta_nb + 2.0 * rep.omega_term;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

/// Pointwise K-functional route:
///   |Lf - f|(x) <= C omega_2(f, sqrt(delta_n(x) + alpha_n(x)^2)) + omega(f, alpha_n(x)).
/// Reports the implied constant C and whether it stays below the fixed
/// budget. The budget is an engineering allowance for the unquantified
/// absolute constant, not a sharp value.
struct The1Report {
    double x = 0.0;
    double lhs = 0.0;
    double omega_term = 0.0;   // omega(f, alpha_n(x))
    double omega2_term = 0.0;  // omega_2(f, sqrt(delta_n + alpha_n^2))
    double c_implied = 0.0;
    bool exceptional = false;  // omega2 = 0 with positive numerator (f effectively linear)
    bool within_budget = false;

    static constexpr double kBudget = 16.0;
};

inline The1Report bound_check_theorem_the1(const FuncExpr& f, const OperatorSpec& spec,
                                           double x, const EvalPolicy& policy = {}) {
    The1Report rep;
    rep.x = x;
    const MomentReport mom = closed_moments(spec, x, policy);
    const double alpha_n = mom.m1;
    const double delta_n = mom.m2;
    rep.lhs = std::fabs(evaluate(spec, f, x, policy) - f(x));

    const double X = std::max(10.0, 2.0 * x + 2.0);
    const double a = std::max(std::fabs(alpha_n), 1e-12);
    rep.omega_term = modulus(f, a, ModulusKind::omega1, X).value;
    const double h2 = std::sqrt(delta_n + alpha_n * alpha_n);
    rep.omega2_term = modulus(f, std::max(h2, 1e-12), ModulusKind::omega2, X).value;

    // dead-bands: grid dust in the moduli must not manufacture a huge
    // implied constant for (near-)linear f
    const double numer = std::max(0.0, rep.lhs - rep.omega_term - 1e-10);
    if (rep.omega2_term <= 1e-12) {
        rep.exceptional = numer > 0.0;
        rep.c_implied = 0.0;
        rep.within_budget = !rep.exceptional;
    } else {
        rep.c_implied = numer / rep.omega2_term;
        rep.within_budget = rep.c_implied < The1Report::kBudget;
    }
    return rep;
}

/// Weighted-modulus rate bound for non-decreasing f in B_{rho_gamma}:
///   |Lf - f|(x) <= sqrt(L(nu^2_{x,gamma}; x)) (1 + sqrt(L(Psi_x^2; x))/delta)
///                  Omega_{rho_gamma}(f; delta)
/// with nu_{x,gamma}(t) = 1 + (x+|t-x|)^{2+gamma}, Psi_x(t) = |t-x|.
/// delta <= 0 picks sqrt(L(Psi_x^2; x)).
struct WeightedRateReport {
    double x = 0.0, gamma = 0.0, delta = 0.0;
    double lhs = 0.0;
    double nu2_moment = 0.0, psi2_moment = 0.0;
    double omega = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

inline WeightedRateReport check_weighted_rate(const OperatorSpec& spec, const FuncExpr& f,
                                              double x, double gamma, double delta = 0.0,
                                              const EvalPolicy& policy = {}) {
    WeightedRateReport rep;
    rep.x = x;
    rep.gamma = gamma;
    const int deg = 2 * (2 + static_cast<int>(std::ceil(gamma)));
    const FuncExpr nu2 = FuncExpr::from_lambda(
        [x, gamma](double t) {
            const double v = 1.0 + std::pow(x + std::fabs(t - x), 2.0 + gamma);
            return v * v;
        },
        GrowthInfo{Growth::poly, deg, false}, "nu2");
    const FuncExpr psi2 = FuncExpr::from_lambda(
        [x](double t) { return (t - x) * (t - x); }, GrowthInfo{Growth::poly, 2, false},
        "psi2");
    rep.nu2_moment = evaluate(spec, nu2, x, policy);
    rep.psi2_moment = evaluate(spec, psi2, x, policy);
    rep.delta = delta > 0.0 ? delta : std::sqrt(std::max(rep.psi2_moment, 1e-300));
    rep.omega = weighted_modulus(f, rep.delta, gamma).value;
    rep.lhs = std::fabs(evaluate(spec, f, x, policy) - f(x));
    rep.rhs = std::sqrt(rep.nu2_moment) *
              (1.0 + std::sqrt(rep.psi2_moment) / rep.delta) * rep.omega;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

/// ||L(e_r) - e_r||_rho for r = 0,1,2 from the closed-form moments.
inline std::array<double, 3> korovkin_weighted_norms(const OperatorSpec& spec,
                                                     double x_max = 1000.0) {
    spec.validate();
    if (spec.variant == Variant::king)
        throw std::invalid_argument(
            "korovkin_weighted_norms: classical/stancu variants only");
    auto closed = [&](double x) {
        MomentReport rep;
        rep.x = x;
        switch (spec.variant) {
            case Variant::classical: {
                const auto c = detail::classical_closed(spec.r(), x);
                rep.e1 = c.e1; rep.e2 = c.e2;
                break;
            }
            default: {
                const auto c = detail::stancu_closed(spec, x);
                rep.e1 = c.e1; rep.e2 = c.e2;
                break;
            }
        }
        return rep;
    };
    std::array<double, 3> norms{};
    norms[0] = 0.0;  // L(e0) = 1 identically
    norms[1] = weighted_norm([&](double x) { return closed(x).e1 - x; }, WeightKind::rho,
                             0.0, x_max).norm_value;
    norms[2] = weighted_norm([&](double x) { return closed(x).e2 - x * x; }, WeightKind::rho,
                             0.0, x_max).norm_value;
    return norms;
}

}  // namespace bss
