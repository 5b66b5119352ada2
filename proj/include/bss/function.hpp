#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace bss {

// Enumerator order is the dominance order used when combining terms.
enum class Growth { exp_decay, bounded, poly, exp_growth };

struct GrowthInfo {
    Growth kind = Growth::bounded;
    int degree = 0;           // meaningful for kind == poly: |f| <= C (1 + t^degree)
    bool polynomial = false;  // f is exactly a polynomial in t

    bool admissible_for_operators() const { return kind != Growth::exp_growth; }
};

/// Upper bound for the growth of a sum f + g.
inline GrowthInfo growth_sum(const GrowthInfo& a, const GrowthInfo& b) {
    GrowthInfo g;
    g.kind = std::max(a.kind, b.kind);
    g.degree = std::max(a.kind == Growth::poly ? a.degree : 0,
                        b.kind == Growth::poly ? b.degree : 0);
    if (g.kind != Growth::poly) g.degree = 0;
    g.polynomial = a.polynomial && b.polynomial;
    return g;
}

/// Upper bound for the growth of a product f * g.
inline GrowthInfo growth_product(const GrowthInfo& a, const GrowthInfo& b) {
    GrowthInfo g;
    if (a.kind == Growth::exp_growth || b.kind == Growth::exp_growth) {
        g.kind = Growth::exp_growth;
    } else if (a.kind == Growth::exp_decay || b.kind == Growth::exp_decay) {
        g.kind = Growth::exp_decay;  // decay beats any polynomial factor
    } else if (a.kind == Growth::poly || b.kind == Growth::poly) {
        g.kind = Growth::poly;
        g.degree = (a.kind == Growth::poly ? a.degree : 0) +
                   (b.kind == Growth::poly ? b.degree : 0);
    } else {
        g.kind = Growth::bounded;
    }
    g.polynomial = a.polynomial && b.polynomial;
    return g;
}

inline std::string to_string(const GrowthInfo& g) {
    switch (g.kind) {
        case Growth::bounded: return "bounded";
        case Growth::poly: return "poly(" + std::to_string(g.degree) + ")";
        case Growth::exp_decay: return "exp_decay";
        case Growth::exp_growth: return "exp_growth";
    }
    return "?";
}

/// A target function f on [0, inf): evaluation, optional analytic first and
/// second derivatives, growth metadata, and the source text it came from.
/// Immutable after construction; sharable across threads.
class FuncExpr {
  public:
    using Fn = std::function<double(double)>;

    FuncExpr() = default;
    FuncExpr(Fn f, Fn d1, Fn d2, GrowthInfo growth, std::string source)
        : f_(std::move(f)), d1_(std::move(d1)), d2_(std::move(d2)),
          growth_(growth), source_(std::move(source)) {}

    static FuncExpr from_lambda(Fn f, GrowthInfo growth, std::string source = "<lambda>") {
        return FuncExpr(std::move(f), nullptr, nullptr, growth, std::move(source));
    }

    double operator()(double t) const { return f_(t); }

    bool has_analytic_derivatives() const { return static_cast<bool>(d1_) && static_cast<bool>(d2_); }

    /// First derivative: analytic when available, otherwise central finite
    /// difference with step 1e-5 * max(1, |x|).
    double deriv1(double x) const {
        if (d1_) return d1_(x);
        const double h = fd_step(x);
        return (f_(x + h) - f_(x - h)) / (2.0 * h);
    }

    double deriv2(double x) const {
        if (d2_) return d2_(x);
        const double h = fd_step(x);
        return (f_(x + h) - 2.0 * f_(x) + f_(x - h)) / (h * h);
    }

    const GrowthInfo& growth() const { return growth_; }
    const std::string& source() const { return source_; }

  private:
    static double fd_step(double x) { return 1e-5 * std::max(1.0, std::fabs(x)); }

    Fn f_;
    Fn d1_, d2_;
    GrowthInfo growth_;
    std::string source_;
};

/// Pointwise linear combination a*f + b*g, derivative-preserving.
inline FuncExpr linear_combination(double a, const FuncExpr& f, double b, const FuncExpr& g) {
    const GrowthInfo gi = growth_sum(f.growth(), g.growth());
    const bool analytic = f.has_analytic_derivatives() && g.has_analytic_derivatives();
    return FuncExpr(
        [a, f, b, g](double t) { return a * f(t) + b * g(t); },
        analytic ? FuncExpr::Fn([a, f, b, g](double t) { return a * f.deriv1(t) + b * g.deriv1(t); })
                 : FuncExpr::Fn(),
        analytic ? FuncExpr::Fn([a, f, b, g](double t) { return a * f.deriv2(t) + b * g.deriv2(t); })
                 : FuncExpr::Fn(),
        gi, "combo");
}

/// Built-in test functions with exact analytic derivatives.
/// Names: e0, e1, e2, e3, exp_neg, sin, runge, abs_shift(c).
inline FuncExpr catalog(const std::string& name) {
    const GrowthInfo bounded{Growth::bounded, 0, false};
    auto poly = [](int d) { return GrowthInfo{Growth::poly, d, true}; };

    if (name == "e0")
        return FuncExpr([](double) { return 1.0; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }, poly(0), name);
    if (name == "e1")
        return FuncExpr([](double t) { return t; }, [](double) { return 1.0; },
                        [](double) { return 0.0; }, poly(1), name);
    if (name == "e2")
        return FuncExpr([](double t) { return t * t; }, [](double t) { return 2.0 * t; },
                        [](double) { return 2.0; }, poly(2), name);
    if (name == "e3")
        return FuncExpr([](double t) { return t * t * t; }, [](double t) { return 3.0 * t * t; },
                        [](double t) { return 6.0 * t; }, poly(3), name);
    if (name == "exp_neg")
        return FuncExpr([](double t) { return std::exp(-t); },
                        [](double t) { return -std::exp(-t); },
                        [](double t) { return std::exp(-t); },
                        GrowthInfo{Growth::exp_decay, 0, false}, name);
    if (name == "sin")
        return FuncExpr([](double t) { return std::sin(t); },
                        [](double t) { return std::cos(t); },
                        [](double t) { return -std::sin(t); }, bounded, name);
    if (name == "runge")
        return FuncExpr([](double t) { return 1.0 / (1.0 + t * t); },
                        [](double t) {
                            const double d = 1.0 + t * t;
                            return -2.0 * t / (d * d);
                        },
                        [](double t) {
                            const double d = 1.0 + t * t;
                            return (6.0 * t * t - 2.0) / (d * d * d);
                        },
                        bounded, name);
    if (name.rfind("abs_shift(", 0) == 0 && name.back() == ')') {
        const double c = std::stod(name.substr(10, name.size() - 11));
        // |t - c|; derivative sign(t-c) away from the kink, 0 at it
        return FuncExpr([c](double t) { return std::fabs(t - c); },
                        [c](double t) { return t > c ? 1.0 : (t < c ? -1.0 : 0.0); },
                        [](double) { return 0.0; },
                        GrowthInfo{Growth::poly, 1, false}, name);
    }
    throw std::invalid_argument("catalog: unknown function '" + name +
                                "' (known: e0, e1, e2, e3, exp_neg, sin, runge, abs_shift(c))");
}

}  // namespace bss
