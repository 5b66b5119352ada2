#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>

#include "bss/function.hpp"

namespace bss {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& what, std::size_t off)
        : std::runtime_error("syntax error at offset " + std::to_string(off) + ": " + what),
          offset(off) {}
};

struct GrowthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace ast {

enum class Kind { number, var, add, sub, mul, div, pow, neg, exp, sin, cos, abs, sqrt, ln, sgn };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    double value = 0.0;  // number
    int exponent = 0;    // pow
    NodePtr a, b;

    Node(Kind k) : kind(k) {}
};

inline NodePtr num(double v) {
    auto n = std::make_shared<Node>(Kind::number);
    n->value = v;
    return n;
}
inline NodePtr var() { return std::make_shared<Node>(Kind::var); }
inline NodePtr unary(Kind k, NodePtr a) {
    auto n = std::make_shared<Node>(k);
    n->a = std::move(a);
    return n;
}
inline bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::number && n->value == v;
}

// Smart constructors fold the trivial identities so derivative trees stay small.
inline NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind == Kind::number && b->kind == Kind::number) return num(a->value + b->value);
    auto n = std::make_shared<Node>(Kind::add);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->kind == Kind::number && b->kind == Kind::number) return num(a->value - b->value);
    auto n = std::make_shared<Node>(Kind::sub);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return num(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind == Kind::number && b->kind == Kind::number) return num(a->value * b->value);
    auto n = std::make_shared<Node>(Kind::mul);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return num(0.0);
    if (is_const(b, 1.0)) return a;
    auto n = std::make_shared<Node>(Kind::div);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}
inline NodePtr pow(NodePtr a, int m) {
    if (m == 0) return num(1.0);
    if (m == 1) return a;
    auto n = std::make_shared<Node>(Kind::pow);
    n->a = std::move(a);
    n->exponent = m;
    return n;
}
inline NodePtr neg(NodePtr a) {
    if (a->kind == Kind::number) return num(-a->value);
    return unary(Kind::neg, std::move(a));
}

inline double eval(const Node& n, double t) {
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::var: return t;
        case Kind::add: return eval(*n.a, t) + eval(*n.b, t);
        case Kind::sub: return eval(*n.a, t) - eval(*n.b, t);
        case Kind::mul: return eval(*n.a, t) * eval(*n.b, t);
        case Kind::div: return eval(*n.a, t) / eval(*n.b, t);
        case Kind::pow: return std::pow(eval(*n.a, t), n.exponent);
        case Kind::neg: return -eval(*n.a, t);
        case Kind::exp: return std::exp(eval(*n.a, t));
        case Kind::sin: return std::sin(eval(*n.a, t));
        case Kind::cos: return std::cos(eval(*n.a, t));
        case Kind::abs: return std::fabs(eval(*n.a, t));
        case Kind::sqrt: return std::sqrt(eval(*n.a, t));
        case Kind::ln: return std::log(eval(*n.a, t));
        case Kind::sgn: {
            const double v = eval(*n.a, t);
            return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        }
    }
    return 0.0;
}

inline NodePtr diff(const NodePtr& n) {
    switch (n->kind) {
        case Kind::number: return num(0.0);
        case Kind::var: return num(1.0);
        case Kind::add: return add(diff(n->a), diff(n->b));
        case Kind::sub: return sub(diff(n->a), diff(n->b));
        case Kind::mul: return add(mul(diff(n->a), n->b), mul(n->a, diff(n->b)));
        case Kind::div:
            return div(sub(mul(diff(n->a), n->b), mul(n->a, diff(n->b))), pow(n->b, 2));
        case Kind::pow:
            return mul(mul(num(n->exponent), pow(n->a, n->exponent - 1)), diff(n->a));
        case Kind::neg: return neg(diff(n->a));
        case Kind::exp: return mul(unary(Kind::exp, n->a), diff(n->a));
        case Kind::sin: return mul(unary(Kind::cos, n->a), diff(n->a));
        case Kind::cos: return neg(mul(unary(Kind::sin, n->a), diff(n->a)));
        case Kind::abs: return mul(unary(Kind::sgn, n->a), diff(n->a));
        case Kind::sqrt:
            return div(diff(n->a), mul(num(2.0), unary(Kind::sqrt, n->a)));
        case Kind::ln: return div(diff(n->a), n->a);
        case Kind::sgn: return num(0.0);  // a.e.
    }
    return num(0.0);
}

inline std::string print(const Node& n) {
    char buf[40];
    switch (n.kind) {
        case Kind::number:
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            return buf;
        case Kind::var: return "t";
        case Kind::add: return "(" + print(*n.a) + "+" + print(*n.b) + ")";
        case Kind::sub: return "(" + print(*n.a) + "-" + print(*n.b) + ")";
        case Kind::mul: return "(" + print(*n.a) + "*" + print(*n.b) + ")";
        case Kind::div: return "(" + print(*n.a) + "/" + print(*n.b) + ")";
        case Kind::pow: return "(" + print(*n.a) + "^" + std::to_string(n.exponent) + ")";
        case Kind::neg: return "(-" + print(*n.a) + ")";
        case Kind::exp: return "exp(" + print(*n.a) + ")";
        case Kind::sin: return "sin(" + print(*n.a) + ")";
        case Kind::cos: return "cos(" + print(*n.a) + ")";
        case Kind::abs: return "abs(" + print(*n.a) + ")";
        case Kind::sqrt: return "sqrt(" + print(*n.a) + ")";
        case Kind::ln: return "ln(" + print(*n.a) + ")";
        case Kind::sgn: return "sgn(" + print(*n.a) + ")";
    }
    return "?";
}

// Growth analysis. `sign` describes the direction of f(t) as t -> +inf for
// the dominant term: -1, 0, +1, or 2 when indeterminate from syntax alone.
struct GrowthEst {
    GrowthInfo info;
    int sign = 2;
};

inline GrowthEst analyze(const NodePtr& n);

inline GrowthEst analyze_exp_arg(const GrowthEst& g) {
    GrowthEst r;
    if (g.info.kind == Growth::exp_growth || (g.info.kind == Growth::poly && g.sign != -1)) {
        throw GrowthError(
            "disallowed growth: exp of an argument that is not decreasing towards +inf "
            "(functions must grow at most polynomially for operator use)");
    }
    if (g.info.kind == Growth::poly && g.sign == -1) {
        r.info.kind = Growth::exp_decay;
    } else {
        r.info.kind = Growth::bounded;  // bounded or decaying argument
    }
    r.sign = +1;
    return r;
}

inline GrowthEst analyze(const NodePtr& n) {
    GrowthEst r;
    switch (n->kind) {
        case Kind::number:
            r.info = GrowthInfo{Growth::bounded, 0, true};
            r.sign = n->value > 0 ? 1 : (n->value < 0 ? -1 : 0);
            return r;
        case Kind::var:
            r.info = GrowthInfo{Growth::poly, 1, true};
            r.sign = 1;
            return r;
        case Kind::neg: {
            r = analyze(n->a);
            if (r.sign == 1 || r.sign == -1) r.sign = -r.sign;
            return r;
        }
        case Kind::add:
        case Kind::sub: {
            GrowthEst a = analyze(n->a);
            GrowthEst b = analyze(n->b);
            if (n->kind == Kind::sub && (b.sign == 1 || b.sign == -1)) b.sign = -b.sign;
            r.info = growth_sum(a.info, b.info);
            if (a.info.kind == b.info.kind && a.info.degree == b.info.degree)
                r.sign = (a.sign == b.sign) ? a.sign : 2;
            else if (a.info.kind > b.info.kind ||
                     (a.info.kind == b.info.kind && a.info.degree > b.info.degree))
                r.sign = a.sign;
            else
                r.sign = b.sign;
            return r;
        }
        case Kind::mul: {
            GrowthEst a = analyze(n->a);
            GrowthEst b = analyze(n->b);
            r.info = growth_product(a.info, b.info);
            r.sign = (a.sign == 2 || b.sign == 2) ? 2 : a.sign * b.sign;
            return r;
        }
        case Kind::div: {
            GrowthEst a = analyze(n->a);
            GrowthEst b = analyze(n->b);
            r.info = a.info;
            r.info.polynomial = false;
            if (b.info.kind == Growth::exp_decay)
                throw GrowthError("disallowed growth: division by an exponentially decaying "
                                  "denominator grows super-polynomially");
            if (b.info.kind == Growth::exp_growth) r.info.kind = Growth::exp_decay;
            r.sign = (a.sign == 2 || b.sign == 2) ? 2 : (b.sign == 0 ? 2 : a.sign * b.sign);
            return r;
        }
        case Kind::pow: {
            GrowthEst a = analyze(n->a);
            const int m = n->exponent;
            if (m >= 0) {
                r.info = a.info;
                r.info.polynomial = a.info.polynomial;
                if (a.info.kind == Growth::poly) r.info.degree = a.info.degree * m;
                r.sign = (a.sign == 2) ? 2 : (m % 2 == 0 ? (a.sign == 0 ? 0 : 1) : a.sign);
            } else {
                if (a.info.kind == Growth::exp_decay)
                    throw GrowthError("disallowed growth: negative power of an exponentially "
                                      "decaying base grows super-polynomially");
                r.info.kind = Growth::bounded;  // tail-bounded; poles near zeros accepted
                r.info.polynomial = false;
                r.sign = 2;
            }
            return r;
        }
        case Kind::exp: return analyze_exp_arg(analyze(n->a));
        case Kind::sin:
        case Kind::cos:
            analyze(n->a);  // still reject exp-growth inside
            r.info = GrowthInfo{Growth::bounded, 0, false};
            return r;
        case Kind::abs: {
            GrowthEst a = analyze(n->a);
            r.info = a.info;
            r.info.polynomial = false;
            r.sign = 1;
            return r;
        }
        case Kind::sqrt: {
            GrowthEst a = analyze(n->a);
            r.info = a.info;
            r.info.polynomial = false;
            if (a.info.kind == Growth::poly) r.info.degree = (a.info.degree + 1) / 2;
            r.sign = 1;
            return r;
        }
        case Kind::ln: {
            analyze(n->a);
            r.info.kind = Growth::poly;
            r.info.degree = 1;  // crude sub-polynomial bound
            r.info.polynomial = false;
            r.sign = 2;
            return r;
        }
        case Kind::sgn:
            r.info = GrowthInfo{Growth::bounded, 0, false};
            return r;
    }
    return r;
}

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            skip_ws();
            if (peek() == '+') { ++pos_; e = add(e, parse_term()); }
            else if (peek() == '-') { ++pos_; e = sub(e, parse_term()); }
            else return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') { ++pos_; e = mul(e, parse_factor()); }
            else if (peek() == '/') { ++pos_; e = div(e, parse_factor()); }
            else return e;
        }
    }

    NodePtr parse_factor() {
        skip_ws();
        if (peek() == '-') { ++pos_; return neg(parse_factor()); }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            bool negexp = false;
            if (peek() == '-') { negexp = true; ++pos_; }
            else if (peek() == '+') { ++pos_; }
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw ParseError("exponent must be a constant integer", at);
            long v = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + (peek() - '0');
                if (v > 64) throw ParseError("exponent too large (max 64)", at);
                ++pos_;
            }
            if (peek() == '.')
                throw ParseError("exponent must be a constant integer", at);
            return pow(base, negexp ? -static_cast<int>(v) : static_cast<int>(v));
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = src_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(start, &end);
            if (end == start) throw ParseError("malformed number", pos_);
            pos_ += static_cast<std::size_t>(end - start);
            return num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t at = pos_;
            std::string id;
            while (std::isalpha(static_cast<unsigned char>(peek()))) id += src_[pos_++];
            if (id == "t") return var();
            Kind k;
            if (id == "exp") k = Kind::exp;
            else if (id == "sin") k = Kind::sin;
            else if (id == "cos") k = Kind::cos;
            else if (id == "abs") k = Kind::abs;
            else if (id == "sqrt") k = Kind::sqrt;
            else if (id == "ln") k = Kind::ln;
            else throw ParseError("unknown identifier '" + id + "'", at);
            expect('(');
            NodePtr a = parse_expr();
            expect(')');
            return unary(k, a);
        }
        throw ParseError(c == '\0' ? "unexpected end of input"
                                   : std::string("unexpected character '") + c + "'",
                         pos_);
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
};

}  // namespace ast

/// Parses the expression grammar
///   number | t | exp sin cos abs sqrt ln | + - * / ^ | parentheses
/// with `^` restricted to constant integer exponents. Derivatives come from
/// symbolic differentiation of the tree; growth is inferred syntactically and
/// super-polynomially growing expressions are rejected here.
inline FuncExpr parse(const std::string& src) {
    ast::NodePtr root = ast::Parser(src).parse();
    const ast::GrowthEst g = ast::analyze(root);
    ast::NodePtr d1 = ast::diff(root);
    ast::NodePtr d2 = ast::diff(d1);
    return FuncExpr(
        [root](double t) { return ast::eval(*root, t); },
        [d1](double t) { return ast::eval(*d1, t); },
        [d2](double t) { return ast::eval(*d2, t); },
        g.info, ast::print(*root));
}

}  // namespace bss
