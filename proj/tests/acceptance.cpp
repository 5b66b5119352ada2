// Acceptance suite: one pass/fail line per criterion, nonzero exit count on
// failure. Grids and tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bss/bss.hpp"

using namespace bss;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, const char* title, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, title,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

OperatorSpec classical(int n, int p) { return {Variant::classical, n, p, 0.0, 0.0}; }

void criterion_1() {
    Timer timer;
    double worst = 0.0;
    for (const auto& [n, p] : std::vector<std::pair<int, int>>{{5, 1}, {10, 2}, {50, 5}, {200, 1}})
        for (const double x : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0})
            worst = std::max(worst, closed_moments(classical(n, p), x).max_rel_discrepancy);
    const double secs = timer.seconds();
    report(1, "classical moment agreement", worst < 1e-8 && secs < 10.0,
           "max rel disc " + fmt(worst) + ", " + fmt(secs) + " s");
}

void criterion_2() {
    Timer timer;
    double worst = 0.0, worst_reduction = 0.0;
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{{0, 0}, {1, 2}, {3, 5}})
        for (const auto& [n, p] : std::vector<std::pair<int, int>>{{5, 1}, {10, 2}, {50, 5}, {200, 1}})
            for (const double x : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
                const OperatorSpec spec{Variant::stancu, n, p, a, b};
                const MomentReport rep = closed_moments(spec, x);
                worst = std::max(worst, rep.max_rel_discrepancy);
                if (a == 0.0 && b == 0.0) {
                    const MomentReport cl = closed_moments(classical(n, p), x);
                    const double scale = std::max(1.0, std::fabs(cl.e2));
                    worst_reduction = std::max({worst_reduction,
                                                std::fabs(rep.e1 - cl.e1) / scale,
                                                std::fabs(rep.e2 - cl.e2) / scale,
                                                std::fabs(rep.m1 - cl.m1) / scale,
                                                std::fabs(rep.m2 - cl.m2) / scale,
                                                std::fabs(rep.numeric_e1 - cl.numeric_e1) / scale,
                                                std::fabs(rep.numeric_e2 - cl.numeric_e2) / scale});
                }
            }
    report(2, "Stancu moment agreement and classical reduction",
           worst < 1e-8 && worst_reduction < 1e-12,
           "max rel disc " + fmt(worst) + ", reduction gap " + fmt(worst_reduction) + ", " +
               fmt(timer.seconds()) + " s");
}

void criterion_3() {
    Timer timer;
    const std::vector<OperatorSpec> specs = {
        {Variant::king, 5, 1, 0.0, 0.0},
        {Variant::king, 10, 2, 1.0, 2.0},
        {Variant::king, 25, 3, 2.0, 4.0},
        {Variant::king, 60, 1, 3.0, 5.0},
    };
    double worst_e0 = 0.0, worst_e1 = 0.0, worst_e2 = 0.0, paper_gap = 0.0;
    for (const auto& spec : specs) {
        const double lo = king_domain_inf(spec);
        for (int i = 0; i < 20; ++i) {
            const double x = lo + 0.05 + i * (5.0 - 0.05) / 19.0;
            const MomentReport rep = closed_moments(spec, x);
            worst_e0 = std::max(worst_e0, std::fabs(rep.numeric_e0 - 1.0));
            worst_e1 = std::max(worst_e1, std::fabs(rep.numeric_e1 - x));
            worst_e2 = std::max(worst_e2,
                                std::fabs(rep.numeric_e2 - rep.e2) / std::fabs(rep.e2));
            paper_gap = std::max(paper_gap,
                                 std::fabs(paper_king_moments(spec, x).e2 - rep.e2));
        }
    }
    report(3, "King preservation and derived second moment",
           worst_e0 < 1e-10 && worst_e1 < 1e-10 && worst_e2 < 1e-8,
           "|e0-1| " + fmt(worst_e0) + ", |e1-x| " + fmt(worst_e1) + ", e2 rel " +
               fmt(worst_e2) + "; printed-vs-derived e2 differs by up to " + fmt(paper_gap) +
               " (documented, not asserted), " + fmt(timer.seconds()) + " s");
}

void criterion_4() {
    Timer timer;
    double worst = 0.0;
    bool bound_ok = true;
    for (const double q : {0.5, 0.8, 0.95})
        for (const auto& [n, p] : std::vector<std::pair<int, int>>{{4, 1}, {10, 2}, {40, 1}})
            for (const double x : {0.0, 1.0, 5.0}) {
                QOperatorSpec spec;
                spec.n = n;
                spec.p = p;
                spec.ctx = QContext::for_q(q);
                const MomentReport rep = q_moments(spec, x);
                worst = std::max(worst, rep.max_rel_discrepancy);
                bound_ok = bound_ok && rep.m2 <= rep.central_bound;
            }
    report(4, "q-moment agreement and central-moment bound", worst < 1e-6 && bound_ok,
           "max rel disc " + fmt(worst) + ", bound " + (bound_ok ? "holds" : "VIOLATED") +
               ", " + fmt(timer.seconds()) + " s");
}

void criterion_5() {
    Timer timer;
    bool ok = true;
    std::string note;
    for (const char* name : {"e2", "exp_neg", "runge"}) {
        const FuncExpr f = catalog(name);
        for (const double x : {0.5, 1.0, 2.0}) {
            const auto recs = voronovskaja_run(classical(1, 1), f, x, {32, 128, 512, 2048});
            bool dec = true;
            for (std::size_t i = 1; i < recs.size(); ++i)
                dec = dec && recs[i].abs_gap < recs[i - 1].abs_gap;
            const double slope = loglog_slope(recs);
            const double target = recs.back().target;
            const double thr = target != 0.0 ? 0.02 * std::fabs(target) : 0.02;
            const bool here =
                dec && slope > -1.3 && slope < -0.7 && recs.back().abs_gap < thr;
            if (!here) {
                ok = false;
                note += std::string(" [") + name + " x=" + fmt(x) + " slope=" + fmt(slope) +
                        " gap=" + fmt(recs.back().abs_gap) + "]";
            }
        }
    }
    report(5, "Voronovskaja asymptotics", ok,
           (ok ? std::string("slopes in [-1.3,-0.7], gaps below threshold")
               : "violations:" + note) +
               ", " + fmt(timer.seconds()) + " s");
}

void criterion_6() {
    Timer timer;
    const auto sched = [](std::int64_t n) {
        return 1.0 - 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    };
    bool ok = true;
    std::string note;
    for (const char* name : {"e1", "e2"}) {
        const auto recs = q_voronovskaja_run(1, catalog(name), 1.0,
                                             {32, 64, 128, 256, 512, 1024}, sched);
        for (std::size_t i = 1; i < recs.size(); ++i)
            if (recs[i].abs_gap >= recs[i - 1].abs_gap) {
                ok = false;
                note += std::string(" [") + name + " n=" + std::to_string(recs[i].n) + "]";
            }
    }
    const double secs = timer.seconds();
    report(6, "q-Voronovskaja monotone gap", ok && secs < 60.0,
           (ok ? "gaps decrease for n in [32,1024]" : "non-monotone:" + note) + ", " +
               fmt(secs) + " s");
}

void criterion_7() {
    Timer timer;
    const std::vector<OperatorSpec> specs = {classical(10, 1), classical(20, 2),
                                             classical(50, 1)};
    bool t2_ok = true, the1_ok = true;
    double worst_c = 0.0;
    for (const char* name : {"exp_neg", "sin", "runge"}) {
        const FuncExpr f = catalog(name);
        for (const auto& spec : specs) {
            for (const double b : {1.0, 2.0, 5.0})
                t2_ok = t2_ok && bound_check_theorem_t2(f, spec, b).holds;
            for (const double x : {0.5, 1.0, 2.0}) {
                const The1Report rep = bound_check_theorem_the1(f, spec, x);
                the1_ok = the1_ok && !rep.exceptional;
                worst_c = std::max(worst_c, rep.c_implied);
            }
        }
    }
    report(7, "error-bound inequalities", t2_ok && the1_ok && worst_c < 16.0,
           std::string("t2 ") + (t2_ok ? "holds on 27 combos" : "VIOLATED") +
               ", max implied constant " + fmt(worst_c) + " < 16, " + fmt(timer.seconds()) +
               " s");
}

void criterion_8() {
    Timer timer;
    bool ok = true;
    double worst = 0.0;
    for (const OperatorSpec base :
         {classical(10000, 1), OperatorSpec{Variant::stancu, 10000, 1, 1.0, 2.0}}) {
        const auto norms = korovkin_weighted_norms(base);
        for (const double v : norms) {
            worst = std::max(worst, v);
            ok = ok && v < 1e-3;
        }
    }
    report(8, "weighted Korovkin norms at n = 10^4", ok,
           "max norm " + fmt(worst) + ", " + fmt(timer.seconds()) + " s");
}

void criterion_9() {
    Timer timer;
    const auto qs = make_schedule("square-perturbed");
    bool squares_bad = true;  // ordinary convergence must fail on squares
    for (std::int64_t r = 2; r * r <= 100000; ++r)
        squares_bad = squares_bad && std::fabs(qs(r * r) - 1.0) >= 0.5;

    const auto seqs = moment_gap_sequences(1, qs, 100000);
    bool st_ok = true;
    double final_density = 0.0;
    for (const auto* seq : {&seqs.alpha, &seqs.beta, &seqs.gamma}) {
        const auto rep = st_limit_check([&](std::int64_t j) { return (*seq)[j - 1]; }, 0.0,
                                        0.05, {1000, 10000, 100000});
        st_ok = st_ok && rep.consistent && rep.final_density < 0.01;
        final_density = std::max(final_density, rep.final_density);
    }
    const double secs = timer.seconds();
    report(9, "statistical convergence of the moment-gap sequences",
           squares_bad && st_ok && secs < 5.0,
           std::string(squares_bad ? "ordinary limit fails on squares" : "SCHEDULE BROKEN") +
               ", max final density " + fmt(final_density) + ", " + fmt(secs) + " s");
}

void criterion_10(double total_so_far) {
    Timer timer;
    double worst_quad = 0.0;
    for (const int m : {2, 4, 8, 16, 32})
        for (const double alpha : {0.0, 1.0, 5.0, 20.0}) {
            const auto rule = gauss_laguerre(m, alpha);
            for (int d = 0; d <= 2 * m - 1; ++d) {
                double expect = 1.0;
                for (int i = 1; i <= d; ++i) expect *= alpha + i;
                const double got = rule->mean([d](double u) { return std::pow(u, d); });
                worst_quad = std::max(worst_quad, std::fabs(got - expect) / expect);
            }
        }
    double worst_norm = 0.0;
    for (const std::int64_t r : {2, 10, 100})
        for (const double x : {0.0, 0.5, 1.0, 5.0}) {
            double sum = 0.0;
            int small = 0;
            for (std::int64_t k = 0; k < 100000; ++k) {
                const double t = std::exp(log_negbin_weight(k, r, x));
                sum += t;
                if (t < 1e-16 * sum && k > r * x) {
                    if (++small > 10) break;
                } else {
                    small = 0;
                }
            }
            worst_norm = std::max(worst_norm, std::fabs(sum - 1.0));
        }
    const double total = total_so_far + timer.seconds();
    report(10, "infrastructure invariants and total runtime",
           worst_quad < 1e-9 && worst_norm < 1e-12 && total < 180.0,
           "quad exactness " + fmt(worst_quad) + ", weight normalization " + fmt(worst_norm) +
               ", suite total " + fmt(total) + " s");
}

}  // namespace

int main() {
    Timer total;
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10(total.seconds());
    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
