#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bss/analysis.hpp"
#include "bss/statconv.hpp"

using namespace bss;

TEST_CASE("natural density of classic sets") {
    const auto evens = IndexSet::from_predicate([](std::int64_t k) { return k % 2 == 0; });
    CHECK_THAT(natural_density(evens, 1000000), Catch::Matchers::WithinRel(0.5, 1e-12));

    const auto squares = IndexSet::from_predicate([](std::int64_t k) {
        const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(k))));
        return r * r == k || (r + 1) * (r + 1) == k || (r - 1) * (r - 1) == k;
    });
    CHECK_THAT(natural_density(squares, 1000000), Catch::Matchers::WithinRel(0.001, 1e-12));

    const auto empty = IndexSet::from_list({});
    CHECK(natural_density(empty, 1000000) == 0.0);
    CHECK_THROWS_AS(natural_density(empty, 0), std::domain_error);
}

TEST_CASE("density changes by at most 1/N between consecutive N") {
    const auto s = IndexSet::from_predicate([](std::int64_t k) { return k % 7 < 3; });
    double prev = natural_density(s, 100);
    for (std::int64_t N = 101; N <= 160; ++N) {
        const double d = natural_density(s, N);
        CHECK(std::fabs(d - prev) <= 1.0 / static_cast<double>(N) + 1e-15);
        prev = d;
    }
}

TEST_CASE("st_limit_check verdicts") {
    const std::vector<std::int64_t> Ns = {1000, 10000, 100000};

    // constant sequence: all densities zero
    const auto c = st_limit_check([](std::int64_t) { return 3.0; }, 3.0, 0.1, Ns);
    for (const double d : c.densities) CHECK(d == 0.0);
    CHECK(c.consistent);

    // off only on perfect squares: statistically convergent
    const auto sq = st_limit_check(
        [](std::int64_t j) {
            const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(j))));
            const bool square = r * r == j;
            return square ? 1.0 : 0.0;
        },
        0.0, 0.5, Ns);
    CHECK(sq.consistent);
    CHECK(sq.final_density < 0.01);

    // alternating sequence: fails against L = 1
    const auto alt = st_limit_check(
        [](std::int64_t j) { return j % 2 == 0 ? 1.0 : -1.0; }, 1.0, 0.5, Ns);
    CHECK_FALSE(alt.consistent);
    CHECK_THAT(alt.final_density, Catch::Matchers::WithinAbs(0.5, 1e-3));

    CHECK_THROWS_AS(st_limit_check([](std::int64_t) { return 0.0; }, 0.0, 0.0, Ns),
                    std::domain_error);
}

TEST_CASE("ordinary convergence implies the statistical verdict") {
    const auto rep = st_limit_check(
        [](std::int64_t j) { return 1.0 / static_cast<double>(j); }, 0.0, 0.01,
        {1000, 10000, 100000});
    CHECK(rep.consistent);
}

TEST_CASE("schedules") {
    const auto plain = make_schedule("one-minus-inv-n");
    CHECK_THAT(plain(10), Catch::Matchers::WithinRel(0.9, 1e-15));
    const auto sqp = make_schedule("square-perturbed");
    CHECK(sqp(16) == 0.5);
    CHECK(sqp(17) == 1.0 - 1.0 / 17.0);
    const auto cst = make_schedule("constant:0.8");
    CHECK(cst(3) == 0.8);
    CHECK_THROWS_AS(make_schedule("nope"), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule("constant:1.5"), std::domain_error);
}

TEST_CASE("moment gap sequences under the plain schedule converge ordinarily") {
    const auto seqs = moment_gap_sequences(1, make_schedule("one-minus-inv-n"), 20000);
    // tails are small in the ordinary sense
    for (std::int64_t n = 19990; n < 20000; ++n) {
        CHECK(std::fabs(seqs.alpha[n]) < 0.01);
        CHECK(std::fabs(seqs.beta[n]) < 0.01);
        CHECK(std::fabs(seqs.gamma[n]) < 0.01);
    }
}

TEST_CASE("moment gap formula instance via q-integers") {
    // p=1, n=10, q=0.9: alpha_10 = [12]_q / (q^6 [11]_q) - 1
    const auto seqs = moment_gap_sequences(1, make_schedule("constant:0.9"), 10);
    const double expect = q_integer(12, 0.9) / (std::pow(0.9, 6) * q_integer(11, 0.9)) - 1.0;
    CHECK_THAT(seqs.alpha[9], Catch::Matchers::WithinRel(expect, 1e-13));
}

TEST_CASE("square-perturbed schedule: not ordinary, still statistical") {
    const std::int64_t N = 100000;
    const auto qs = make_schedule("square-perturbed");
    // ordinary convergence of q_n fails: |q_k - 1| >= 0.5 on every square
    int squares_checked = 0;
    for (std::int64_t r = 2; r * r <= N; ++r) {
        CHECK(std::fabs(qs(r * r) - 1.0) >= 0.5);
        ++squares_checked;
    }
    CHECK(squares_checked > 300);

    const auto seqs = moment_gap_sequences(1, qs, N);
    const std::vector<std::int64_t> Ns = {1000, 10000, N};
    for (const auto* seq : {&seqs.alpha, &seqs.beta, &seqs.gamma}) {
        const auto rep = st_limit_check(
            [&](std::int64_t j) { return (*seq)[j - 1]; }, 0.0, 0.05, Ns);
        CHECK(rep.consistent);
        CHECK(rep.final_density < 0.01);
    }
}

TEST_CASE("weighted-norm sequence of the q second moment converges statistically") {
    // ||L^{q_n}(e2) - e2||_rho from closed forms: the supremum of
    // (c x^2 + b x + a)/(1+x^2) is max(a, c, value at the interior critical
    // point), all coefficients positive
    const auto qs = make_schedule("square-perturbed");
    const int p = 1;
    auto norm_at = [&](std::int64_t n) {
        const double q = qs(n);
        const std::int64_t r = n + p;
        const double rq = q_integer(r, q);
        const double cx2 = q_integer(r + 1, q) / (std::pow(q, 6) * rq) - 1.0;
        const double bx = (1 + 2 * q + q * q) / (std::pow(q, 5) * rq);
        const double ax = (1 + q) / (std::pow(q, 3) * rq * rq);
        double best = std::max(ax, cx2);
        if (bx > 0) {
            const double d = ax - cx2;
            const double xstar = (d + std::sqrt(d * d + bx * bx)) / bx;
            const double g = (cx2 * xstar * xstar + bx * xstar + ax) / (1.0 + xstar * xstar);
            best = std::max(best, g);
        }
        return best;
    };
    // spot check the exact supremum against the grid estimator
    {
        const std::int64_t n = 50;
        const double q = qs(n);
        const double rq = q_integer(n + p, q);
        const double cx2 = q_integer(n + p + 1, q) / (std::pow(q, 6) * rq) - 1.0;
        const double bx = (1 + 2 * q + q * q) / (std::pow(q, 5) * rq);
        const double ax = (1 + q) / (std::pow(q, 3) * rq * rq);
        const double grid =
            weighted_norm([&](double x) { return cx2 * x * x + bx * x + ax; },
                          WeightKind::rho, 0.0, 1000.0)
                .norm_value;
        CHECK_THAT(norm_at(n), Catch::Matchers::WithinRel(grid, 1e-3));
        CHECK(grid <= norm_at(n) + 1e-12);  // grid estimates from below
    }

    const auto rep = st_limit_check([&](std::int64_t j) { return norm_at(j); }, 0.0, 0.05,
                                    {1000, 10000, 100000});
    CHECK(rep.consistent);
}
