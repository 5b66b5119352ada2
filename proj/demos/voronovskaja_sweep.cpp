// Voronovskaja asymptotics: n (L_{n,p} f - f)(x) against the limit
// f'(x) + (x^2+2x)/2 f''(x) for a smooth decaying f.

#include <cstdio>

#include "bss/bss.hpp"

int main() {
    using namespace bss;
    OperatorSpec base;
    base.p = 1;
    const FuncExpr f = catalog("exp_neg");
    const double x = 1.0;
    const auto records = voronovskaja_run(base, f, x, {16, 64, 256, 1024});
    std::printf("%6s %16s %16s %12s\n", "n", "n(Lf-f)", "target", "gap");
    for (const auto& r : records)
        std::printf("%6lld %16.10f %16.10f %12.3e\n",
                    static_cast<long long>(r.n), r.scaled_error, r.target, r.abs_gap);
    std::printf("log-log slope: %.3f\n", loglog_slope(records));
    return 0;
}
