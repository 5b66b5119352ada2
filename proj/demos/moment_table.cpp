// Prints closed-form vs quadrature-evaluated moments for a few operator
// specs, the quickest way to see the library working.

#include <cstdio>

#include "bss/bss.hpp"

int main() {
    using namespace bss;
    std::printf("%-10s %4s %3s %6s | %-12s %-12s %-10s\n",
                "variant", "n", "p", "x", "e1_closed", "e1_numeric", "disc");
    for (const Variant v : {Variant::classical, Variant::stancu}) {
        OperatorSpec spec;
        spec.variant = v;
        spec.n = 10;
        spec.p = 2;
        if (v == Variant::stancu) { spec.alpha = 1.0; spec.beta = 2.0; }
        for (const double x : {0.0, 0.5, 2.0}) {
            const MomentReport rep = closed_moments(spec, x);
            std::printf("%-10s %4d %3d %6.2f | %-12.8f %-12.8f %-10.2e\n",
                        to_string(spec.variant), spec.n, spec.p, x, rep.e1,
                        rep.numeric_e1, rep.max_rel_discrepancy);
        }
    }

    QOperatorSpec qs;
    qs.n = 4;
    qs.p = 1;
    qs.ctx = QContext::for_q(0.9);
    const MomentReport qrep = q_moments(qs, 1.0);
    std::printf("\nq-operator (n=4, p=1, q=0.9, x=1): e1=%.8f numeric=%.8f disc=%.2e\n",
                qrep.e1, qrep.numeric_e1, qrep.max_rel_discrepancy);
    return 0;
}
