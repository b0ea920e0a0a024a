"""Balance zeros and critical periods of g = x (x + 1) (x^2 + beta x + alpha).

    python scripts/two_critical_periods.py [beta] [alpha]
"""
import sys
from fractions import Fraction

from periodscope import registry
from periodscope.criteria import build_sas, classify, count_balance_zeros
from periodscope.potential import annulus


def main(argv):
    beta = Fraction(argv[0]) if argv else Fraction(-1)
    alpha = Fraction(argv[1]) if len(argv) > 1 else Fraction(1, 2)
    p = registry.hyperelliptic(beta, alpha)
    ann = annulus(p)
    sas = build_sas(p, ann)
    bc = count_balance_zeros(p, ann)
    print(f"g = {p.poly}")
    print(f"deg U = {sas.U.total_degree}, deg Psi = {sas.Psi.total_degree}")
    for b in bc.boxes:
        x, z = b.center
        print(f"  balance zero near x = {x:.10f}, sigma(x) = {z:.10f}")
    rep = classify(p)
    print(rep.summary)
    for c in rep.critical_energies:
        print(f"  {c.type} at h = {c.h:.10g}, T = {c.T:.12g}")


if __name__ == "__main__":
    main(sys.argv[1:])
