"""Classify the hyperelliptic family at alpha = 1/2 for a few beta values.

Prints the monotonicity verdict, the necessary-condition status and the
numerically located critical periods side by side.
"""
import sys
from fractions import Fraction

from periodscope import registry
from periodscope.criteria import classify, necessary_monotone_check
from periodscope.potential import annulus

DEFAULT = ["7/5", "-7/5", "-1", "1/2"]


def main(argv):
    for text in argv or DEFAULT:
        p = registry.hyperelliptic(Fraction(text), Fraction(1, 2))
        ann = annulus(p)
        loud = necessary_monotone_check(p, ann)
        rep = classify(p)
        crit = ", ".join(f"{c.type}@{c.h:.4g}" for c in rep.critical_energies) or "none"
        print(f"beta={text:>6}  {rep.classification:<28} loud={loud.status:<26} scan: {crit}")


if __name__ == "__main__":
    main(sys.argv[1:])
