"""Write plot data (h, T) for several potentials via the CLI.

    python scripts/period_curves.py out.dat hyperelliptic:beta=-1 odd-quintic:k=-2
"""
import sys

from periodscope.cli import main

if __name__ == "__main__":
    out, *names = sys.argv[1:] or ["period_curves.dat"]
    names = names or ["hyperelliptic:beta=-1", "odd-quintic:k=-2", "cubic-soft"]
    args = ["period-table", "--format", "plotdata", "--out", out]
    for n in names:
        args += ["--named", n]
    sys.exit(main(args))
