"""Check every axiom against the stateless-bisimulation oracle.

Usage: python3 scripts/axiom_soundness.py [--n 200] [--seed 0]
"""

import argparse

from pdaproc.rewrite import axioms_for, check_axiom


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'mode':5} {'axiom':6} {'checked':>7} {'failed':>6} {'rejected':>8} {'rejected+differ':>15}")
    for mode in ("seqc", "seq"):
        ids = axioms_for(mode) + (["A4"] if mode == "seqc" else [])
        for ax in ids:
            r = check_axiom(ax, mode, n=args.n, seed=args.seed, allow_unsound=ax not in axioms_for(mode))
            print(f"{mode:5} {ax:6} {r.checked:7} {len(r.failures):6} {r.rejected:8} {r.unconditioned_failures:15}")


if __name__ == "__main__":
    main()
