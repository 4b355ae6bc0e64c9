"""Out-degrees along the a-spine of the difference spec in both composition modes.

With sequential composition the degree grows without bound; with sequencing
it stays at most two, matching the counter.

Usage: python3 scripts/branching_evidence.py [--depth 10]
"""

import argparse

from pdaproc import corpus
from pdaproc.core import Action
from pdaproc.semantics import Bounds, explore


def spine(name: str, depth: int) -> list[int]:
    lts = explore(corpus.load(name), Bounds(depth))
    succ = lts.successors()
    s, out = lts.root, []
    for _ in range(depth):
        out.append(len(succ[s]))
        nxt = [t for x, t in succ[s] if x == Action("a")]
        if not nxt:
            break
        s = max(nxt, key=lambda t: lts.depth[t])
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=10)
    args = ap.parse_args()
    print("seq  (·):", spine("difference_seq.pspec", args.depth))
    print("seqc (;):", spine("difference.pspec", args.depth))


if __name__ == "__main__":
    main()
