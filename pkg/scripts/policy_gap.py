"""Distribution of greedy/optimal reward ratios per graph class.

Prints a small table; useful for seeing how often the worst-case bounds are
approached on random instances.
"""

import argparse
from collections import Counter
from fractions import Fraction

from repairsched.core import reward
from repairsched.harness import GraphClass, corpus_theorem3, corpus_theorem5
from repairsched.policies import HealthiestFirst, LeastModifiedHealthFirst, run_policy
from repairsched.solver import solve_exhaustive, solve_nonjumping


def ratios(corpus, policy, solver):
    out = Counter()
    for _, inst in corpus:
        best = solver(inst).reward
        if best:
            out[Fraction(reward(run_policy(inst, policy)), best)] += 1
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=300)
    args = ap.parse_args()
    rows = []
    for cls in GraphClass:
        if cls is GraphClass.FOREST:
            continue
        corpus = corpus_theorem3(args.seeds, graph_class=cls, include_example=False)
        rows.append((f"healthiest / {cls.value}", ratios(corpus, HealthiestFirst(), solve_nonjumping)))
    for cls in (GraphClass.FOREST, GraphClass.COMPLETE_SERIES):
        corpus = corpus_theorem5(args.seeds, graph_class=cls, include_example=False)
        rows.append((f"least-modified / {cls.value}", ratios(corpus, LeastModifiedHealthFirst(), solve_exhaustive)))
    for label, hist in rows:
        total = sum(hist.values())
        cells = ", ".join(f"{r}: {c}" for r, c in sorted(hist.items()))
        print(f"{label:<28} n={total:<4} min={min(hist)}  [{cells}]")


if __name__ == "__main__":
    main()
