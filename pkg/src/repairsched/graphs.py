"""Structure of the precedence DAG and the parameter regime of an instance."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import ONE, Instance, PrecedenceDag


@dataclass(frozen=True)
class LevelDecomposition:
    levels: tuple

    def level_of(self) -> dict:
        return {j: i for i, lvl in enumerate(self.levels) for j in lvl}

    def __len__(self):
        return len(self.levels)


@dataclass(frozen=True)
class RootedTree:
    root: int
    nodes: frozenset


@dataclass(frozen=True)
class Forest:
    trees: tuple
    k: int


@dataclass(frozen=True)
class Assumption1:
    n: int
    m: tuple


@dataclass(frozen=True)
class RegimeReport:
    dominant_decay: bool
    dominant_repair: bool
    assumption1: Optional[Assumption1] = None

    def to_json(self) -> dict:
        a1 = None
        if self.assumption1 is not None:
            a1 = {"n": self.assumption1.n, "m": list(self.assumption1.m)}
        return {
            "dominant_decay": self.dominant_decay,
            "dominant_repair": self.dominant_repair,
            "assumption1": a1,
        }


def levels(dag: PrecedenceDag) -> LevelDecomposition:
    """Peel sources repeatedly; level i+1 are the sources once levels <= i are gone."""
    indeg = {k: len(dag.in_neighbors[k]) for k in range(1, dag.n + 1)}
    current = sorted(k for k, d in indeg.items() if d == 0)
    out = []
    while current:
        out.append(frozenset(current))
        nxt = []
        for j in current:
            for k in dag.out_neighbors[j]:
                indeg[k] -= 1
                if indeg[k] == 0:
                    nxt.append(k)
        current = sorted(nxt)
    return LevelDecomposition(tuple(out))


def is_complete_series(dag: PrecedenceDag) -> bool:
    # strict reading: exactly the complete bipartite edges between consecutive levels
    lv = levels(dag).levels
    wanted = set()
    for upper, lower in zip(lv, lv[1:]):
        wanted.update((j, k) for j in upper for k in lower)
    return set(dag.edges) == wanted


def as_disjoint_trees(dag: PrecedenceDag) -> Optional[Forest]:
    """Split into out-trees (each node has at most one in-neighbor), or None."""
    ins = dag.in_neighbors
    if any(len(ins[k]) > 1 for k in range(1, dag.n + 1)):
        return None
    # in-degree <= 1 plus acyclicity makes every weak component an out-tree
    trees = []
    for r in range(1, dag.n + 1):
        if ins[r]:
            continue
        members = {r}
        stack = [r]
        while stack:
            j = stack.pop()
            for k in dag.out_neighbors[j]:
                members.add(k)
                stack.append(k)
        trees.append(RootedTree(r, frozenset(members)))
    if sum(len(t.nodes) for t in trees) != dag.n:
        return None
    return Forest(tuple(trees), max(len(t.nodes) for t in trees))


def _integer_ratio(x: Fraction, unit: Fraction) -> Optional[int]:
    q = x / unit
    return int(q) if q.denominator == 1 else None


def classify_regime(instance: Instance) -> RegimeReport:
    ps = instance.params
    n_nodes = len(ps)
    total_dec = sum(p.dec for p in ps)
    dominant_decay = all(p.dec >= p.inc for p in ps)
    dominant_repair = all(
        p.inc > (n_nodes - 1) * p.dec and p.inc > total_dec - p.dec for p in ps
    )

    a1 = None
    inc, dec = ps[0].inc, ps[0].dec
    if all(p.inc == inc and p.dec == dec for p in ps):
        n = _integer_ratio(dec, inc)
        if n is not None and n >= 1:
            ms = [_integer_ratio(ONE - p.v0, inc) for p in ps]
            if all(m is not None and m >= 1 for m in ms):
                a1 = Assumption1(n, tuple(ms))
    return RegimeReport(dominant_decay, dominant_repair, a1)
