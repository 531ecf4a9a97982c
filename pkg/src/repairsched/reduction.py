"""Clique to repair-scheduling reduction and the oracles on both sides."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import Instance, NodeParams, PrecedenceDag, validate_instance
from .errors import BadP, InvalidInstance
from .solver import solve_nonjumping

ROOT = "root"
VNODE = "v"
ENODE = "e"


@dataclass(frozen=True)
class UndirectedGraph:
    s: int
    edge_list: frozenset

    @classmethod
    def make(cls, s: int, edges=()) -> "UndirectedGraph":
        es = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise InvalidInstance(f"self-loop on vertex {a}")
            if not (1 <= a <= s and 1 <= b <= s):
                raise InvalidInstance(f"edge ({a},{b}) outside 1..{s}")
            es.add((min(a, b), max(a, b)))
        return cls(int(s), frozenset(es))

    @property
    def q(self) -> int:
        return len(self.edge_list)

    def sorted_edges(self) -> list:
        return sorted(self.edge_list)


@dataclass(frozen=True)
class ReductionOutput:
    instance: Instance
    z: int
    roles: dict  # node id -> ("root",) | ("v", vertex) | ("e", (a, b))

    @property
    def threshold(self) -> int:
        return self.instance.n - self.z


def gadget_deadline(exponent: int) -> int:
    """Steps until an untouched gadget node fails: 2(2^e - 1) + 1."""
    return 2 * (2**exponent - 1) + 1


def _gadget_params(node_id: int, exponent: int) -> NodeParams:
    gamma = gadget_deadline(exponent)
    rate = Fraction(1, gamma + 2)
    return NodeParams(node_id, Fraction(gamma, gamma + 2), rate, rate)


def reduce_clique(graph: UndirectedGraph, p: int) -> ReductionOutput:
    """Build the decision instance: root = node 1, vertices next, then edges.

    The root precedes every other node and each edge node additionally waits
    for its two endpoint vertices.  Root and vertex nodes share the deadline
    exponent ``s + q``, edge nodes use ``p(p+1)/2``.
    """
    if not 1 <= p <= graph.s:
        raise BadP(f"p={p} must lie in 1..{graph.s}")
    s, edges = graph.s, graph.sorted_edges()
    q = len(edges)
    big = s + q
    small = p * (p + 1) // 2

    params = [_gadget_params(1, big)]
    roles = {1: (ROOT,)}
    vnode = {}
    for v in range(1, s + 1):
        nid = len(params) + 1
        params.append(_gadget_params(nid, big))
        roles[nid] = (VNODE, v)
        vnode[v] = nid
    dag_edges = []
    for a, b in edges:
        nid = len(params) + 1
        params.append(_gadget_params(nid, small))
        roles[nid] = (ENODE, (a, b))
        dag_edges += [(vnode[a], nid), (vnode[b], nid)]
    n = len(params)
    dag_edges += [(1, k) for k in range(2, n + 1)]
    inst = Instance(tuple(params), PrecedenceDag.make(n, dag_edges), None)
    validate_instance(inst)
    return ReductionOutput(inst, q - p * (p - 1) // 2, roles)


def decide_ord(red: ReductionOutput) -> bool:
    # dec == inc everywhere, so the non-jumping optimum is the true optimum
    return solve_nonjumping(red.instance).reward >= red.threshold


def brute_force_clique(graph: UndirectedGraph, p: int) -> bool:
    for subset in combinations(range(1, graph.s + 1), p):
        if all(pair in graph.edge_list for pair in combinations(subset, 2)):
            return True
    return False


def all_graphs(s: int):
    """Every labelled simple graph on vertices 1..s."""
    pairs = list(combinations(range(1, s + 1), 2))
    for mask in range(1 << len(pairs)):
        yield UndirectedGraph(s, frozenset(pr for i, pr in enumerate(pairs) if mask >> i & 1))
