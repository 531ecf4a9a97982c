"""Instances and the discrete-time health dynamics.

Health values, rates and everything derived from them are
:class:`fractions.Fraction`, so the absorbing-state tests ``v == 0`` and
``v == 1`` are exact.  Node identifiers run from 1 to N; a horizon of
``None`` means there is no time constraint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import (
    BadNodeCount,
    CycleDetected,
    DanglingEdge,
    HealthOutOfRange,
    HorizonExceeded,
    InvalidInstance,
    PrecedenceViolation,
    RateOutOfRange,
)

ZERO = Fraction(0)
ONE = Fraction(1)

ACTIVE = "active"
REPAIRED = "repaired"
FAILED = "failed"


def as_fraction(x) -> Fraction:
    """Exact conversion; floats go through their decimal repr so 0.6 means 3/5."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class NodeParams:
    id: int
    v0: Fraction
    inc: Fraction
    dec: Fraction

    @classmethod
    def make(cls, id, v0, inc, dec) -> "NodeParams":
        return cls(int(id), as_fraction(v0), as_fraction(inc), as_fraction(dec))


@dataclass(frozen=True)
class PrecedenceDag:
    n: int
    edges: frozenset

    @classmethod
    def make(cls, n: int, edges: Iterable = ()) -> "PrecedenceDag":
        edge_list = [tuple(int(x) for x in e) for e in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise InvalidInstance("duplicate precedence edge")
        return cls(int(n), edge_set)

    @cached_property
    def in_neighbors(self) -> tuple:
        """``in_neighbors[k]`` is the sorted tuple of in-neighbors of node k (index 0 unused)."""
        ins = [[] for _ in range(self.n + 1)]
        for j, k in self.edges:
            if 1 <= k <= self.n:
                ins[k].append(j)
        return tuple(tuple(sorted(x)) for x in ins)

    @cached_property
    def out_neighbors(self) -> tuple:
        outs = [[] for _ in range(self.n + 1)]
        for j, k in self.edges:
            if 1 <= j <= self.n:
                outs[j].append(k)
        return tuple(tuple(sorted(x)) for x in outs)

    def topological_order(self) -> list:
        """Kahn's algorithm, smallest ready node first; raises CycleDetected."""
        indeg = [len(self.in_neighbors[k]) for k in range(self.n + 1)]
        ready = sorted(k for k in range(1, self.n + 1) if indeg[k] == 0)
        order = []
        while ready:
            j = ready.pop(0)
            order.append(j)
            for k in self.out_neighbors[j]:
                indeg[k] -= 1
                if indeg[k] == 0:
                    ready.append(k)
            ready.sort()
        if len(order) != self.n:
            raise CycleDetected("precedence edges contain a cycle")
        return order

    def ancestors(self, k: int) -> set:
        seen = set()
        stack = list(self.in_neighbors[k])
        while stack:
            j = stack.pop()
            if j not in seen:
                seen.add(j)
                stack.extend(self.in_neighbors[j])
        return seen


@dataclass(frozen=True)
class Instance:
    params: tuple
    dag: PrecedenceDag
    horizon: Optional[int] = None

    @classmethod
    def make(cls, nodes: Sequence, edges: Iterable = (), horizon: Optional[int] = None) -> "Instance":
        """Build and validate from ``(v0, inc, dec)`` triples listed in id order."""
        params = tuple(NodeParams.make(i + 1, *p) for i, p in enumerate(nodes))
        return validate_instance(cls(params, PrecedenceDag.make(len(params), edges), horizon))

    @property
    def n(self) -> int:
        return len(self.params)

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def node(self, j: int) -> NodeParams:
        return self.params[j - 1]

    def initial_state(self) -> "HealthState":
        return HealthState(0, tuple(p.v0 for p in self.params))

    def with_horizon(self, horizon: Optional[int]) -> "Instance":
        return Instance(self.params, self.dag, horizon)


def _status(v: Fraction) -> str:
    if v == ONE:
        return REPAIRED
    if v == ZERO:
        return FAILED
    return ACTIVE


@dataclass(frozen=True)
class HealthState:
    t: int
    values: tuple

    def value(self, j: int) -> Fraction:
        return self.values[j - 1]

    def status(self, j: int) -> str:
        return _status(self.values[j - 1])

    def is_resolved(self, j: int) -> bool:
        v = self.values[j - 1]
        return v == ONE or v == ZERO

    def repaired(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.values, 1) if v == ONE)

    def failed(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.values, 1) if v == ZERO)

    def active(self) -> frozenset:
        return frozenset(j for j, v in enumerate(self.values, 1) if ZERO < v < ONE)


@dataclass(frozen=True)
class Trajectory:
    instance: Instance
    actions: tuple
    states: tuple

    @property
    def final(self) -> HealthState:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.actions)


def validate_instance(raw: Instance) -> Instance:
    n = len(raw.params)
    if n < 2:
        raise BadNodeCount(f"need at least 2 nodes, got {n}")
    if raw.dag.n != n:
        raise BadNodeCount(f"dag has {raw.dag.n} nodes but {n} parameter records")
    for i, p in enumerate(raw.params, 1):
        if p.id != i:
            raise InvalidInstance(f"node ids must be 1..{n} in order; position {i} has id {p.id}")
        if not ZERO < p.v0 < ONE:
            raise HealthOutOfRange(f"node {i}: v0={p.v0} not in (0,1)")
        for name in ("inc", "dec"):
            r = getattr(p, name)
            if not ZERO < r < ONE:
                raise RateOutOfRange(f"node {i}: {name}={r} not in (0,1)")
    for j, k in raw.dag.edges:
        if not (1 <= j <= n and 1 <= k <= n):
            raise DanglingEdge(f"edge ({j},{k}) has an endpoint outside 1..{n}")
        if j == k:
            raise CycleDetected(f"self-loop on node {j}")
    raw.dag.topological_order()
    if raw.horizon is not None and (not isinstance(raw.horizon, int) or raw.horizon < 0):
        raise InvalidInstance(f"horizon must be a nonnegative integer or infinite, got {raw.horizon!r}")
    return raw


def step(instance: Instance, state: HealthState, action: int) -> HealthState:
    out = []
    for p, v in zip(instance.params, state.values):
        if v == ONE or v == ZERO:
            out.append(v)
        elif p.id == action:
            out.append(min(ONE, v + p.inc))
        else:
            out.append(max(ZERO, v - p.dec))
    return HealthState(state.t + 1, tuple(out))


def feasible_set(instance: Instance, state: HealthState) -> frozenset:
    ins = instance.dag.in_neighbors
    vals = state.values
    return frozenset(k for k in instance.nodes if all(vals[j - 1] == ONE for j in ins[k]))


def actionable_set(instance: Instance, state: HealthState) -> frozenset:
    return frozenset(k for k in feasible_set(instance, state) if not state.is_resolved(k))


def simulate(instance: Instance, actions: Sequence[int]) -> Trajectory:
    actions = tuple(int(a) for a in actions)
    if instance.horizon is not None and len(actions) > instance.horizon + 1:
        raise HorizonExceeded(f"{len(actions)} actions exceed the {instance.horizon + 1} available time-steps")
    state = instance.initial_state()
    states = [state]
    for t, a in enumerate(actions):
        if not 1 <= a <= instance.n or a not in feasible_set(instance, state):
            raise PrecedenceViolation(t, a)
        state = step(instance, state, a)
        states.append(state)
    return Trajectory(instance, actions, tuple(states))


def reward(traj: Trajectory) -> int:
    # simulate already caps the action list at T+1, so every later state is t+1 with t <= T
    repaired = set()
    for s in traj.states[1:]:
        repaired.update(j for j, v in enumerate(s.values, 1) if v == ONE)
    start = traj.states[0]
    return len(repaired - {j for j, v in enumerate(start.values, 1) if v == ONE})


def repaired_nodes(traj: Trajectory) -> frozenset:
    start = traj.states[0].repaired()
    return frozenset(traj.final.repaired() - start)


def detect_jumps(traj: Trajectory) -> list:
    jumps = []
    for t in range(1, len(traj.actions)):
        j = traj.actions[t - 1]
        if traj.states[t].value(j) < ONE and traj.actions[t] != j:
            jumps.append(t)
    return jumps


def steps_to_repair(v: Fraction, inc: Fraction) -> int:
    """Number of consecutive targetings that take health ``v`` in (0,1) to 1."""
    q, r = divmod(ONE - v, inc)
    return int(q) + (1 if r else 0)
