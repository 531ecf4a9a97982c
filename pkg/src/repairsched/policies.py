"""Greedy feedback policies and the runner that unrolls them into trajectories."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    ZERO,
    HealthState,
    Instance,
    Trajectory,
    actionable_set,
    feasible_set,
    step,
)
from .errors import PrecedenceViolation


def healthiest_first(instance: Instance, state: HealthState) -> Optional[int]:
    """Largest health among actionable nodes; smallest id on ties."""
    cands = actionable_set(instance, state)
    if not cands:
        return None
    return min(cands, key=lambda j: (-state.value(j), j))


def least_modified_health_first(instance: Instance, state: HealthState) -> Optional[int]:
    """Smallest ``health - dec`` among actionable nodes; smallest id on ties."""
    cands = actionable_set(instance, state)
    if not cands:
        return None
    return min(cands, key=lambda j: (state.value(j) - instance.node(j).dec, j))


@dataclass(frozen=True)
class HealthiestFirst:
    name = "healthiest"

    def __call__(self, instance, state):
        return healthiest_first(instance, state)


@dataclass(frozen=True)
class LeastModifiedHealthFirst:
    name = "least-modified"

    def __call__(self, instance, state):
        return least_modified_health_first(instance, state)


def blocked_forever(instance: Instance, state: HealthState, j: int) -> bool:
    """True if some ancestor of ``j`` has failed, so ``j`` can never become feasible."""
    return any(state.value(a) == ZERO for a in instance.dag.ancestors(j))


@dataclass(frozen=True)
class FixedOrder:
    """Repair the listed nodes one after another, each until it is resolved.

    Nodes that are already resolved when their turn comes, or that can never
    be unlocked because an ancestor failed, are skipped.  Unlisted nodes are
    never targeted.
    """

    order: tuple
    name = "order"

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(j) for j in self.order))
        if len(set(self.order)) != len(self.order):
            raise ValueError(f"order repeats a node: {self.order}")

    def __call__(self, instance, state):
        for j in self.order:
            if not 1 <= j <= instance.n:
                raise ValueError(f"order names node {j} outside 1..{instance.n}")
            if state.is_resolved(j) or blocked_forever(instance, state, j):
                continue
            if j not in feasible_set(instance, state):
                raise PrecedenceViolation(state.t, j)
            return j
        return None


Policy = Union[HealthiestFirst, LeastModifiedHealthFirst, FixedOrder]


def policy_from_name(name: str, order=None) -> Policy:
    if name in ("healthiest", "healthiest-first"):
        return HealthiestFirst()
    if name in ("least-modified", "least-modified-health-first"):
        return LeastModifiedHealthFirst()
    if name == "order":
        if not order:
            raise ValueError("policy 'order' needs a node order")
        return FixedOrder(tuple(order))
    raise ValueError(f"unknown policy {name!r}")


def run_policy(instance: Instance, policy) -> Trajectory:
    """Query the policy each time-step until it returns None or time runs out.

    ``policy`` is any callable ``(instance, state) -> node | None``.  Without a
    horizon a policy can cycle (two nodes alternating when ``inc == dec``);
    the dynamics are deterministic, so a repeated health vector means nothing
    new can ever be repaired and the run stops there.
    """
    state = instance.initial_state()
    actions = []
    states = [state]
    seen = set()
    while instance.horizon is None or state.t <= instance.horizon:
        if instance.horizon is None:
            if state.values in seen:
                break
            seen.add(state.values)
        a = policy(instance, state)
        if a is None:
            break
        if a not in feasible_set(instance, state):
            raise PrecedenceViolation(state.t, a)
        state = step(instance, state, a)
        actions.append(a)
        states.append(state)
    return Trajectory(instance, tuple(actions), tuple(states))
