"""Exact optimisation oracles, the completion-time recursion and jump removal.

Two exact searches are provided.  :func:`solve_nonjumping` only considers
repair-to-completion orders and searches over "macro" moves; it is the true
optimum whenever every node decays at least as fast as it is repaired.
:func:`solve_exhaustive` searches every feasible per-step action sequence and
is the independent oracle for the former.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    ONE,
    ZERO,
    HealthState,
    Instance,
    Trajectory,
    actionable_set,
    detect_jumps,
    feasible_set,
    repaired_nodes,
    reward,
    simulate,
    step,
    steps_to_repair,
)
from .errors import (
    AssumptionViolated,
    LemmaPreconditionFailed,
    NodeFailsBeforeReached,
    NotSingleJump,
    ShapeMismatch,
    StateBudgetExceeded,
)
from .graphs import classify_regime
from .policies import FixedOrder, run_policy

DEFAULT_STATE_CAP = 10**7


@dataclass(frozen=True)
class SolveResult:
    reward: int
    witness: tuple
    repaired: frozenset
    stats: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "reward": self.reward,
            "witness": list(self.witness),
            "repaired": sorted(self.repaired),
            "stats": dict(self.stats),
        }


def _finish(instance: Instance, witness, stats) -> SolveResult:
    traj = simulate(instance, witness)
    return SolveResult(reward(traj), tuple(witness), repaired_nodes(traj), stats)


# ---------------------------------------------------------------------------
# non-jumping search


def _macro(instance: Instance, values: tuple, j: int):
    """Target ``j`` until repaired; return (duration, new values)."""
    d = steps_to_repair(values[j - 1], instance.node(j).inc)
    out = []
    for p, v in zip(instance.params, values):
        if v == ONE or v == ZERO:
            out.append(v)
        elif p.id == j:
            out.append(ONE)
        else:
            out.append(max(ZERO, v - d * p.dec))
    return d, tuple(out)


def _alive(instance: Instance, values: tuple, ancestors) -> int:
    """Active nodes with no failed ancestor: an upper bound on future repairs."""
    count = 0
    for j in instance.nodes:
        v = values[j - 1]
        if v == ONE or v == ZERO:
            continue
        if all(values[a - 1] != ZERO for a in ancestors[j]):
            count += 1
    return count


def solve_nonjumping(instance: Instance, state_cap: int = DEFAULT_STATE_CAP,
                     start_with: Optional[int] = None) -> SolveResult:
    """Best reward over non-jumping, precedence-respecting sequences.

    Depth-first over macro moves with memoisation on the health vector (plus
    the elapsed time under a finite horizon).  A child is skipped when even
    repairing every node still alive after it cannot beat the best sibling so
    far, which keeps memoised values exact.  Children are tried in increasing
    node order and only strict improvements are kept, so the witness is the
    lexicographically smallest optimal action list.

    ``start_with`` forces the first repaired node (the result then covers
    only sequences that open with it; reward 0 if it cannot be repaired).
    """
    T = instance.horizon
    ancestors = {j: instance.dag.ancestors(j) for j in instance.nodes}
    memo = {}
    stats = {"states_expanded": 0, "memo_hits": 0}

    def best(values, t):
        key = values if T is None else (values, t)
        hit = memo.get(key)
        if hit is not None:
            stats["memo_hits"] += 1
            return hit
        stats["states_expanded"] += 1
        if stats["states_expanded"] > state_cap:
            raise StateBudgetExceeded(f"more than {state_cap} states expanded")
        state = HealthState(t, values)
        bound = _alive(instance, values, ancestors)
        best_val, best_plan = 0, ()
        for j in sorted(actionable_set(instance, state)):
            if best_val >= bound:
                break
            d, nxt = _macro(instance, values, j)
            if T is not None and t + d > T + 1:
                continue
            if 1 + _alive(instance, nxt, ancestors) <= best_val:
                continue
            val, plan = best(nxt, t + d)
            if val + 1 > best_val:
                best_val, best_plan = val + 1, ((j, d),) + plan
        memo[key] = (best_val, best_plan)
        return best_val, best_plan

    start = instance.initial_state()
    if start_with is None:
        _, plan = best(start.values, 0)
    else:
        plan = ()
        if start_with in actionable_set(instance, start):
            d, nxt = _macro(instance, start.values, start_with)
            if T is None or d <= T + 1:
                plan = ((start_with, d),) + best(nxt, d)[1]
    witness = [j for j, d in plan for _ in range(d)]
    return _finish(instance, witness, stats)


def nonjumping_order(witness) -> list:
    """Collapse a per-step action list into its target order."""
    order = []
    for a in witness:
        if not order or order[-1] != a:
            order.append(a)
    return order


# ---------------------------------------------------------------------------
# exhaustive search


def _successors(instance: Instance, state: HealthState):
    """(action, gain, next state) for every distinct move, in action order.

    Targeting any resolved feasible node leaves the same successor (pure
    decay), so one representative idle action stands in for all of them.
    """
    acts = actionable_set(instance, state)
    if not acts:
        return []
    feas = feasible_set(instance, state)
    idle = [j for j in feas if state.is_resolved(j)]
    moves = sorted(acts)
    if idle:
        moves = sorted(moves + [min(idle)])
    out = []
    for a in moves:
        nxt = step(instance, state, a)
        gain = 1 if (state.value(a) < ONE and nxt.value(a) == ONE) else 0
        out.append((a, gain, nxt))
    return out


def solve_exhaustive(instance: Instance, state_cap: int = DEFAULT_STATE_CAP) -> SolveResult:
    """Best reward over every feasible action sequence, jumping or not.

    The reachable state graph (keyed on the health vector, plus time under a
    finite horizon) is explored with an iterative Tarjan pass.  A repair can
    never be undone, so every edge inside a strongly connected component has
    zero gain and all states of a component share one value; values are
    fixed when a component is closed.
    """
    T = instance.horizon
    stats = {"states_expanded": 0, "memo_hits": 0}

    def key_of(s: HealthState):
        return s.values if T is None else (s.values, s.t)

    succ = {}

    def expand(s: HealthState):
        if T is not None and s.t > T:
            return []
        return _successors(instance, s)

    index, low, on_stack = {}, {}, set()
    ext_best = {}
    value = {}
    tarjan_stack = []
    counter = 0

    start = instance.initial_state()
    k0 = key_of(start)

    def visit(k, s):
        nonlocal counter
        stats["states_expanded"] += 1
        if stats["states_expanded"] > state_cap:
            raise StateBudgetExceeded(f"more than {state_cap} states expanded")
        index[k] = low[k] = counter
        counter += 1
        tarjan_stack.append(k)
        on_stack.add(k)
        ext_best[k] = 0
        edges = [(a, g, key_of(n), n) for a, g, n in expand(s)]
        succ[k] = [(a, g, nk) for a, g, nk, _ in edges]
        return iter(edges)

    work = [(k0, visit(k0, start))]
    while work:
        k, it = work[-1]
        advanced = False
        for a, g, nk, ns in it:
            if nk not in index:
                work.append((nk, visit(nk, ns)))
                advanced = True
                break
            stats["memo_hits"] += 1
            if nk in on_stack:
                assert g == 0, "a repair inside a cycle is impossible"
                low[k] = min(low[k], index[nk])
            else:
                ext_best[k] = max(ext_best[k], g + value[nk])
        if advanced:
            continue
        work.pop()
        if low[k] == index[k]:
            comp = []
            while True:
                w = tarjan_stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == k:
                    break
            v = max(ext_best[w] for w in comp)
            for w in comp:
                value[w] = v
        if work:
            parent = work[-1][0]
            if k in on_stack:
                low[parent] = min(low[parent], low[k])
            else:
                for a, g, nk in succ[parent]:
                    if nk == k:
                        ext_best[parent] = max(ext_best[parent], g + value[k])

    witness = _extract_witness(k0, succ, value, finite=T is not None)
    return _finish(instance, witness, stats)


def _extract_witness(k0, succ, value, finite: bool) -> list:
    witness = []
    k = k0
    if finite:
        # acyclic in time: greedy smallest optimal action is lexicographically least
        while value[k] > 0:
            for a, g, nk in succ[k]:
                if g + value[nk] == value[k]:
                    witness.append(a)
                    k = nk
                    break
        return witness
    while value[k] > 0:
        target = value[k]
        prev = {k: None}
        queue = deque([k])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for a, g, nk in succ[u]:
                if g == 1 and 1 + value[nk] == target:
                    found = (u, a, nk)
                    break
                if g == 0 and value[nk] == target and nk not in prev:
                    prev[nk] = (u, a)
                    queue.append(nk)
        u, a, nk = found
        path = [a]
        while prev[u] is not None:
            u, pa = prev[u]
            path.append(pa)
        witness.extend(reversed(path))
        k = nk
    return witness


# ---------------------------------------------------------------------------
# completion-time recursion


@dataclass(frozen=True)
class CompletionSchedule:
    order: tuple
    reached_health: tuple
    durations: tuple
    total: int


def closed_form_completion_times(instance: Instance, order) -> CompletionSchedule:
    """Health on arrival and repair time of each node of a non-jumping order.

    Only valid under homogeneous rates with ``dec = n * inc`` and every
    ``1 - v0`` a whole number of repair steps.  The arrival health follows
    ``E_1 = v0(i_1)`` and ``E_k = v0(i_k) - n * sum_{j<k} (1 - E_j)``.
    """
    a1 = classify_regime(instance).assumption1
    if a1 is None:
        raise AssumptionViolated("rates are not homogeneous integer multiples")
    order = tuple(int(j) for j in order)
    if len(set(order)) != len(order) or any(not 1 <= j <= instance.n for j in order):
        raise ValueError(f"order must list distinct nodes from 1..{instance.n}: {order}")
    seen = set()
    for j in order:
        missing = set(instance.dag.in_neighbors[j]) - seen
        if missing:
            raise ValueError(f"node {j} needs {sorted(missing)} repaired earlier in the order")
        seen.add(j)

    inc = instance.params[0].inc
    reached, durations = [], []
    spent = Fraction(0)
    for k, j in enumerate(order, 1):
        e = instance.node(j).v0 - a1.n * spent
        if e <= 0:
            raise NodeFailsBeforeReached(k, j)
        reached.append(e)
        t_k = (ONE - e) / inc
        assert t_k.denominator == 1
        durations.append(int(t_k))
        spent += ONE - e
    return CompletionSchedule(order, tuple(reached), tuple(durations), sum(durations))


# ---------------------------------------------------------------------------
# jump removal


@dataclass(frozen=True)
class Comparison:
    node: int
    position: int
    t_a: int
    t_b: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.t_a >= self.bound


@dataclass(frozen=True)
class Lemma1Result:
    b_traj: Trajectory
    comparisons: tuple
    order_a: tuple
    order_b: tuple
    k: int
    t_bar: int
    a_length: int

    @property
    def b_non_jumping(self) -> bool:
        return detect_jumps(self.b_traj) == []

    @property
    def b_repairs_all(self) -> bool:
        return len(repaired_nodes(self.b_traj)) == self.b_traj.instance.n

    @property
    def b_no_later(self) -> bool:
        return len(self.b_traj.actions) <= self.a_length

    @property
    def ok(self) -> bool:
        return (
            self.b_non_jumping
            and self.b_repairs_all
            and self.b_no_later
            and all(c.holds for c in self.comparisons)
        )


def _runs(actions) -> list:
    runs = []
    for a in actions:
        if runs and runs[-1][0] == a:
            runs[-1][1] += 1
        else:
            runs.append([a, 1])
    return runs


def lemma1_transform(instance: Instance, traj: Trajectory) -> Lemma1Result:
    """Remove the single jump of a repair-everything sequence.

    ``traj`` must look like: target ``i_1`` for ``t_bar`` steps, repair
    ``i_2 .. i_k`` fully, return to ``i_1`` and finish it, then repair
    ``i_{k+1} .. i_N``.  The non-jumping sequence visits
    ``i_2 .. i_k, i_1, i_{k+1} .. i_N``.  Durations count every step a node is
    targeted, so for ``i_1`` the partial visit is included.
    """
    if not classify_regime(instance).dominant_decay:
        raise LemmaPreconditionFailed("needs dec >= inc at every node")
    jumps = detect_jumps(traj)
    if len(jumps) != 1:
        raise NotSingleJump(f"expected exactly one jump, found {len(jumps)}")
    if len(repaired_nodes(traj)) != instance.n:
        raise LemmaPreconditionFailed("sequence does not repair every node")

    runs = _runs(traj.actions)
    t = 0
    for r, (j, length) in enumerate(runs):
        if traj.states[t].is_resolved(j):
            raise ShapeMismatch(f"run {r} targets node {j} after it is resolved")
        t += length
    if len(runs) != instance.n + 1:
        raise ShapeMismatch(f"expected {instance.n + 1} runs, found {len(runs)}")
    i1, t_bar = runs[0]
    returns = [r for r in range(1, len(runs)) if runs[r][0] == i1]
    if len(returns) != 1 or returns[0] < 2:
        raise ShapeMismatch("the first node must be resumed after at least one other node")
    k = returns[0]
    rest = [j for j, _ in runs[1:]]
    if sorted(rest) != list(instance.nodes):
        raise ShapeMismatch("runs after the jump must visit every node exactly once")

    detour = [j for j, _ in runs[1:k]]
    tail = [j for j, _ in runs[k + 1:]]
    order_a = (i1, *detour, *tail)
    order_b = (*detour, i1, *tail)
    b = run_policy(instance, FixedOrder(order_b))

    def durations(actions):
        out = {}
        for a in actions:
            out[a] = out.get(a, 0) + 1
        return out

    da, db = durations(traj.actions), durations(b.actions)
    comps = []
    for pos, j in enumerate(order_a, 1):
        if pos == 1:
            extra = (2 ** (k - 1) - 2) * t_bar
        elif pos <= k:
            extra = 2 ** (pos - 2) * t_bar
        else:
            # integer form of (2^{j-1} - 2^{j-k}) since j > k
            extra = (2 ** (pos - 1) - 2 ** (pos - k)) * t_bar
        comps.append(Comparison(j, pos, da.get(j, 0), db.get(j, 0), db.get(j, 0) + extra))
    return Lemma1Result(b, tuple(comps), order_a, order_b, k, t_bar, len(traj.actions))


@dataclass(frozen=True)
class StripResult:
    trajectory: Trajectory
    fallback: bool
    rounds: int


def _rebuild(instance: Instance, runs) -> Optional[Trajectory]:
    """Replay run descriptors ``[node, length, complete]``; None if precedence breaks."""
    state = instance.initial_state()
    actions = []
    T = instance.horizon

    def room():
        return T is None or state.t <= T

    for j, length, complete in runs:
        if state.is_resolved(j):
            continue
        if j not in feasible_set(instance, state):
            return None
        done = 0
        while room() and not state.is_resolved(j) and (complete or done < length):
            state = step(instance, state, j)
            actions.append(j)
            done += 1
    return simulate(instance, actions)


def _labelled_runs(traj: Trajectory) -> list:
    runs = []
    t = 0
    for j, length in _runs(traj.actions):
        end = traj.states[t + length]
        runs.append([j, length, end.value(j) == ONE])
        t += length
    return runs


def _merge(runs) -> list:
    out = []
    for j, length, complete in runs:
        if out and out[-1][0] == j:
            out[-1][1] += length
            out[-1][2] = out[-1][2] or complete
        else:
            out.append([j, length, complete])
    return out


def strip_all_jumps(instance: Instance, traj: Trajectory) -> StripResult:
    """Turn ``traj`` into a non-jumping trajectory with at least its reward.

    Each round drops one wasted partial visit.  The first choice is the
    innermost partial visit that is resumed after only complete repairs (the
    single-jump pattern); failing that, a partial visit that is never resumed.
    If a round loses reward or no rule applies, the exact non-jumping optimum
    is returned instead and ``fallback`` is set.
    """
    target = reward(traj)
    current = traj
    rounds = 0
    while detect_jumps(current):
        rounds += 1
        runs = _labelled_runs(current)
        candidate = None
        best_gap = None
        for r in range(len(runs) - 1):
            j, _, complete = runs[r]
            if complete:
                continue
            for s in range(r + 1, len(runs)):
                if runs[s][0] == j:
                    if all(runs[m][2] for m in range(r + 1, s)):
                        gap = s - r
                        if best_gap is None or gap < best_gap:
                            best_gap, candidate = gap, r
                    break
        if candidate is None:
            for r in range(len(runs) - 1):
                j, _, complete = runs[r]
                if not complete and all(runs[s][0] != j for s in range(r + 1, len(runs))):
                    candidate = r
                    break
        rebuilt = None
        if candidate is not None:
            rebuilt = _rebuild(instance, _merge(runs[:candidate] + runs[candidate + 1:]))
        if rebuilt is None or reward(rebuilt) < target:
            sol = solve_nonjumping(instance)
            return StripResult(simulate(instance, sol.witness), True, rounds)
        current = rebuilt
    return StripResult(current, False, rounds)


def order_duration_check(instance: Instance, order) -> Optional[int]:
    """Steps a non-jumping visit of ``order`` takes, or None if a node dies first.

    Independent of the recursion above: plain replay through ``step``.
    """
    state = instance.initial_state()
    for j in order:
        if state.value(j) == ZERO:
            return None
        while state.value(j) < ONE:
            state = step(instance, state, j)
    return state.t
