"""Seeded instance generation and the batch verification suites.

Every suite takes a corpus, a list of ``(label, instance)`` pairs, and
returns a :class:`SuiteReport`.  A violation is a counterexample to the
property under test, never a statistic to be tolerated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .core import (
    ONE,
    ZERO,
    Instance,
    NodeParams,
    PrecedenceDag,
    detect_jumps,
    reward,
    simulate,
    step,
    steps_to_repair,
    validate_instance,
)
from .errors import InfeasibleConfig, NodeFailsBeforeReached, RegimeMismatch
from .graphs import as_disjoint_trees, classify_regime, is_complete_series
from .policies import FixedOrder, HealthiestFirst, LeastModifiedHealthFirst, run_policy
from .reduction import all_graphs, brute_force_clique, decide_ord, reduce_clique
from .solver import (
    closed_form_completion_times,
    lemma1_transform,
    nonjumping_order,
    order_duration_check,
    solve_exhaustive,
    solve_nonjumping,
)


class GraphClass(str, Enum):
    GENERAL_DAG = "dag"
    FOREST = "forest"
    COMPLETE_SERIES = "series"
    EDGELESS = "edgeless"


class Regime(str, Enum):
    DOMINANT_DECAY_A1 = "decay-a1"
    DOMINANT_DECAY = "decay"
    DOMINANT_REPAIR = "repair"


@dataclass(frozen=True)
class GenConfig:
    n: int
    graph_class: GraphClass = GraphClass.GENERAL_DAG
    regime: Regime = Regime.DOMINANT_DECAY_A1
    rate_grid_denominator: int = 10
    horizon: Optional[int] = None
    seed: int = 0
    max_tree_size: int = 2
    edge_prob: float = 0.35
    # initial healths are drawn from grid points strictly above this floor
    health_floor: Fraction = Fraction(0)
    # caps dec/inc in the dominant-decay regimes
    max_decay_multiple: Optional[int] = None


@dataclass
class SuiteReport:
    suite: str
    instances: int = 0
    violations: list = field(default_factory=list)
    min_observed_ratio: Optional[Fraction] = None
    skipped: int = 0
    notes: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def observe_ratio(self, r: Fraction):
        if self.min_observed_ratio is None or r < self.min_observed_ratio:
            self.min_observed_ratio = r

    def merge(self, other: "SuiteReport") -> "SuiteReport":
        out = SuiteReport(self.suite)
        out.instances = self.instances + other.instances
        out.violations = self.violations + other.violations
        out.skipped = self.skipped + other.skipped
        out.notes = self.notes + other.notes
        out.records = self.records + other.records
        for r in (self.min_observed_ratio, other.min_observed_ratio):
            if r is not None:
                out.observe_ratio(r)
        return out

    def to_json(self) -> dict:
        r = self.min_observed_ratio
        return {
            "suite": self.suite,
            "instances": self.instances,
            "violations": self.violations,
            "min_observed_ratio": None if r is None else str(r),
            "skipped": self.skipped,
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# generation


def _random_graph(rng: random.Random, cfg: GenConfig) -> list:
    nodes = list(range(1, cfg.n + 1))
    rng.shuffle(nodes)
    if cfg.graph_class is GraphClass.EDGELESS:
        return []
    if cfg.graph_class is GraphClass.GENERAL_DAG:
        return [
            (nodes[i], nodes[j])
            for i in range(cfg.n)
            for j in range(i + 1, cfg.n)
            if rng.random() < cfg.edge_prob
        ]
    if cfg.graph_class is GraphClass.FOREST:
        edges = []
        i = 0
        while i < cfg.n:
            size = rng.randint(1, min(cfg.max_tree_size, cfg.n - i))
            tree = nodes[i:i + size]
            for pos in range(1, size):
                edges.append((tree[rng.randrange(pos)], tree[pos]))
            i += size
        return edges
    if cfg.graph_class is GraphClass.COMPLETE_SERIES:
        cuts = sorted(rng.sample(range(1, cfg.n), rng.randint(0, cfg.n - 1)))
        bounds = [0, *cuts, cfg.n]
        lvls = [nodes[a:b] for a, b in zip(bounds, bounds[1:])]
        return [(j, k) for up, lo in zip(lvls, lvls[1:]) for j in up for k in lo]
    raise ValueError(cfg.graph_class)


def _random_rates(rng: random.Random, cfg: GenConfig) -> list:
    d, n = cfg.rate_grid_denominator, cfg.n
    if d < 2:
        raise InfeasibleConfig("rate grid denominator must be at least 2")
    lo = int(cfg.health_floor * d) + 1
    if lo > d - 1:
        raise InfeasibleConfig(f"no grid health above {cfg.health_floor} on the 1/{d} grid")
    cap = cfg.max_decay_multiple or d

    def health():
        return Fraction(rng.randint(lo, d - 1), d)

    if cfg.regime is Regime.DOMINANT_DECAY_A1:
        inc = Fraction(1, d)
        mult = rng.randint(1, min(cap, d - 1))
        return [(1 - rng.randint(1, d - lo) * inc, inc, mult * inc) for _ in range(n)]
    if cfg.regime is Regime.DOMINANT_DECAY:
        out = []
        for _ in range(n):
            a = rng.randint(1, d - 1)
            b = rng.randint(a, min(d - 1, cap * a))
            out.append((health(), Fraction(a, d), Fraction(b, d)))
        return out
    if cfg.regime is Regime.DOMINANT_REPAIR:
        if d < n + 1:
            raise InfeasibleConfig(f"denominator {d} too coarse for {n} dominant-repair nodes")
        for _ in range(200):
            top = max(1, (d - 2) // n)
            decs = [rng.randint(1, top) for _ in range(n)]
            total = sum(decs)
            lows = [max((n - 1) * a, total - a) + 1 for a in decs]
            if max(lows) > d - 1:
                continue
            return [
                (health(), Fraction(rng.randint(low, d - 1), d), Fraction(a, d))
                for a, low in zip(decs, lows)
            ]
        raise InfeasibleConfig(f"no dominant-repair rates found on the 1/{d} grid")
    raise ValueError(cfg.regime)


def generate_random_instance(cfg: GenConfig) -> Instance:
    """Deterministic in ``cfg.seed``; the result is checked against the request."""
    if cfg.n < 2:
        raise InfeasibleConfig("need at least 2 nodes")
    if cfg.graph_class is GraphClass.FOREST and cfg.max_tree_size < 1:
        raise InfeasibleConfig("trees need at least one node")
    rng = random.Random(cfg.seed)
    edges = _random_graph(rng, cfg)
    rates = _random_rates(rng, cfg)
    params = tuple(NodeParams(i, v0, inc, dec) for i, (v0, inc, dec) in enumerate(rates, 1))
    inst = validate_instance(Instance(params, PrecedenceDag.make(cfg.n, edges), cfg.horizon))

    report = classify_regime(inst)
    if cfg.regime is Regime.DOMINANT_DECAY_A1:
        assert report.assumption1 is not None
    elif cfg.regime is Regime.DOMINANT_DECAY:
        assert report.dominant_decay
    else:
        assert report.dominant_repair
    if cfg.graph_class is GraphClass.FOREST:
        forest = as_disjoint_trees(inst.dag)
        assert forest is not None and forest.k <= cfg.max_tree_size
    elif cfg.graph_class is GraphClass.COMPLETE_SERIES:
        assert is_complete_series(inst.dag)
    elif cfg.graph_class is GraphClass.EDGELESS:
        assert not inst.dag.edges
    return inst


# ---------------------------------------------------------------------------
# reference instances


def example1(horizon=None) -> Instance:
    return Instance.make([("3/5", "1/10", "1/10"), ("3/10", "1/10", "1/10"), ("4/5", "1/10", "1/10")], [(2, 3)], horizon)


def example2(horizon=None) -> Instance:
    return Instance.make([("1/100", "1/4", "1/10"), ("1/50", "1/4", "1/10"), ("4/5", "1/4", "1/10")], [(2, 3)], horizon)


def example3(horizon=10) -> Instance:
    return Instance.make([("1/100", "11/100", "1/10"), ("11/100", "11/100", "1/10")], [], horizon)


# ---------------------------------------------------------------------------
# suites


def _ratio(got: int, best: int) -> Optional[Fraction]:
    return Fraction(got, best) if best else None


def suite_theorem1(corpus) -> SuiteReport:
    """Exhaustive optimum equals the non-jumping optimum when decay dominates."""
    rep = SuiteReport("theorem1")
    for label, inst in corpus:
        if not classify_regime(inst).dominant_decay:
            raise RegimeMismatch(f"{label}: not in the dominant-decay regime")
        ex = solve_exhaustive(inst).reward
        nj = solve_nonjumping(inst).reward
        rep.instances += 1
        rep.records.append((label, ex, nj))
        if ex != nj:
            rep.violations.append({"instance": label, "exhaustive": ex, "nonjumping": nj})
    return rep


def suite_theorem3(corpus) -> SuiteReport:
    """Healthiest-first is 1/2-optimal, and optimal on edgeless or complete-series graphs."""
    rep = SuiteReport("theorem3")
    for label, inst in corpus:
        if classify_regime(inst).assumption1 is None:
            raise RegimeMismatch(f"{label}: homogeneous integer-multiple rates required")
        traj = run_policy(inst, HealthiestFirst())
        got = reward(traj)
        best = solve_nonjumping(inst).reward
        exact = not inst.dag.edges or is_complete_series(inst.dag)
        rep.instances += 1
        r = _ratio(got, best)
        rep.records.append((label, got, best, exact))
        if r is not None:
            rep.observe_ratio(r)
        if 2 * got < best:
            rep.violations.append({"instance": label, "kind": "half-bound", "greedy": got, "optimum": best})
        if exact and got != best:
            rep.violations.append({"instance": label, "kind": "exactness", "greedy": got, "optimum": best})
        if detect_jumps(traj):
            rep.violations.append({"instance": label, "kind": "greedy-jumped", "jumps": detect_jumps(traj)})
    return rep


def suite_theorem5(corpus) -> SuiteReport:
    """Least-modified-health-first is 1/k-optimal on forests of trees of size <= k."""
    rep = SuiteReport("theorem5")
    for label, inst in corpus:
        if not classify_regime(inst).dominant_repair:
            raise RegimeMismatch(f"{label}: not in the dominant-repair regime")
        if inst.horizon is not None:
            rep.skipped += 1
            rep.notes.append(f"{label}: finite horizon, outside the bound's scope")
            continue
        forest = as_disjoint_trees(inst.dag)
        series = is_complete_series(inst.dag)
        if forest is None and not series:
            raise RegimeMismatch(f"{label}: graph is neither a forest nor complete series")
        got = reward(run_policy(inst, LeastModifiedHealthFirst()))
        best = solve_exhaustive(inst).reward
        rep.instances += 1
        k = forest.k if forest is not None else None
        rep.records.append((label, got, best, k, series))
        r = _ratio(got, best)
        if r is not None:
            rep.observe_ratio(r)
        if forest is not None and forest.k * got < best:
            rep.violations.append({"instance": label, "kind": "1/k-bound", "k": forest.k, "policy": got, "optimum": best})
        if series and got != best:
            rep.violations.append({"instance": label, "kind": "complete-series-exactness", "policy": got, "optimum": best})
    return rep


def suite_lemma1(cases) -> SuiteReport:
    """``cases`` holds ``(label, instance, single-jump action list)`` triples."""
    rep = SuiteReport("lemma1")
    for label, inst, actions in cases:
        res = lemma1_transform(inst, simulate(inst, actions))
        rep.instances += 1
        rep.records.append((label, res))
        if not res.ok:
            rep.violations.append({
                "instance": label,
                "non_jumping": res.b_non_jumping,
                "repairs_all": res.b_repairs_all,
                "no_later": res.b_no_later,
                "failed_bounds": [(c.node, c.t_a, c.bound) for c in res.comparisons if not c.holds],
            })
    return rep


def suite_lemma2(corpus) -> SuiteReport:
    """Repairing a healthier source first costs at most one repaired node.

    For each source ``f`` the best non-jumping sequence that starts with
    ``f`` plays the role of sequence A; every source healthier than ``f``
    is tried as the node moved to the front.
    """
    rep = SuiteReport("lemma2")
    for label, inst in corpus:
        if classify_regime(inst).assumption1 is None:
            raise RegimeMismatch(f"{label}: homogeneous integer-multiple rates required")
        rep.instances += 1
        sources = [j for j in inst.nodes if not inst.dag.in_neighbors[j]]
        checked = 0
        for f in sources:
            eligible = [h for h in sources if inst.node(h).v0 > inst.node(f).v0]
            if not eligible:
                continue
            sol = solve_nonjumping(inst, start_with=f)
            order_a = nonjumping_order(sol.witness)
            if not order_a:
                continue
            for h in eligible:
                order_b = (h, *[j for j in order_a if j != h])
                got = reward(run_policy(inst, FixedOrder(order_b)))
                checked += 1
                rep.records.append((label, f, h, sol.reward, got))
                if got < sol.reward - 1:
                    rep.violations.append({"instance": label, "h": h, "order_a": order_a, "x": sol.reward, "b_reward": got})
        if not checked:
            rep.skipped += 1
    return rep


def suite_completion(cases) -> SuiteReport:
    """Closed-form completion times against a plain replay of the same order.

    ``cases`` holds ``(label, instance, order)`` triples.  The recursion must
    raise exactly when the replay finds a node already failed on arrival,
    and otherwise predict the replay's step count.
    """
    rep = SuiteReport("completion")
    for label, inst, order in cases:
        replay = order_duration_check(inst, order)
        try:
            total = closed_form_completion_times(inst, order).total
        except NodeFailsBeforeReached:
            total = None
        rep.instances += 1
        rep.records.append((label, tuple(order), total, replay))
        if total != replay:
            rep.violations.append({"instance": label, "order": list(order), "closed_form": total, "replay": replay})
    return rep


def suite_reduction(max_s: int = 4) -> SuiteReport:
    """Clique answer equals the reduction's answer on every small graph."""
    rep = SuiteReport("reduction")
    for s in range(1, max_s + 1):
        for g in all_graphs(s):
            for p in range(1, s + 1):
                red = reduce_clique(g, p)
                sol = solve_nonjumping(red.instance)
                via = sol.reward >= red.threshold
                truth = brute_force_clique(g, p)
                label = f"s={s} edges={sorted(g.edge_list)} p={p}"
                rep.instances += 1
                rep.records.append((label, via, truth))
                if via != decide_ord(red) or via != truth:
                    rep.violations.append({"instance": label, "ord": via, "clique": truth})
                runs = [len(list(grp)) for grp in _group(sol.witness)]
                if via and runs != [2**i for i in range(1, len(runs) + 1)]:
                    rep.violations.append({"instance": label, "kind": "doubling", "durations": runs})
    return rep


def _group(actions):
    out = []
    for a in actions:
        if out and out[-1][0] == a:
            out[-1].append(a)
        else:
            out.append([a])
    return out


# ---------------------------------------------------------------------------
# corpora


def _seeded(seed_base: int, i: int) -> random.Random:
    return random.Random(seed_base * 1_000_003 + i)


def _shape(rng: random.Random) -> dict:
    # half the draws lean towards healthy, slowly decaying nodes so that
    # optima above one repair are common
    if rng.random() < 0.5:
        return {}
    return {"health_floor": Fraction(1, 2), "max_decay_multiple": rng.choice([1, 2])}


def corpus_theorem1(seeds: int, seed_base: int = 0) -> list:
    out = []
    for i in range(seeds):
        rng = _seeded(seed_base, i)
        n = rng.randint(2, 4)
        d = rng.randint(3, 6)
        regime = rng.choice([Regime.DOMINANT_DECAY, Regime.DOMINANT_DECAY_A1])
        horizon = None if i % 2 == 0 else rng.randint(0, 3 * d)
        cfg = GenConfig(n, GraphClass.GENERAL_DAG, regime, d, horizon, rng.getrandbits(63), **_shape(rng))
        out.append((f"t1-{seed_base}-{i}", generate_random_instance(cfg)))
    return out


def corpus_theorem3(seeds: int, seed_base: int = 0, graph_class: GraphClass = GraphClass.GENERAL_DAG,
                    finite: Optional[bool] = None, include_example: bool = True) -> list:
    out = [("example1", example1())] if include_example else []
    for i in range(seeds):
        rng = _seeded(seed_base, i)
        n = rng.randint(2, 10)
        d = rng.randint(3, 12)
        fin = (i % 2 == 1) if finite is None else finite
        horizon = rng.randint(0, 4 * d) if fin else None
        cfg = GenConfig(n, graph_class, Regime.DOMINANT_DECAY_A1, d, horizon, rng.getrandbits(63),
                        edge_prob=rng.choice([0.2, 0.35, 0.5]), **_shape(rng))
        out.append((f"t3-{graph_class.value}-{seed_base}-{i}", generate_random_instance(cfg)))
    return out


def corpus_theorem5(seeds: int, seed_base: int = 0, graph_class: GraphClass = GraphClass.FOREST,
                    include_example: bool = True) -> list:
    out = [("example2", example2())] if include_example else []
    for i in range(seeds):
        rng = _seeded(seed_base, i)
        n = rng.randint(2, 4)
        d = rng.randint(n + 1, 10)
        k = rng.randint(1, 3)
        cfg = GenConfig(n, graph_class, Regime.DOMINANT_REPAIR, d, None, rng.getrandbits(63), max_tree_size=k)
        out.append((f"t5-{graph_class.value}-{seed_base}-{i}", generate_random_instance(cfg)))
    return out


def corpus_lemma2(seeds: int, seed_base: int = 0) -> list:
    out = [("example1", example1())]
    for i in range(seeds):
        rng = _seeded(seed_base, i)
        n = rng.randint(2, 8)
        d = rng.randint(3, 12)
        horizon = None if i % 2 == 0 else rng.randint(0, 4 * d)
        cfg = GenConfig(n, GraphClass.GENERAL_DAG, Regime.DOMINANT_DECAY_A1, d, horizon, rng.getrandbits(63),
                        edge_prob=rng.choice([0.2, 0.35]), **_shape(rng))
        out.append((f"l2-{seed_base}-{i}", generate_random_instance(cfg)))
    return out


def random_linear_extension(rng: random.Random, dag: PrecedenceDag) -> list:
    """Uniformly pick among the ready nodes at each step."""
    indeg = [0] + [len(dag.in_neighbors[j]) for j in range(1, dag.n + 1)]
    ready = [j for j in range(1, dag.n + 1) if indeg[j] == 0]
    out = []
    while ready:
        j = ready.pop(rng.randrange(len(ready)))
        out.append(j)
        for k in dag.out_neighbors[j]:
            indeg[k] -= 1
            if indeg[k] == 0:
                ready.append(k)
    return out


def corpus_completion(seeds: int, seed_base: int = 0) -> list:
    out = []
    for i in range(seeds):
        rng = _seeded(seed_base, i)
        n = rng.randint(2, 8)
        d = rng.randint(3, 16)
        cfg = GenConfig(n, GraphClass.GENERAL_DAG, Regime.DOMINANT_DECAY_A1, d, None, rng.getrandbits(63),
                        edge_prob=rng.choice([0.0, 0.2, 0.5]), **_shape(rng))
        inst = generate_random_instance(cfg)
        order = random_linear_extension(rng, inst.dag)
        # prefixes keep short orders, which mostly succeed, in the mix
        order = order[: rng.randint(1, n)]
        out.append((f"cf-{seed_base}-{i}", inst, order))
    return out


def single_jump_case(rng: random.Random, n: Optional[int] = None, max_tries: int = 10_000):
    """Random dominant-decay instance plus a one-jump sequence repairing every node.

    The sequence targets ``i_1`` briefly, repairs ``i_2 .. i_k``, finishes
    ``i_1`` and then the rest.  Precedence edges only run forward along
    ``i_2 .. i_k, i_1, i_{k+1} ..`` and never into ``i_1``, so both the jumping
    sequence and its repair-in-order counterpart are feasible.
    """
    if n is None:
        n = rng.randint(2, 4)
    for _ in range(max_tries):
        d = rng.randint(10, 20 * n)
        nodes = []
        for _ in range(n):
            a = rng.randint(1, 2)
            b = rng.randint(a, a + 2)
            nodes.append((Fraction(rng.randint(d - 2 * n, d - 1), d), Fraction(a, d), Fraction(b, d)))
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        i1 = perm[0]
        k = rng.randint(2, n)
        order_b = perm[1:k] + [i1] + perm[k:]
        edges = [
            (order_b[x], order_b[y])
            for x in range(n)
            for y in range(x + 1, n)
            if order_b[y] != i1 and rng.random() < 0.4
        ]
        inst = Instance.make(nodes, edges, None)
        need = steps_to_repair(inst.node(i1).v0, inst.node(i1).inc)
        if need < 2:
            continue
        t_bar = rng.randint(1, need - 1)
        state = inst.initial_state()
        actions = []
        for _ in range(t_bar):
            state = step(inst, state, i1)
            actions.append(i1)
        dead = False
        for j in perm[1:k] + [i1] + perm[k:]:
            if state.value(j) == ZERO:
                dead = True
                break
            while state.value(j) < ONE:
                state = step(inst, state, j)
                actions.append(j)
        if dead:
            continue
        horizon = None if rng.random() < 0.5 else len(actions) - 1 + rng.randint(0, 3)
        return inst.with_horizon(horizon), actions
    raise InfeasibleConfig(f"could not build a single-jump sequence on {n} nodes")


def corpus_lemma1(seeds: int, seed_base: int = 0) -> list:
    out = []
    for i in range(seeds):
        rng = _seeded(seed_base, i)
        inst, actions = single_jump_case(rng, n=2 + i % 3)
        out.append((f"l1-{seed_base}-{i}", inst, actions))
    return out


SUITES = ("theorem1", "theorem3", "theorem5", "completion", "lemma1", "lemma2", "reduction")


def run_suite(name: str, seeds: int, seed_base: int = 0) -> SuiteReport:
    if name == "theorem1":
        return suite_theorem1(corpus_theorem1(seeds, seed_base))
    if name == "theorem3":
        rep = suite_theorem3(corpus_theorem3(seeds, seed_base))
        for cls in (GraphClass.EDGELESS, GraphClass.COMPLETE_SERIES):
            rep = rep.merge(suite_theorem3(corpus_theorem3(seeds, seed_base, cls, finite=True, include_example=False)))
        return rep
    if name == "theorem5":
        rep = suite_theorem5(corpus_theorem5(seeds, seed_base))
        return rep.merge(suite_theorem5(corpus_theorem5(seeds, seed_base, GraphClass.COMPLETE_SERIES, include_example=False)))
    if name == "completion":
        return suite_completion(corpus_completion(seeds, seed_base))
    if name == "lemma1":
        return suite_lemma1(corpus_lemma1(seeds, seed_base))
    if name == "lemma2":
        return suite_lemma2(corpus_lemma2(seeds, seed_base))
    if name == "reduction":
        return suite_reduction()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
