from hypothesis import given, settings
from hypothesis import strategies as st

from repairsched.core import Instance, PrecedenceDag
from repairsched.graphs import Assumption1, as_disjoint_trees, classify_regime, is_complete_series, levels

FIVE = PrecedenceDag.make(5, [(1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)])


def test_levels_examples(ex1):
    assert levels(ex1.dag).levels == (frozenset({1, 2}), frozenset({3}))
    assert levels(PrecedenceDag.make(4)).levels == (frozenset({1, 2, 3, 4}),)
    assert levels(FIVE).levels == ({1, 2}, {3, 4}, {5})
    assert levels(FIVE).level_of()[5] == 2


def test_complete_series(ex1):
    assert is_complete_series(FIVE)
    assert not is_complete_series(ex1.dag)
    assert is_complete_series(PrecedenceDag.make(3))
    # a transitive shortcut breaks the layered shape
    assert not is_complete_series(PrecedenceDag.make(5, FIVE.edges | {(1, 5)}))


def test_forest(ex1):
    f = as_disjoint_trees(ex1.dag)
    assert f.k == 2
    assert {(t.root, t.nodes) for t in f.trees} == {(1, frozenset({1})), (2, frozenset({2, 3}))}
    assert as_disjoint_trees(FIVE) is None
    f = as_disjoint_trees(PrecedenceDag.make(4))
    assert f.k == 1 and len(f.trees) == 4


def test_classify_examples(ex1, ex2, ex3):
    r = classify_regime(ex1)
    assert r.dominant_decay and not r.dominant_repair
    assert r.assumption1 == Assumption1(1, (4, 7, 2))
    assert classify_regime(ex2).dominant_repair
    assert classify_regime(ex2).assumption1 is None
    assert classify_regime(ex3).dominant_repair
    assert not classify_regime(ex3).dominant_decay


def test_assumption1_needs_integer_multiple():
    inst = Instance.make([("1/2", "1/10", "3/20"), ("1/2", "1/10", "3/20")])
    assert classify_regime(inst).assumption1 is None
    inst = Instance.make([("1/2", "1/10", "1/5"), ("1/2", "1/10", "1/5")])
    assert classify_regime(inst).assumption1 == Assumption1(2, (5, 5))
    inst = Instance.make([("11/20", "1/10", "1/5"), ("1/2", "1/10", "1/5")])
    assert classify_regime(inst).assumption1 is None


@st.composite
def dags(draw):
    n = draw(st.integers(1, 8))
    perm = draw(st.permutations(range(1, n + 1)))
    edges = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    return PrecedenceDag.make(n, edges)


@settings(max_examples=200, deadline=None)
@given(dags())
def test_levels_partition_and_respect_edges(dag):
    lv = levels(dag)
    seen = set()
    for level in lv.levels:
        assert not seen & level
        seen |= level
    assert seen == set(range(1, dag.n + 1))
    at = lv.level_of()
    for j, k in dag.edges:
        assert at[j] < at[k]
    for k in range(1, dag.n + 1):
        if at[k] > 0:
            assert any(at[j] == at[k] - 1 for j in dag.in_neighbors[k])


@settings(max_examples=200, deadline=None)
@given(dags())
def test_forest_covers_every_node_once(dag):
    f = as_disjoint_trees(dag)
    if f is None:
        assert any(len(dag.in_neighbors[k]) > 1 for k in range(1, dag.n + 1))
        return
    nodes = [j for t in f.trees for j in t.nodes]
    assert sorted(nodes) == list(range(1, dag.n + 1))
    assert f.k == max(len(t.nodes) for t in f.trees)
