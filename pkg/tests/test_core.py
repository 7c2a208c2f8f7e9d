"""Labels, feasible-label sets, trees and the brute-force composition oracle."""
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coinmc.core import (ALLOW_ALL, ALLOW_ALL_EXCEPT, ALLOW_ONLY, OPEN, BoundExceeded,
                         FeasibleSpec, Label, brute_force_compose, complement, feasible,
                         initial_state, intersect, make_label)
from coinmc.lang import load_tree

from oracles import ABC_TEXT, FIG1_TEXT, corpus

R = FeasibleSpec(ALLOW_ALL_EXCEPT, {Label(1, "a", OPEN), Label(OPEN, "c", 1)})

UNIVERSE = [Label(m, a, n) for m in (0, 1, 2) for a in "ab" for n in (0, 1, 2) if (m, n) != (0, 0)]
labels = st.sampled_from(UNIVERSE)
specs = st.builds(FeasibleSpec, st.sampled_from([ALLOW_ALL_EXCEPT, ALLOW_ONLY]),
                  st.frozensets(labels, max_size=5))


class TestLabel:
    def test_classification(self):
        assert Label(1, "a", OPEN).is_output
        assert Label(OPEN, "a", 2).is_input
        assert Label(1, "b", 1).is_internal

    def test_classification_is_exclusive(self):
        for l in UNIVERSE:
            assert [l.is_input, l.is_output, l.is_internal].count(True) == 1

    def test_doubly_open_rejected(self):
        with pytest.raises(ValueError):
            make_label(OPEN, "a", OPEN)

    def test_str(self):
        assert str(Label(1, "a", OPEN)) == "(1,a,-)"
        assert str(Label(OPEN, "c", 1)) == "(-,c,1)"

    def test_complement(self):
        assert complement(Label(1, "a", OPEN), Label(OPEN, "a", 2)) == Label(1, "a", 2)
        assert complement(Label(1, "a", OPEN), Label(OPEN, "b", 2)) is None
        assert complement(Label(OPEN, "a", 2), Label(1, "a", OPEN)) is None


class TestFeasible:
    def test_restrict_allows_other(self):
        assert feasible(R, Label(1, "b", 1))

    def test_restrict_blocks_listed(self):
        assert not feasible(R, Label(1, "a", OPEN))

    def test_empty_only_blocks_everything(self):
        spec = FeasibleSpec(ALLOW_ONLY, frozenset())
        assert not any(feasible(spec, l) for l in UNIVERSE)


class TestIntersect:
    p, q = Label(1, "a", 2), Label(2, "b", 1)

    def test_except_except(self):
        got = intersect(FeasibleSpec(ALLOW_ALL_EXCEPT, {self.p}), FeasibleSpec(ALLOW_ALL_EXCEPT, {self.q}))
        assert got == FeasibleSpec(ALLOW_ALL_EXCEPT, {self.p, self.q})

    def test_only_except(self):
        got = intersect(FeasibleSpec(ALLOW_ONLY, {self.p, self.q}), FeasibleSpec(ALLOW_ALL_EXCEPT, {self.q}))
        assert got == FeasibleSpec(ALLOW_ONLY, {self.p})

    def test_allow_all_is_neutral(self):
        assert intersect(ALLOW_ALL, R) == R
        assert intersect(R, ALLOW_ALL) == R

    def test_random_triples(self):
        rng = random.Random(1)
        for _ in range(1000):
            a = FeasibleSpec(rng.choice([ALLOW_ALL_EXCEPT, ALLOW_ONLY]), rng.sample(UNIVERSE, rng.randint(0, 5)))
            b = FeasibleSpec(rng.choice([ALLOW_ALL_EXCEPT, ALLOW_ONLY]), rng.sample(UNIVERSE, rng.randint(0, 5)))
            l = rng.choice(UNIVERSE)
            assert feasible(intersect(a, b), l) == (feasible(a, l) and feasible(b, l))

    @given(specs, specs, specs)
    def test_associative_and_commutative(self, a, b, c):
        for l in UNIVERSE:
            left = feasible(intersect(intersect(a, b), c), l)
            right = feasible(intersect(a, intersect(b, c)), l)
            assert left == right
            assert feasible(intersect(a, b), l) == feasible(intersect(b, a), l)


class TestInitialState:
    def test_abc(self):
        assert initial_state(load_tree(ABC_TEXT)) == (0, 0)

    def test_single_leaf(self):
        tree = load_tree("automaton A (1) { state r, s; init s; trans; } system A;")
        assert initial_state(tree) == (1,)

    def test_figure_shape(self):
        assert len(initial_state(load_tree(FIG1_TEXT))) == 6


def _by_source(lts):
    return {s: sorted(v) for s, v in lts.by_source().items()}


class TestBruteForce:
    def test_abc_ground_truth(self):
        lts = brute_force_compose(load_tree(ABC_TEXT))
        assert lts.states == {(0, 0), (1, 0), (2, 0)}
        assert len(lts.transitions) == 9
        out = _by_source(lts)
        assert out[(0, 0)] == sorted([(Label(OPEN, "a", 2), (0, 0)), (Label(2, "c", OPEN), (0, 0)),
                                      (Label(1, "a", 2), (1, 0))])
        assert (Label(1, "b", 1), (2, 0)) in out[(1, 0)]
        assert (Label(2, "c", 1), (0, 0)) in out[(2, 0)]
        assert Label(OPEN, "c", 1) not in [l for l, _ in out[(2, 0)]]

    def test_single_leaf_is_isomorphic(self):
        tree = load_tree("automaton A (1) { state x, y; init x; trans x -> y (1,a,-), y -> x (-,b,1); } system A;")
        lts = brute_force_compose(tree)
        assert lts.states == {(0,), (1,)}
        assert sorted(lts.transitions) == sorted([((0,), Label(1, "a", OPEN), (1,)),
                                                  ((1,), Label(OPEN, "b", 1), (0,))])

    def test_only_variant(self):
        text = ABC_TEXT.replace("restrictL (1, a, -), (-, c, 1)", "onlyL (1,a,2), (2,c,1), (1,b,1)")
        assert text != ABC_TEXT
        lts = brute_force_compose(load_tree(text))
        assert len(lts.states) == 3
        assert sorted(l for _, l, _ in lts.transitions) == [Label(1, "a", 2), Label(1, "b", 1), Label(2, "c", 1)]

    def test_bound(self):
        with pytest.raises(BoundExceeded):
            brute_force_compose(load_tree(ABC_TEXT), bound=2)

    def test_every_transition_has_an_admissible_witness(self):
        # inherited from one leaf, or a sync of two leaves with complementary open labels;
        # in both cases every filter on the way to the root admits the move
        for _, tree in corpus(3, 60):
            lts = brute_force_compose(tree)
            for s, l, t in lts.transitions:
                assert any(_admissible(tree, w, l) for w in _witnesses(tree, s, l, t)), (s, l, t)


def _witnesses(tree, s, l, t):
    n = len(s)
    for i in range(n):
        if all(t[k] == s[k] for k in range(n) if k != i) and (l, t[i]) in tree.leaves[i].outgoing[s[i]]:
            yield ("inh", i)
    if l.is_internal:
        lo, li = Label(l.sender, l.action, OPEN), Label(OPEN, l.action, l.receiver)
        for i in range(n):
            for j in range(n):
                if i == j or any(t[k] != s[k] for k in range(n) if k not in (i, j)):
                    continue
                if (lo, t[i]) in tree.leaves[i].outgoing[s[i]] and (li, t[j]) in tree.leaves[j].outgoing[s[j]]:
                    yield ("sync", i, j)


def _admissible(tree, w, l):
    def internal(path):
        return [tree.nodes[v] for v in path if not tree.nodes[v].is_leaf]

    if w[0] == "inh":
        return all(feasible(n.spec, l) for n in internal(tree.path_to_root(tree.leaf_nodes[w[1]])))
    _, i, j = w
    pi = tree.path_to_root(tree.leaf_nodes[i])
    pj = tree.path_to_root(tree.leaf_nodes[j])
    lam = next(v for v in pi if v in pj)
    lo, li = Label(l.sender, l.action, OPEN), Label(OPEN, l.action, l.receiver)
    below_i = internal(pi[:pi.index(lam)])
    below_j = internal(pj[:pj.index(lam)])
    above = internal(pi[pi.index(lam):])
    return (all(feasible(n.spec, lo) for n in below_i) and all(feasible(n.spec, li) for n in below_j)
            and all(feasible(n.spec, l) for n in above))
