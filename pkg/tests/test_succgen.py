"""Successor generation: recursive and LCA generators against the brute-force composition."""
from collections import Counter

from coinmc.core import ALLOW_ALL, ALLOW_ALL_EXCEPT, OPEN, FeasibleSpec, Label, brute_force_compose
from coinmc.lang import load_tree
from coinmc.succgen import (Inherited, StateCodec, Sync, lowest_common_ancestor, make_generator,
                            precompute, successors_lca, successors_recursive, tables_size)

from oracles import ABC_TEXT, FIG1_TEXT, check_equivalence, corpus

Q0, Q1, Q2 = (0, 0), (1, 0), (2, 0)


def _pairs(ts):
    return [(t.label, t.successor) for t in ts]


class TestExamples:
    def setup_method(self):
        self.tree = load_tree(ABC_TEXT)
        self.tables = precompute(self.tree)

    def test_initial_successors(self):
        want = sorted([(Label(OPEN, "a", 2), Q0), (Label(2, "c", OPEN), Q0), (Label(1, "a", 2), Q1)])
        assert _pairs(successors_recursive(self.tree, Q0)) == want
        assert _pairs(successors_lca(self.tree, self.tables, Q0)) == want

    def test_blocked_open_input(self):
        got = _pairs(successors_lca(self.tree, self.tables, Q2))
        assert (Label(2, "c", 1), Q0) in got
        assert len(got) == 3
        assert all(l != Label(OPEN, "c", 1) for l, _ in got)

    def test_kinds(self):
        ts = successors_lca(self.tree, self.tables, Q0)
        sync = [t for t in ts if t.label == Label(1, "a", 2)]
        assert sync[0].kind == Sync(0, 1, self.tree.root)
        assert all(isinstance(t.kind, Inherited) for t in ts if t is not sync[0])

    def test_single_leaf(self):
        tree = load_tree("automaton A (1) { state x, y; init x; trans x -> y (1,a,-), x -> x (1,b,1); } system A;")
        ts = successors_lca(tree, precompute(tree), (0,))
        assert _pairs(ts) == [(Label(1, "a", OPEN), (1,)), (Label(1, "b", 1), (0,))]
        assert successors_recursive(tree, (0,)) == ts

    def test_deterministic(self):
        for s in (Q0, Q1, Q2):
            assert successors_lca(self.tree, self.tables, s) == successors_lca(self.tree, self.tables, s)
            assert successors_recursive(self.tree, s) == successors_recursive(self.tree, s)


class TestTables:
    def test_abc_filters(self):
        tree = load_tree(ABC_TEXT)
        t = precompute(tree)
        c = tree.root
        spec = FeasibleSpec(ALLOW_ALL_EXCEPT, {Label(1, "a", OPEN), Label(OPEN, "c", 1)})
        assert t.lca[0, 1] == c
        assert t.up_filter[0] == spec and t.up_filter[1] == spec
        assert t.to_lca_filter[0, c] == ALLOW_ALL
        assert t.from_lca_filter[c] == spec

    def test_figure_lcas(self):
        tree = load_tree(FIG1_TEXT)
        t = precompute(tree)
        idx = tree.leaf_index_by_name
        assert t.lca[idx("Si"), idx("Sj")] == tree.node_by_name("C2")
        assert t.lca[idx("Si"), idx("S3")] == tree.node_by_name("C3")
        assert t.lca[idx("S1"), idx("S4")] == tree.root

    def test_lca_is_symmetric_and_minimal(self):
        for _, tree in corpus(5, 30):
            t = precompute(tree)
            n = len(tree.leaves)
            for i in range(n):
                for j in range(i + 1, n):
                    a, b = tree.leaf_nodes[i], tree.leaf_nodes[j]
                    lam = t.lca[i, j]
                    assert lowest_common_ancestor(tree, b, a) == lam
                    assert lam in tree.path_to_root(a) and lam in tree.path_to_root(b)
                    # no child of lam covers both
                    for c in tree.nodes[lam].children:
                        assert not (i in tree.subtree_leaves(c) and j in tree.subtree_leaves(c))

    def test_state_independent(self):
        for _, tree in corpus(6, 10):
            t1 = precompute(tree)
            gen = make_generator(tree, "lca", t1)
            b = gen.codec.encode(tuple(l.init for l in tree.leaves))
            gen.transitions(b)
            assert precompute(tree) == t1

    def test_tables_size_positive(self):
        assert tables_size(precompute(load_tree(ABC_TEXT))) > 0


class TestOracleEquivalence:
    def test_abc(self):
        assert check_equivalence(load_tree(ABC_TEXT)) == 0

    def test_figure_shape(self):
        tree = load_tree(FIG1_TEXT)
        assert len(brute_force_compose(tree).states) > 1
        assert check_equivalence(tree) == 0

    def test_random_corpus(self):
        models = corpus(1, 60) + corpus(11, 60, filter_prob=0.3, min_trans=3, actions="ab")
        assert sum(check_equivalence(tree) for _, tree in models) == 0

    def test_sync_kinds(self):
        for _, tree in corpus(2, 40):
            tables = precompute(tree)
            for s in brute_force_compose(tree).states:
                ts = successors_lca(tree, tables, s)
                seen = Counter()
                for t in ts:
                    if isinstance(t.kind, Sync):
                        i, j, lam = t.kind
                        assert i != j
                        assert lam == tables.lca[min(i, j), max(i, j)]
                        moved = {k for k in range(len(s)) if s[k] != t.successor[k]}
                        assert moved <= {i, j}
                    seen[t] += 1
                # each (kind, label, successor) appears once per distinct local pair
                assert all(v == 1 for v in seen.values())


class TestCodec:
    def test_round_trip_narrow(self):
        c = StateCodec([3, 2])
        assert c.decode(c.encode((2, 1))) == (2, 1)

    def test_round_trip_wide(self):
        c = StateCodec([300, 2])
        assert c.width == 2
        assert c.decode(c.encode((299, 1))) == (299, 1)
        assert list(c.locals(c.encode((299, 1)))) == [299, 1]
