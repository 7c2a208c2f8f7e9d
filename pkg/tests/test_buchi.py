"""Formula to never-claim translation."""
import random
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coinmc import ltl
from coinmc.buchi import (accepts_lasso, format_claim, guard_satisfiable, never_claim,
                          strongly_connected, to_buchi)
from coinmc.families import random_formula
from coinmc.lang import parse_claim
from coinmc.ltl import Const, Finally, Globally, Not, Until, act, en

from oracles import pipeline_agreement, small_models, valuation_letter
from test_ltl import words

p, q = act(1, "b", 1), act(2, "c", 1)
TRUE = frozenset()


def edge_set(aut):
    return {(aut.states[s], g, aut.states[t]) for s, g, t in aut.edges}


class TestExamples:
    def test_finally(self):
        aut = to_buchi(Finally(p))
        assert len(aut.states) == 2
        init, other = aut.states[aut.initial], aut.states[1 - aut.initial]
        assert edge_set(aut) == {(init, TRUE, init), (init, frozenset({(True, p)}), other),
                                 (other, TRUE, other)}
        assert aut.accepting == {1 - aut.initial}

    def test_globally(self):
        aut = to_buchi(Globally(p))
        assert len(aut.states) == 1
        assert aut.edges == ((0, frozenset({(True, p)}), 0),)
        assert aut.accepting == {0}

    def test_until_words(self):
        atoms = (p, q)
        aut = to_buchi(Until(p, q))
        for seq, loop in words(atoms, 4):
            letters = [valuation_letter(atoms, v) for v in seq]
            k = next((i for i, v in enumerate(seq) if v[1]), None)
            expect = k is not None and all(v[0] for v in seq[:k])
            assert accepts_lasso(aut, letters, loop) == expect

    def test_never_claim_of_true_is_empty(self):
        aut = never_claim(Const(True))
        assert len(aut.states) == 1 and not aut.accepting

    def test_requires_nnf(self):
        with pytest.raises(ValueError):
            to_buchi(ltl.Implies(p, q))


class TestStructure:
    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6))
    def test_all_states_reachable_and_guards_consistent(self, seed):
        f = random_formula(random.Random(seed), [p, q, en(1, "b", 1)], 5)
        aut = never_claim(f)
        out = aut.out_edges()
        seen = {aut.initial}
        todo = deque([aut.initial])
        while todo:
            s = todo.popleft()
            for _, t in out[s]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        assert seen == set(range(len(aut.states)))
        assert all(guard_satisfiable(g) for _, g, _ in aut.edges)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6))
    def test_claim_text_round_trip(self, seed):
        f = random_formula(random.Random(seed), [p, q, en(0, "a", 2)], 5)
        aut = never_claim(f)
        assert parse_claim(format_claim(aut)) == aut

    def test_scc(self):
        comp = strongly_connected(4, [[1], [0], [3], []])
        assert comp[0] == comp[1]
        assert len({comp[0], comp[2], comp[3]}) == 3


class TestTranslation:
    @settings(max_examples=120, deadline=None)
    @given(st.integers(0, 10**6))
    def test_language_matches_semantics(self, seed):
        atoms = (act(1, "a", 2), en(1, "a", 2))
        f = random_formula(random.Random(seed), list(atoms), 4)
        aut = to_buchi(ltl.nnf(f))
        neg = never_claim(f)
        for seq, loop in words(atoms, 3):
            letters = [valuation_letter(atoms, v) for v in seq]
            holds = ltl.holds_on_lasso(f, letters, loop)
            assert accepts_lasso(aut, letters, loop) == holds
            assert accepts_lasso(neg, letters, loop) != holds

    def test_unsimplified_agrees(self):
        atoms = (p, q)
        rng = random.Random(5)
        for _ in range(40):
            f = ltl.nnf(random_formula(rng, list(atoms), 4))
            a, b = to_buchi(f), to_buchi(f, simplify=False)
            assert len(a.states) <= len(b.states)
            for seq, loop in words(atoms, 3):
                letters = [valuation_letter(atoms, v) for v in seq]
                assert accepts_lasso(a, letters, loop) == accepts_lasso(b, letters, loop)

    def test_model_lassos_small_sample(self):
        # the full depth-3 sweep lives in the acceptance suite
        runs, checks, bad = pipeline_agreement(small_models(count=4), max_depth=2)
        assert runs > 0 and checks > 0
        assert bad == 0
