"""Synchronous product of the model with a never claim.

Claim guards are read on the step being taken: the letter of a step is the
set of labels enabled at its source plus the label it performs. A deadlocked
model state takes stutter steps (nothing enabled, no action).
"""
from __future__ import annotations

from typing import NamedTuple

from .buchi import BuchiAutomaton, guard_holds
from .ltl import Atom, Letter, atom_holds
from .succgen import PrecomputedTables, make_generator


class _Stutter:
    __slots__ = ()

    def __repr__(self):
        return "STUTTER"


STUTTER = _Stutter()


class ProductState(NamedTuple):
    model: tuple
    claim: int


def letter_of(outgoing, step) -> Letter:
    """Letter read on ``step`` (a Transition or STUTTER) given the source's outgoing transitions."""
    if step is STUTTER:
        return Letter(frozenset(), None)
    return Letter(frozenset(t.label for t in outgoing), step.label)


def eval_atom(atom: Atom, outgoing, step) -> bool:
    """Truth of ``atom`` on ``step`` taken from a state whose outgoing transitions are ``outgoing``."""
    return atom_holds(atom, letter_of(outgoing, step))


def product_successors(tree, tables: PrecomputedTables, claim: BuchiAutomaton,
                       p: ProductState, algorithm: str = "lca") -> list:
    """``(ProductState, accepting)`` pairs for every model step and matching claim edge."""
    gen = make_generator(tree, algorithm, tables)
    codec = gen.codec
    raw = gen.transitions(codec.encode(p.model))
    enabled = frozenset(l for l, _, _ in raw)
    steps = [(Letter(enabled, l), codec.decode(s)) for l, _, s in sorted(raw, key=lambda x: (x[0], x[2]))]
    if not steps:
        steps = [(Letter(frozenset(), None), tuple(p.model))]
    out = []
    for letter, succ in steps:
        for src, guard, dst in claim.edges:
            if src == p.claim and guard_holds(guard, letter):
                out.append((ProductState(succ, dst), dst in claim.accepting))
    return out
