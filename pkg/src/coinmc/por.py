"""Partial-order reduction: static ample sets and the topological-sort proviso.

A leaf may be explored alone (its transitions form the ample set) when its
behaviour at the current local state is purely internal, it can never take
part in a synchronisation, and the property cannot observe it. The cycle
proviso runs over the whole reduced graph between exploration rounds.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

from . import ltl
from .core import complement, feasible
from .ltl import (And, Atom, Const, Finally, Globally, Next, Not, Or, Release,
                  Until)
from .succgen import Inherited, Transition


@dataclass(frozen=True)
class StaticDependence:
    sync_capable: tuple  # per leaf: frozenset of partner leaves
    visible_leaves: frozenset
    local_ok: tuple  # per leaf, per local state: all labels internal and enabled ones pass up_filter
    init: tuple  # initial local states, used by the tie-break

    def qualifies(self, leaf: int, q: int) -> bool:
        return (not self.sync_capable[leaf] and leaf not in self.visible_leaves
                and self.local_ok[leaf][q])


def static_dependence(tree, tables, formula_atoms=()) -> StaticDependence:
    """Dependence data for ``tree`` and the atoms of the property."""
    leaves = tree.leaves
    n = len(leaves)
    capable = [set() for _ in range(n)]
    opens = [[l for l in leaf.alphabet if l.is_input or l.is_output] for leaf in leaves]
    for i in range(n):
        for j in range(i + 1, n):
            lam = tables.lca[i, j]
            spec = tables.from_lca_filter[lam]
            hit = False
            for a in opens[i]:
                for b in opens[j]:
                    comb = complement(a, b) if a.is_output else complement(b, a)
                    if comb is not None and feasible(spec, comb):
                        hit = True
                        break
                if hit:
                    break
            if hit:
                capable[i].add(j)
                capable[j].add(i)

    actions = {a.label.action for a in formula_atoms}
    visible = frozenset(i for i, leaf in enumerate(leaves)
                        if any(l.action in actions for l in leaf.alphabet))

    local_ok = []
    for i, leaf in enumerate(leaves):
        row = []
        for q, outgoing in enumerate(leaf.outgoing):
            row.append(all(l.is_internal for l, _ in outgoing)
                       and all(feasible(tables.up_filter[i], l) for l, _ in outgoing))
        local_ok.append(tuple(row))
    return StaticDependence(tuple(frozenset(c) for c in capable), visible,
                            tuple(local_ok), tuple(leaf.init for leaf in leaves))


def choose_ample(dep: StaticDependence, locs, transitions):
    """Ample subset of raw ``(label, kind, successor)`` triples, or None for full expansion.

    Among qualifying leaves with an enabled move, those that have left their
    initial local state are preferred; ties go to the smallest index.
    """
    best = None
    best_key = None
    for _l, kind, _s in transitions:
        if type(kind) is not Inherited:
            continue
        i = kind.leaf
        q = locs[i]
        if not dep.qualifies(i, q):
            continue
        key = (q == dep.init[i], i)
        if best_key is None or key < best_key:
            best, best_key = i, key
    if best is None:
        return None
    amp = [t for t in transitions if type(t[1]) is Inherited and t[1].leaf == best]
    if len(amp) == len(transitions):
        return None
    return amp


def ample(tree, tables, dep: StaticDependence, s) -> list:
    """Transitions explored at global state ``s`` (one qualifying leaf, else all)."""
    from .succgen import LcaGenerator
    gen = LcaGenerator(tree, tables)
    codec = gen.codec
    b = codec.encode(tuple(s))
    raw = gen.transitions(b)
    amp = choose_ample(dep, codec.locals(b), raw)
    chosen = raw if amp is None else amp
    out = [Transition(l, k, codec.decode(t)) for l, k, t in chosen]
    out.sort(key=lambda t: (t.label, t.successor))
    return out


def proviso_pass(succs: dict, full) -> set:
    """States to re-expand so that no cycle consists only of reduced states.

    ``succs`` maps every explored state to its explored successors; ``full``
    holds the fully expanded ones. Fully expanded states count as removed;
    a reduced state is removed once all its successors are; whatever
    survives is returned.
    """
    full = set(full)
    preds = {}
    counter = {}
    for s, out in succs.items():
        if s not in full:
            counter[s] = len(out)
        for t in out:
            preds.setdefault(t, []).append(s)
    queue = deque(full)
    queue.extend(s for s, c in counter.items() if c == 0)
    for s in list(counter):
        if counter[s] == 0:
            del counter[s]
    while queue:
        t = queue.popleft()
        for p in preds.get(t, ()):
            if p in counter:
                counter[p] -= 1
                if counter[p] == 0:
                    del counter[p]
                    queue.append(p)
    return set(counter)


# -- stutter-safety of properties -----------------------------------------------
#
# Invisible steps show up in the product as letters with the same enabled set
# and an action the formula does not mention, so every act atom is false on
# them. The classes below track how a subformula behaves on such a letter:
#   stable     its value equals the value at the next position
#   tau_true   it is true there
#   tau_false  it is false there
# An empty class means insertion of such a letter may change the value.

STABLE, TAU_TRUE, TAU_FALSE = "stable", "tau_true", "tau_false"


def tau_class(f) -> frozenset:
    """Safety class of an NNF formula (see above); empty means unsafe."""
    if isinstance(f, Const):
        return frozenset({STABLE, TAU_TRUE if f.value else TAU_FALSE})
    if isinstance(f, Atom):
        return frozenset({STABLE}) if f.kind == "en" else frozenset({TAU_FALSE})
    if isinstance(f, Not):
        if f.arg.kind == "en":
            return frozenset({STABLE})
        return frozenset({TAU_TRUE})
    if isinstance(f, Next):
        return frozenset()
    if isinstance(f, (And, Or)):
        a, b = tau_class(f.left), tau_class(f.right)
        if not a or not b:
            return frozenset()
        out = set()
        if STABLE in a and STABLE in b:
            out.add(STABLE)
        strong, weak = (TAU_FALSE, TAU_TRUE) if isinstance(f, And) else (TAU_TRUE, TAU_FALSE)
        if strong in a or strong in b:
            out.add(strong)
        if weak in a and weak in b:
            out.add(weak)
        return frozenset(out)
    if isinstance(f, Finally):
        a = tau_class(f.arg)
        if a & {STABLE, TAU_FALSE}:
            return frozenset({STABLE} | ({TAU_TRUE} & a))
        return frozenset()
    if isinstance(f, Globally):
        a = tau_class(f.arg)
        if a & {STABLE, TAU_TRUE}:
            return frozenset({STABLE} | ({TAU_FALSE} & a))
        return frozenset()
    if isinstance(f, Until):
        a, b = tau_class(f.left), tau_class(f.right)
        if (TAU_FALSE in b and TAU_TRUE in a) or (STABLE in b and a & {STABLE, TAU_TRUE}):
            return frozenset({STABLE})
        return frozenset()
    if isinstance(f, Release):
        a, b = tau_class(f.left), tau_class(f.right)
        if (TAU_TRUE in b and TAU_FALSE in a) or (STABLE in b and a & {STABLE, TAU_FALSE}):
            return frozenset({STABLE})
        return frozenset()
    raise TypeError(f"not in negation normal form: {f}")


def por_applicable(formula) -> bool:
    """True when reduction preserves the verdict of ``formula``."""
    return STABLE in tau_class(ltl.nnf(formula))


def explore_reduced(tree, tables, claim, formula, algorithm: str = "lca"):
    """Reduced product graph: ``(initial, succs, full_states)``.

    Single-process reference for the engine in :mod:`coinmc.explorer`:
    breadth-first exploration with ample sets, then proviso passes and
    re-expansion until nothing is left to re-expand.
    """
    from .explorer import ProductSpace
    space = ProductSpace(tree, claim, algorithm=algorithm, tables=tables,
                         formula=formula, por=True)
    init = space.initial()
    succs, full = {}, set()
    frontier = [init]
    while True:
        while frontier:
            nxt = []
            for s in frontier:
                if s in succs:
                    continue
                out, reduced = space.expand(s)
                succs[s] = out
                if not reduced:
                    full.add(s)
                nxt.extend(t for t in out if t not in succs)
            frontier = nxt
        redo = proviso_pass(succs, full)
        if not redo:
            return init, succs, full
        for s in sorted(redo):
            old = Counter(succs[s])
            out, _ = space.expand(s, full=True)
            succs[s] = out
            full.add(s)
            frontier.extend(t for t in (Counter(out) - old).elements() if t not in succs)
