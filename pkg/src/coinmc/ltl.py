"""CI-LTL formulas over interaction atoms.

``act(l)`` holds on a step that performs label ``l``; ``en(l)`` holds when
``l`` is enabled in the step's source state. Runs are infinite; finite
maximal runs are padded with stutter steps (no action, nothing enabled).
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Label


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    kind: str  # "act" | "en"
    label: Label


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = Const(True)
FALSE = Const(False)

_UNARY = {Not: "!", Next: "X", Finally: "F", Globally: "G"}
_BINARY = {And: "&&", Or: "||", Implies: "->", Until: "U", Release: "R"}
# binding strength, higher binds tighter
_PREC = {Implies: 1, Or: 2, And: 3, Until: 4, Release: 4}


def act(sender, action, receiver) -> Atom:
    return Atom("act", Label(sender, action, receiver))


def en(sender, action, receiver) -> Atom:
    return Atom("en", Label(sender, action, receiver))


def format_formula(f: Formula) -> str:
    """Concrete syntax accepted by the formula parser (fully re-parseable)."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        l = f.label
        m = "-" if l.sender == 0 else str(l.sender)
        n = "-" if l.receiver == 0 else str(l.receiver)
        return f"{f.kind}({m},{l.action},{n})"
    if type(f) in _UNARY:
        inner = format_formula(f.arg)
        if type(f.arg) in _BINARY:
            inner = f"({inner})"
        sep = "" if isinstance(f, Not) else " "
        return f"{_UNARY[type(f)]}{sep}{inner}"
    op = _BINARY[type(f)]
    p = _PREC[type(f)]

    def side(g, right):
        s = format_formula(g)
        if type(g) in _PREC:
            q = _PREC[type(g)]
            # -> is right-assoc, everything else left-assoc
            assoc_ok = (q > p) or (q == p and ((type(f) is Implies) == right))
            if not assoc_ok:
                s = f"({s})"
        return s

    return f"{side(f.left, False)} {op} {side(f.right, True)}"


def atoms(f: Formula) -> set:
    if isinstance(f, Atom):
        return {f}
    if isinstance(f, Const):
        return set()
    out = set()
    for child in children(f):
        out |= atoms(child)
    return out


def children(f: Formula) -> tuple:
    if isinstance(f, (Const, Atom)):
        return ()
    if type(f) in _UNARY:
        return (f.arg,)
    return (f.left, f.right)


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in children(f)), default=0)


def has_next(f: Formula) -> bool:
    return isinstance(f, Next) or any(has_next(c) for c in children(f))


def nnf(f: Formula, negated: bool = False) -> Formula:
    """Negation normal form of ``f`` (or of ``!f`` when ``negated``); ``->`` is eliminated."""
    if isinstance(f, Const):
        return Const(f.value != negated)
    if isinstance(f, Atom):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return nnf(f.arg, not negated)
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), negated)
    if isinstance(f, Next):
        return Next(nnf(f.arg, negated))
    if isinstance(f, Finally):
        return (Globally if negated else Finally)(nnf(f.arg, negated))
    if isinstance(f, Globally):
        return (Finally if negated else Globally)(nnf(f.arg, negated))
    dual = {And: Or, Or: And, Until: Release, Release: Until}
    cls = dual[type(f)] if negated else type(f)
    return cls(nnf(f.left, negated), nnf(f.right, negated))


def negate(f: Formula) -> Formula:
    return nnf(f, negated=True)


def is_nnf(f: Formula) -> bool:
    if isinstance(f, Not):
        return isinstance(f.arg, Atom)
    if isinstance(f, Implies):
        return False
    return all(is_nnf(c) for c in children(f))


# -- letters and direct semantics ------------------------------------------

@dataclass(frozen=True)
class Letter:
    """One step of a run: labels enabled at the source, label performed (None = stutter)."""

    enabled: frozenset
    action: Label | None


def atom_holds(atom: Atom, letter: Letter) -> bool:
    if atom.kind == "act":
        return letter.action == atom.label
    return atom.label in letter.enabled


def holds_on_lasso(f: Formula, letters, loop: int) -> bool:
    """Evaluate ``f`` at position 0 of the infinite word ``letters[:loop] (letters[loop:])^w``.

    Independent of any automaton construction: subformula truth vectors are
    computed directly, with Until/Release as least/greatest fixpoints.
    """
    n = len(letters)
    if not 0 <= loop < n:
        raise ValueError("loop index out of range")
    succ = [k + 1 for k in range(n - 1)] + [loop]
    cache = {}

    def ev(g):
        if g in cache:
            return cache[g]
        if isinstance(g, Const):
            v = [g.value] * n
        elif isinstance(g, Atom):
            v = [atom_holds(g, x) for x in letters]
        elif isinstance(g, Not):
            v = [not x for x in ev(g.arg)]
        elif isinstance(g, And):
            a, b = ev(g.left), ev(g.right)
            v = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Or):
            a, b = ev(g.left), ev(g.right)
            v = [x or y for x, y in zip(a, b)]
        elif isinstance(g, Implies):
            a, b = ev(g.left), ev(g.right)
            v = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = ev(g.arg)
            v = [a[succ[k]] for k in range(n)]
        elif isinstance(g, (Until, Finally)):
            a = [True] * n if isinstance(g, Finally) else ev(g.left)
            b = ev(g.arg if isinstance(g, Finally) else g.right)
            v = [False] * n
            for _ in range(n + 1):
                v = [b[k] or (a[k] and v[succ[k]]) for k in range(n)]
        else:  # Release, Globally
            a = [False] * n if isinstance(g, Globally) else ev(g.left)
            b = ev(g.arg if isinstance(g, Globally) else g.right)
            v = [True] * n
            for _ in range(n + 1):
                v = [b[k] and (a[k] or v[succ[k]]) for k in range(n)]
        cache[g] = v
        return v

    return ev(f)[0]
