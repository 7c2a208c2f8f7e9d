"""Lexer and recursive-descent parsers for CoIn models, CI-LTL formulas and never claims."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import ltl
from .core import (ALLOW_ALL, ALLOW_ALL_EXCEPT, ALLOW_ONLY, OPEN, FeasibleSpec,
                   HierarchyTree, Label, PrimitiveAutomaton, build_tree)


class CoinError(Exception):
    """A located lexical, syntax or semantic error."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT INT SYM EOF
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)"
    r"|(?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)|(?P<INT>[0-9]+)"
    r"|(?P<SYM>->|&&|\|\||[(){},;\-!\[\]])"
)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise CoinError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset=1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return CoinError(message, tok.line, tok.col)

    def at(self, value) -> bool:
        return self.tok.kind in ("SYM", "IDENT") and self.tok.value == value

    def accept(self, value) -> Token | None:
        if self.at(value):
            t = self.tok
            self.pos += 1
            return t
        return None

    def expect(self, value) -> Token:
        t = self.accept(value)
        if t is None:
            found = self.tok.value or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")
        return t

    def ident(self) -> Token:
        if self.tok.kind != "IDENT":
            raise self.error(f"expected identifier, found {self.tok.value or 'end of input'!r}")
        t = self.tok
        self.pos += 1
        return t

    def integer(self) -> int:
        if self.tok.kind != "INT":
            raise self.error(f"expected integer, found {self.tok.value or 'end of input'!r}")
        t = self.tok
        self.pos += 1
        return int(t.value)

    def endpoint(self) -> int:
        if self.accept("-"):
            return OPEN
        tok = self.tok
        v = self.integer()
        if v < 1:
            raise self.error("component ids must be >= 1", tok)
        return v

    def label(self) -> Label:
        start = self.expect("(")
        m = self.endpoint()
        self.expect(",")
        a = self.ident().value
        self.expect(",")
        n = self.endpoint()
        self.expect(")")
        if m == OPEN and n == OPEN:
            raise self.error(f"label (-,{a},-) has no endpoint", start)
        return Label(m, a, n)


# -- models -----------------------------------------------------------------

@dataclass(frozen=True)
class PrimitiveDecl:
    name: str
    component_id: int
    states: tuple
    init: str
    trans: tuple  # (from, to, Label)
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CompositeDecl:
    name: str
    children: tuple
    filter: FeasibleSpec | None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SourceModel:
    automata: tuple
    composites: tuple
    system: str


class _ModelParser(_Parser):
    def model(self, allow_never=False):
        automata, composites = [], []
        claim = None
        while True:
            if self.at("automaton"):
                automata.append(self.automaton())
            elif self.at("composite"):
                composites.append(self.composite())
            else:
                break
        if not automata and not composites:
            raise self.error("expected 'automaton' or 'composite'")
        if not self.at("system"):
            if self.tok.kind == "EOF":
                raise self.error("missing system declaration")
            raise self.error(f"expected 'automaton', 'composite' or 'system', found {self.tok.value!r}")
        sys_tok = self.expect("system")
        name_tok = self.ident()
        self.expect(";")
        if allow_never and self.at("never"):
            claim = _ClaimParser.from_parser(self).claim()
        if self.tok.kind != "EOF":
            raise self.error(f"unexpected {self.tok.value!r} after system declaration")
        model = SourceModel(tuple(automata), tuple(composites), name_tok.value)
        _validate(model, name_tok)
        return model, claim

    def automaton(self):
        kw = self.expect("automaton")
        name = self.ident().value
        self.expect("(")
        cid = self.integer()
        if cid < 1:
            raise self.error("component id must be >= 1", kw)
        self.expect(")")
        self.expect("{")
        self.expect("state")
        states = [self.ident()]
        while self.accept(","):
            states.append(self.ident())
        self.expect(";")
        self.expect("init")
        init = self.ident()
        self.expect(";")
        self.expect("trans")
        trans = []
        if not self.at(";"):
            trans.append(self.transition())
            while self.accept(","):
                trans.append(self.transition())
        self.expect(";")
        self.expect("}")

        names = [t.value for t in states]
        seen = set()
        for t in states:
            if t.value in seen:
                raise CoinError(f"duplicate state {t.value!r} in automaton {name}", t.line, t.col)
            seen.add(t.value)
        if init.value not in seen:
            raise CoinError(f"init state {init.value!r} is not declared", init.line, init.col)
        out = []
        for src, dst, label, tok in trans:
            for s in (src, dst):
                if s.value not in seen:
                    raise CoinError(f"undeclared state {s.value!r} in automaton {name}", s.line, s.col)
            for e in (label.sender, label.receiver):
                if e != OPEN and e != cid:
                    raise CoinError(
                        f"label {label} of automaton {name} names component {e}, expected {cid}",
                        tok.line, tok.col)
            out.append((src.value, dst.value, label))
        return PrimitiveDecl(name, cid, tuple(names), init.value, tuple(out), kw.line, kw.col)

    def transition(self):
        src = self.ident()
        self.expect("->")
        dst = self.ident()
        tok = self.tok
        return src, dst, self.label(), tok

    def composite(self):
        kw = self.expect("composite")
        name = self.ident().value
        self.expect("{")
        children = [self.ident().value]
        while self.accept(","):
            children.append(self.ident().value)
        self.expect(";")
        spec = None
        if self.at("restrictL") or self.at("onlyL"):
            mode = ALLOW_ALL_EXCEPT if self.at("restrictL") else ALLOW_ONLY
            self.pos += 1
            labels = [self.label()]
            while self.accept(","):
                labels.append(self.label())
            self.expect(";")
            spec = FeasibleSpec(mode, frozenset(labels))
        self.expect("}")
        return CompositeDecl(name, tuple(children), spec, kw.line, kw.col)


def _validate(model: SourceModel, sys_tok: Token) -> None:
    decls = {}
    for d in list(model.automata) + list(model.composites):
        if d.name in decls:
            raise CoinError(f"duplicate declaration of {d.name!r}", d.line, d.col)
        decls[d.name] = d
    ids = {}
    for a in model.automata:
        if a.component_id in ids:
            raise CoinError(
                f"duplicate component id {a.component_id} ({ids[a.component_id]} and {a.name})",
                a.line, a.col)
        ids[a.component_id] = a.name
    if model.system not in decls:
        raise CoinError(f"system {model.system!r} is not declared", sys_tok.line, sys_tok.col)
    parent = {}
    for c in model.composites:
        for child in c.children:
            if child not in decls:
                raise CoinError(f"composite {c.name} references undeclared {child!r}", c.line, c.col)
            if child in parent:
                raise CoinError(
                    f"non-tree hierarchy: {child!r} is used by both {parent[child]} and {c.name}",
                    c.line, c.col)
            parent[child] = c.name
    if model.system in parent:
        raise CoinError(f"non-tree hierarchy: system {model.system!r} has parent {parent[model.system]}",
                        sys_tok.line, sys_tok.col)
    reached = set()
    stack = [model.system]
    while stack:
        n = stack.pop()
        reached.add(n)
        d = decls[n]
        if isinstance(d, CompositeDecl):
            stack.extend(d.children)
    for name, d in decls.items():
        if name not in reached:
            raise CoinError(f"non-tree hierarchy: {name!r} is not reachable from system {model.system}",
                            d.line, d.col)


def parse_model(text: str) -> SourceModel:
    model, _ = _ModelParser(text).model()
    return model


def parse_document(text: str):
    """A model optionally followed by a ``never { ... }`` claim block."""
    return _ModelParser(text).model(allow_never=True)


def format_model(model: SourceModel) -> str:
    """Canonical pretty-printed form; re-parses to an identical SourceModel."""
    out = []
    for a in model.automata:
        out.append(f"automaton {a.name} ({a.component_id}) {{")
        out.append(f"    state {', '.join(a.states)};")
        out.append(f"    init {a.init};")
        if a.trans:
            out.append("    trans")
            body = [f"        {s} -> {t} {l}" for s, t, l in a.trans]
            out.append(",\n".join(body) + ";")
        else:
            out.append("    trans;")
        out.append("}")
    for c in model.composites:
        out.append(f"composite {c.name} {{")
        out.append(f"    {', '.join(c.children)};")
        if c.filter is not None:
            out.append(f"    {c.filter.mode} {', '.join(str(l) for l in sorted(c.filter.labels))};")
        out.append("}")
    out.append(f"system {model.system};")
    return "\n".join(out) + "\n"


def elaborate(model: SourceModel) -> HierarchyTree:
    prims = {}
    for a in model.automata:
        prims[a.name] = PrimitiveAutomaton.build(
            a.name, a.component_id, a.states, a.init, [(s, l, t) for s, t, l in a.trans])
    comps = {c.name: (c.children, c.filter or ALLOW_ALL) for c in model.composites}
    return build_tree(model.system, prims, comps)


def load_tree(text: str) -> HierarchyTree:
    return elaborate(parse_model(text))


# -- formulas ----------------------------------------------------------------

_UNARY_OPS = {"!": ltl.Not, "X": ltl.Next, "F": ltl.Finally, "G": ltl.Globally}


class _FormulaParser(_Parser):
    def parse(self):
        f = self.implication()
        if self.tok.kind != "EOF":
            if self.at(")"):
                raise self.error("unbalanced parenthesis")
            raise self.error(f"unexpected {self.tok.value!r}")
        return f

    def implication(self):
        left = self.disjunction()
        if self.accept("->"):
            return ltl.Implies(left, self.implication())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.accept("||"):
            f = ltl.Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.binary_temporal()
        while self.accept("&&"):
            f = ltl.And(f, self.binary_temporal())
        return f

    def binary_temporal(self):
        f = self.unary()
        while self.tok.kind == "IDENT" and self.tok.value in ("U", "R"):
            op = self.tok.value
            self.pos += 1
            rhs = self.unary()
            f = ltl.Until(f, rhs) if op == "U" else ltl.Release(f, rhs)
        return f

    def unary(self):
        t = self.tok
        if t.kind in ("SYM", "IDENT") and t.value in _UNARY_OPS:
            self.pos += 1
            return _UNARY_OPS[t.value](self.unary())
        return self.primary()

    def primary(self):
        t = self.tok
        if self.accept("("):
            f = self.implication()
            if not self.at(")"):
                if self.tok.kind == "EOF":
                    raise self.error("unbalanced parenthesis", t)
                raise self.error(f"expected ')', found {self.tok.value!r}")
            self.pos += 1
            return f
        if t.kind == "IDENT" and t.value in ("act", "en"):
            self.pos += 1
            if not self.at("("):
                raise self.error(f"malformed label atom: expected '(' after {t.value}")
            try:
                label = self.label()
            except CoinError as e:
                raise CoinError(f"malformed label atom: {e.message}", e.line, e.col) from None
            return ltl.Atom(t.value, label)
        if t.kind == "IDENT" and t.value in ("true", "false"):
            self.pos += 1
            return ltl.Const(t.value == "true")
        if t.kind == "EOF":
            raise self.error("unexpected end of formula")
        raise self.error(f"unexpected {t.value!r} in formula")


def parse_formula(text: str) -> ltl.Formula:
    return _FormulaParser(text).parse()


# -- never claims ------------------------------------------------------------

class _ClaimParser(_FormulaParser):
    @classmethod
    def from_parser(cls, other):
        p = cls.__new__(cls)
        p.tokens = other.tokens
        p.pos = other.pos
        p._outer = other
        return p

    def claim(self):
        from .buchi import BuchiAutomaton

        self.expect("never")
        self.expect("{")
        self.expect("state")
        names = [self.ident().value]
        while self.accept(","):
            names.append(self.ident().value)
        self.expect(";")
        index = {n: i for i, n in enumerate(names)}
        if len(index) != len(names):
            raise self.error("duplicate claim state")

        def lookup(tok):
            if tok.value not in index:
                raise CoinError(f"undeclared claim state {tok.value!r}", tok.line, tok.col)
            return index[tok.value]

        self.expect("init")
        init = lookup(self.ident())
        self.expect(";")
        self.expect("accept")
        accepting = set()
        if not self.at(";"):
            accepting.add(lookup(self.ident()))
            while self.accept(","):
                accepting.add(lookup(self.ident()))
        self.expect(";")
        self.expect("trans")
        edges = []
        if not self.at(";"):
            edges.append(self.edge(lookup))
            while self.accept(","):
                edges.append(self.edge(lookup))
        self.expect(";")
        self.expect("}")
        if getattr(self, "_outer", None) is not None:
            self._outer.pos = self.pos
        return BuchiAutomaton(tuple(names), init, frozenset(accepting), tuple(edges))

    def edge(self, lookup):
        src = lookup(self.ident())
        self.expect("->")
        dst = lookup(self.ident())
        self.expect("[")
        guard = self.guard()
        self.expect("]")
        return src, guard, dst

    def guard(self):
        if self.accept("true"):
            return frozenset()
        lits = [self.literal()]
        while self.accept("&&"):
            lits.append(self.literal())
        return frozenset(lits)

    def literal(self):
        positive = not self.accept("!")
        f = self.primary()
        if not isinstance(f, ltl.Atom):
            raise self.error("claim guards are conjunctions of atoms")
        return positive, f


def parse_claim(text: str):
    p = _ClaimParser(text)
    claim = p.claim()
    if p.tok.kind != "EOF":
        raise p.error(f"unexpected {p.tok.value!r} after never claim")
    return claim
