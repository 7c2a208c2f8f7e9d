"""Tableau translation of CI-LTL to edge-guarded Büchi automata (never claims).

Guards are conjunctions of literals ``(positive, Atom)``; several edges
between the same pair of states form a DNF. The construction is the
classic on-the-fly node expansion, followed by counter degeneralisation,
guard pruning and a bisimulation-style state merge.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import ltl
from .ltl import (And, Atom, Const, Finally, Globally, Next, Not, Or, Release,
                  Until)


@dataclass(frozen=True)
class BuchiAutomaton:
    states: tuple  # display names
    initial: int
    accepting: frozenset
    edges: tuple  # (src, guard: frozenset of literals, dst)

    def out_edges(self):
        out = [[] for _ in self.states]
        for s, g, t in self.edges:
            out[s].append((g, t))
        return out

    @property
    def atoms(self) -> set:
        return {a for _, g, _ in self.edges for _, a in g}


def guard_holds(guard, letter) -> bool:
    for positive, atom in guard:
        if ltl.atom_holds(atom, letter) != positive:
            return False
    return True


def guard_satisfiable(guard) -> bool:
    """Syntactic consistency: at most one action per step, and ``act(l)`` implies ``en(l)``."""
    pos_act = [a.label for p, a in guard if p and a.kind == "act"]
    if len(set(pos_act)) > 1:
        return False
    for p, a in guard:
        if (not p, a) in guard:
            return False
    if pos_act:
        l = pos_act[0]
        if (False, Atom("en", l)) in guard or (False, Atom("act", l)) in guard:
            return False
    return True


def format_guard(guard) -> str:
    if not guard:
        return "true"
    lits = sorted(guard, key=lambda x: (str(x[1]), not x[0]))
    return " && ".join(("" if p else "!") + str(a) for p, a in lits)


# -- node expansion ------------------------------------------------------------

def _desugar(f):
    """NNF with F/G rewritten to U/R."""
    if isinstance(f, Finally):
        return Until(ltl.TRUE, _desugar(f.arg))
    if isinstance(f, Globally):
        return Release(ltl.FALSE, _desugar(f.arg))
    if isinstance(f, (Const, Atom)):
        return f
    if isinstance(f, Not):
        return f
    if isinstance(f, Next):
        return Next(_desugar(f.arg))
    return type(f)(_desugar(f.left), _desugar(f.right))


def _is_literal(f) -> bool:
    return isinstance(f, (Const, Atom)) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def _negated_literal(f):
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Const):
        return Const(not f.value)
    return Not(f)


def _tableau(formula):
    """Generalised Büchi graph: nodes (old, next) with incoming sets."""
    nodes = []  # dicts: incoming, old, next
    index = {}

    # explicit stack of pending nodes: (incoming, new, old, next)
    stack = [({-1}, frozenset([formula]), frozenset(), frozenset())]
    while stack:
        incoming, new, old, nxt = stack.pop()
        if not new:
            key = (old, nxt)
            if key in index:
                nodes[index[key]]["incoming"] |= incoming
                continue
            nid = len(nodes)
            index[key] = nid
            nodes.append({"incoming": set(incoming), "old": old, "next": nxt})
            stack.append(({nid}, nxt, frozenset(), frozenset()))
            continue
        eta = min(new, key=_formula_order)
        new = new - {eta}
        if eta in old:
            stack.append((incoming, new, old, nxt))
            continue
        if _is_literal(eta):
            if eta == ltl.FALSE or _negated_literal(eta) in old:
                continue
            stack.append((incoming, new, old | {eta}, nxt))
        elif isinstance(eta, And):
            stack.append((incoming, new | ({eta.left, eta.right} - old), old | {eta}, nxt))
        elif isinstance(eta, Next):
            stack.append((incoming, new, old | {eta}, nxt | {eta.arg}))
        elif isinstance(eta, Or):
            stack.append((incoming, new | ({eta.right} - old), old | {eta}, nxt))
            stack.append((incoming, new | ({eta.left} - old), old | {eta}, nxt))
        elif isinstance(eta, Until):
            stack.append((incoming, new | ({eta.right} - old), old | {eta}, nxt))
            stack.append((incoming, new | ({eta.left} - old), old | {eta}, nxt | {eta}))
        elif isinstance(eta, Release):
            stack.append((incoming, new | ({eta.left, eta.right} - old), old | {eta}, nxt))
            stack.append((incoming, new | ({eta.right} - old), old | {eta}, nxt | {eta}))
        else:
            raise TypeError(f"not in negation normal form: {eta}")
    return nodes


def _formula_order(f):
    return (0 if _is_literal(f) else 1, str(f))


def _subformulas(f):
    out = {f}
    for c in ltl.children(f):
        out |= _subformulas(c)
    return out


def _node_guard(node):
    lits = set()
    for f in node["old"]:
        if isinstance(f, Atom):
            lits.add((True, f))
        elif isinstance(f, Not):
            lits.add((False, f.arg))
    return frozenset(lits)


def to_buchi(formula, simplify: bool = True) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the letter sequences satisfying ``formula``.

    ``formula`` must be in negation normal form; guards are read on the
    letter of the step being taken.
    """
    if not ltl.is_nnf(formula):
        raise ValueError("to_buchi expects a formula in negation normal form")
    f = _desugar(formula)
    nodes = _tableau(f)
    untils = sorted((g for g in _subformulas(f) if isinstance(g, Until)), key=str)
    acc_sets = [
        {i for i, n in enumerate(nodes) if u not in n["old"] or u.right in n["old"]}
        for u in untils
    ]

    # generalised automaton over {init} + nodes, edges guarded by target labels
    succ = {-1: []}
    for i in range(len(nodes)):
        succ[i] = []
    for i, n in enumerate(nodes):
        g = _node_guard(n)
        for src in n["incoming"]:
            succ[src].append((g, i))

    # degeneralise with a counter over the acceptance sets
    k = len(acc_sets)
    start = (-1, 0)
    ids = {start: 0}
    order = [start]
    edges = []
    queue = deque([start])
    while queue:
        q, c = queue.popleft()
        if k and q != -1 and q in acc_sets[c]:
            c2 = (c + 1) % k
        else:
            c2 = c
        for g, t in sorted(succ[q], key=lambda e: (format_guard(e[0]), e[1])):
            if not guard_satisfiable(g):
                continue
            key = (t, c2)
            if key not in ids:
                ids[key] = len(order)
                order.append(key)
                queue.append(key)
            edges.append((ids[(q, c)], g, ids[key]))
    if k == 0:
        accepting = {i for i, (q, _) in enumerate(order) if q != -1}
    else:
        accepting = {i for i, (q, c) in enumerate(order) if q != -1 and c == 0 and q in acc_sets[0]}
    names = tuple(f"n{i}" for i in range(len(order)))
    aut = BuchiAutomaton(names, 0, frozenset(accepting), tuple(edges))
    return simplify_automaton(aut) if simplify else aut


# -- simplification ------------------------------------------------------------

def _prune_dead(aut):
    """Drop states that cannot reach an accepting cycle."""
    n = len(aut.states)
    out = aut.out_edges()
    comp = strongly_connected(n, [[t for _, t in o] for o in out])
    nontrivial = set()
    for s in range(n):
        if any(comp[t] == comp[s] for _, t in out[s]):
            nontrivial.add(comp[s])
    good = {s for s in aut.accepting if comp[s] in nontrivial}
    rev = [[] for _ in range(n)]
    for s, _, t in aut.edges:
        rev[t].append(s)
    live = set(good)
    stack = list(good)
    while stack:
        t = stack.pop()
        for s in rev[t]:
            if s not in live:
                live.add(s)
                stack.append(s)
    return live


def strongly_connected(n, adj):
    """Tarjan's algorithm, iterative; returns component id per vertex."""
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [None] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for k in range(pi, len(adj[v])):
                w = adj[v][k]
                if index[w] is None:
                    work.append((v, k + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comp


def _reduce_guards(pairs):
    """Remove edges whose guard is subsumed by a weaker guard to the same target."""
    pairs = set(pairs)
    keep = set()
    for g, t in pairs:
        if not any(t2 == t and g2 < g for g2, t2 in pairs):
            keep.add((g, t))
    return frozenset(keep)


def simplify_automaton(aut: BuchiAutomaton) -> BuchiAutomaton:
    live = _prune_dead(aut)
    if aut.initial not in live:
        return BuchiAutomaton(("s0",), 0, frozenset(), ((0, frozenset(), 0),))
    states = sorted(live)
    out = {s: [] for s in states}
    for s, g, t in aut.edges:
        if s in live and t in live:
            out[s].append((g, t))

    init = aut.initial
    has_incoming = any(t == init for s in states for _, t in out[s])
    members = [s for s in states if s != init or has_incoming]

    # partition refinement on (accepting, outgoing (guard, block))
    block = {s: (s in aut.accepting) for s in members}
    while True:
        sig = {s: (block[s], _reduce_guards((g, block[t]) for g, t in out[s])) for s in members}
        ids = {}
        new_block = {}
        for s in members:
            new_block[s] = ids.setdefault(sig[s], len(ids))
        if len(set(new_block.values())) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    final = {s: ("b", block[s]) for s in members}
    if init not in block:
        init_sig = _reduce_guards((g, block[t]) for g, t in out[init])
        match = None
        for s in members:
            if _reduce_guards((g, block[t]) for g, t in out[s]) == init_sig:
                match = s
                break
        final[init] = ("b", block[match]) if match is not None else ("init",)

    # renumber breadth-first from the initial state
    order = {final[init]: 0}
    queue = deque([init])
    rep = {final[init]: init}
    for s in members:
        rep.setdefault(final[s], s)
    edges = set()
    while queue:
        s = queue.popleft()
        src = order[final[s]]
        for g, t in sorted(_reduce_guards((g, final[t]) for g, t in out[s]),
                           key=lambda e: (format_guard(e[0]), str(e[1]))):
            if t not in order:
                order[t] = len(order)
                queue.append(rep[t])
            edges.add((src, g, order[t]))
    accepting = frozenset(order[final[s]] for s in members if s in aut.accepting and final[s] in order)
    names = tuple(f"s{i}" for i in range(len(order)))
    ordered = tuple(sorted(edges, key=lambda e: (e[0], format_guard(e[1]), e[2])))
    return BuchiAutomaton(names, 0, accepting, ordered)


# -- acceptance on lasso words ------------------------------------------------

def accepts_lasso(aut: BuchiAutomaton, letters, loop: int) -> bool:
    """Does some run of ``aut`` on ``letters[:loop] (letters[loop:])^w`` visit accepting states infinitely often?"""
    n = len(letters)
    succ_pos = [k + 1 for k in range(n - 1)] + [loop]
    out = aut.out_edges()
    start = (aut.initial, 0)
    adj = {}
    seen = {start}
    stack = [start]
    while stack:
        q, k = stack.pop()
        nxt = [(t, succ_pos[k]) for g, t in out[q] if guard_holds(g, letters[k])]
        adj[(q, k)] = nxt
        for x in nxt:
            if x not in seen:
                seen.add(x)
                stack.append(x)
    verts = sorted(seen)
    vid = {v: i for i, v in enumerate(verts)}
    comp = strongly_connected(len(verts), [[vid[w] for w in adj[v]] for v in verts])
    for v in verts:
        q, k = v
        if q in aut.accepting and k >= loop:
            if any(comp[vid[w]] == comp[vid[v]] for w in adj[v]):
                return True
    return False


def format_claim(aut: BuchiAutomaton) -> str:
    lines = ["never {"]
    lines.append(f"    state {', '.join(aut.states)};")
    lines.append(f"    init {aut.states[aut.initial]};")
    acc = ", ".join(aut.states[s] for s in sorted(aut.accepting))
    lines.append(f"    accept {acc};" if acc else "    accept;")
    if aut.edges:
        lines.append("    trans")
        body = [f"        {aut.states[s]} -> {aut.states[t]} [{format_guard(g)}]" for s, g, t in aut.edges]
        lines.append(",\n".join(body) + ";")
    else:
        lines.append("    trans;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def never_claim(formula) -> BuchiAutomaton:
    """Claim automaton for the negation of ``formula``."""
    return to_buchi(ltl.negate(formula))
