"""Generated benchmark models (CoIn text) and the seeded random test corpus."""
from __future__ import annotations

import random

from . import ltl
from .core import OPEN, Label

FAMILIES = ("toggles", "pipeline-tree", "ring")


def toggles(n: int) -> str:
    """``n`` independent two-state internal toggles under one allow-all composite."""
    if n < 1:
        raise ValueError("toggles needs n >= 1")
    parts = []
    for k in range(1, n + 1):
        parts.append(
            f"automaton T{k} ({k}) {{\n    state off, on;\n    init off;\n    trans\n"
            f"        off -> on ({k},flip,{k}),\n        on -> off ({k},flip,{k});\n}}")
    kids = ", ".join(f"T{k}" for k in range(1, n + 1))
    parts.append(f"composite All {{\n    {kids};\n}}")
    parts.append("system All;")
    return "\n".join(parts) + "\n"


def ring(n: int) -> str:
    """``n`` stations passing one token around; every step is a synchronisation."""
    if n < 1:
        raise ValueError("ring needs n >= 1")
    parts = []
    restricted = []
    for k in range(1, n + 1):
        prev = n if k == 1 else k - 1
        init = "has" if k == 1 else "idle"
        parts.append(
            f"automaton R{k} ({k}) {{\n    state idle, has;\n    init {init};\n    trans\n"
            f"        has -> idle ({k},pass{k},-),\n        idle -> has (-,pass{prev},{k});\n}}")
        restricted += [f"({k},pass{k},-)", f"(-,pass{prev},{k})"]
    kids = ", ".join(f"R{k}" for k in range(1, n + 1))
    parts.append(f"composite Ring {{\n    {kids};\n    restrictL {', '.join(restricted)};\n}}")
    parts.append("system Ring;")
    return "\n".join(parts) + "\n"


def pipeline_tree(n: int, d: int, tokens: int = 3) -> str:
    """``n`` producer/consumer pairs arranged as a circular pipeline.

    Stages P1, Q1, P2, Q2, ... hand jobs forward through open send/recv
    labels (producer to its consumer on ``send``, consumer to the next
    producer on ``next``). Each stage is empty, holds a job, or has processed
    it. The first ``tokens`` stages start with a job, so the reachable count
    is ``C(2n, tokens) * 2**tokens``. Leaves hang off a ``d``-deep binary
    composition tree; every composite restricts the open halves of the
    channels it closes, so a job can only move by synchronising at the
    channel's lowest common ancestor.
    """
    if n < 1 or d < 1:
        raise ValueError("pipeline-tree needs n >= 1 and d >= 1")
    m = 2 * n
    tokens = max(1, min(tokens, m - 1))
    names = []
    chan = []
    for k in range(1, n + 1):
        names += [f"P{k}", f"Q{k}"]
        chan += [f"send{k}", f"next{k}"]
    parts = []
    for s in range(m):
        cid = s + 1
        out_ch = chan[s]
        in_ch = chan[s - 1]
        init = "full" if s < tokens else "empty"
        parts.append(
            f"automaton {names[s]} ({cid}) {{\n    state empty, full, done;\n    init {init};\n"
            f"    trans\n        full -> done ({cid},work,{cid}),\n"
            f"        done -> empty ({cid},{out_ch},-),\n"
            f"        empty -> full (-,{in_ch},{cid});\n}}")

    # channel s links stage s to stage s+1 (mod m)
    composites = []
    counter = [0]

    def build(stages, depth):
        if len(stages) == 1:
            return names[stages[0]], set(stages)
        if depth >= d:
            groups = [[s] for s in stages]
        else:
            half = (len(stages) + 1) // 2
            groups = [stages[:half], stages[half:]]
        kids = []
        covered = set()
        child_cover = []
        for g in groups:
            name, cov = build(g, depth + 1)
            kids.append(name)
            child_cover.append(cov)
            covered |= cov
        closed = []
        for s in sorted(covered):
            t = (s + 1) % m
            if t in covered and not any(s in c and t in c for c in child_cover):
                closed += [f"({s + 1},{chan[s]},-)", f"(-,{chan[s]},{t + 1})"]
        counter[0] += 1
        cname = "Root" if depth == 0 else f"N{counter[0]}"
        body = f"composite {cname} {{\n    {', '.join(kids)};\n"
        if closed:
            body += f"    restrictL {', '.join(closed)};\n"
        composites.append(body + "}")
        return cname, covered

    root, _ = build(list(range(m)), 0)
    if m == 1:
        root = names[0]
    return "\n".join(parts + composites + [f"system {root};"]) + "\n"


def generate(family: str, n: int, d: int = 1) -> str:
    if family == "toggles":
        return toggles(n)
    if family == "ring":
        return ring(n)
    if family == "pipeline-tree":
        return pipeline_tree(n, d)
    raise ValueError(f"unknown family {family!r}")


# -- random corpus -----------------------------------------------------------

def random_model(rng: random.Random, max_leaves=6, max_states=4, max_depth=4,
                 actions="abc", filter_prob=0.6, internal_prob=1 / 3, min_trans=0,
                 local_leaf_prob=0.0, connected=False) -> str:
    """A random well-formed CoIn model: random tree shape, automata and filters.

    ``internal_prob`` is the chance that a generated label is internal; the
    rest are split evenly between inputs and outputs. With probability
    ``local_leaf_prob`` a leaf gets internal labels only and moves only to
    higher-numbered states, so its local behaviour is finite. ``connected``
    adds a spanning tree of transitions so every local state is reachable
    from ``s0`` within its automaton.
    """
    nleaves = rng.randint(1, max_leaves)
    leaves = []
    for k in range(1, nleaves + 1):
        ns = rng.randint(1, max_states)
        states = [f"s{q}" for q in range(ns)]
        trans = set()
        local = local_leaf_prob > 0 and rng.random() < local_leaf_prob

        def label():
            a = rng.choice(actions)
            if local or rng.random() < internal_prob:
                kind = "int"
            else:
                kind = rng.choice(("in", "out"))
            m, r = {"in": (OPEN, k), "out": (k, OPEN), "int": (k, k)}[kind]
            return Label(m, a, r)

        if connected:
            for q in range(1, ns):
                trans.add((states[rng.randrange(q)], states[q], label()))
        for _ in range(rng.randint(min_trans, max(min_trans, 2 * ns + 1))):
            src, dst = rng.randrange(ns), rng.randrange(ns)
            if local:
                if src == dst:
                    continue
                src, dst = min(src, dst), max(src, dst)
            trans.add((states[src], states[dst], label()))
        leaves.append((f"A{k}", k, states, sorted(trans)))

    composites = []
    counter = [0]

    def build(names, depth):
        if len(names) == 1 and (depth > 0 or rng.random() < 0.5):
            return names[0]
        if depth >= max_depth - 1 or len(names) <= 2:
            groups = [[x] for x in names]
        else:
            cuts = sorted(rng.sample(range(1, len(names)), rng.randint(1, min(3, len(names) - 1))))
            bounds = [0] + cuts + [len(names)]
            groups = [names[a:b] for a, b in zip(bounds, bounds[1:])]
        kids = [build(g, depth + 1) for g in groups]
        counter[0] += 1
        name = f"C{counter[0]}"
        filt = ""
        if rng.random() < filter_prob:
            universe = []
            for _, cid, _, trans in leaves:
                for _, _, l in trans:
                    universe.append(l)
            ids = [cid for _, cid, _, _ in leaves]
            for _ in range(4):
                universe.append(Label(rng.choice(ids), rng.choice(actions), rng.choice(ids)))
            picked = sorted(set(rng.sample(universe, min(len(universe), rng.randint(1, 4))))) if universe else []
            if picked:
                mode = rng.choice(("restrictL", "onlyL", "restrictL"))
                filt = f"    {mode} {', '.join(str(l) for l in picked)};\n"
        composites.append(f"composite {name} {{\n    {', '.join(kids)};\n{filt}}}")
        return name

    names = [n for n, _, _, _ in leaves]
    root = build(names, 0)
    parts = []
    for name, cid, states, trans in leaves:
        body = ",\n".join(f"        {s} -> {t} {l}" for s, t, l in trans)
        tr = f"    trans\n{body};" if trans else "    trans;"
        parts.append(f"automaton {name} ({cid}) {{\n    state {', '.join(states)};\n"
                     f"    init s0;\n{tr}\n}}")
    return "\n".join(parts + composites + [f"system {root};"]) + "\n"


def random_formula(rng: random.Random, atoms, depth: int, ops=None):
    """A random CI-LTL formula of at most ``depth`` levels over ``atoms``."""
    unary = [ltl.Not, ltl.Finally, ltl.Globally, ltl.Next]
    binary = [ltl.And, ltl.Or, ltl.Implies, ltl.Until, ltl.Release]
    if ops is not None:
        unary = [u for u in unary if u in ops]
        binary = [b for b in binary if b in ops]
    if depth <= 1 or rng.random() < 0.25:
        return rng.choice(atoms)
    if rng.random() < 0.45:
        return rng.choice(unary)(random_formula(rng, atoms, depth - 1, ops))
    cls = rng.choice(binary)
    return cls(random_formula(rng, atoms, depth - 1, ops), random_formula(rng, atoms, depth - 1, ops))
