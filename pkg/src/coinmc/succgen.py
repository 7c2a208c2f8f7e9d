"""On-the-fly successor generation for hierarchical CI automata.

Two interchangeable generators: the recursive one combines children's
transitions at every internal node; the LCA one uses tables computed once
per tree, so a state's successors come from flat per-leaf lookups.

Both work on encoded states (``bytes``/``array`` vectors of local indices,
see :class:`StateCodec`); the public ``successors_*`` functions take and
return plain tuples.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import NamedTuple

from .core import (ALLOW_ALL, HierarchyTree, Label, complement, feasible,
                   intersect, intersect_all)


class Inherited(NamedTuple):
    leaf: int


class Sync(NamedTuple):
    out_leaf: int
    in_leaf: int
    lca: int


class Transition(NamedTuple):
    label: Label
    kind: tuple  # Inherited | Sync
    successor: tuple


class StateCodec:
    """Fixed-width packing of local-state vectors (1 byte per leaf, 2 if needed)."""

    def __init__(self, sizes):
        self.width = 1 if max(sizes, default=1) <= 256 else 2
        self.leaves = len(sizes)

    def encode(self, state) -> bytes:
        if self.width == 1:
            return bytes(state)
        return b"".join(q.to_bytes(2, "little") for q in state)

    def decode(self, data) -> tuple:
        if self.width == 1:
            return tuple(data[: self.leaves])
        n = self.leaves * 2
        return tuple(memoryview(data[:n]).cast("H"))

    def piece(self, q) -> bytes:
        return q.to_bytes(self.width, "little")

    def locals(self, data):
        """Indexable view of the local states (no copy for width 1)."""
        if self.width == 1:
            return data
        return memoryview(data[: self.leaves * 2]).cast("H")


def _sort_key(t):
    return (t.label, t.successor)


@dataclass(frozen=True)
class PrecomputedTables:
    lca: dict
    up_filter: tuple
    to_lca_filter: dict
    from_lca_filter: dict
    static_partners: dict
    # compiled per-local-state move tables, derived from the filters above:
    # inherited[i][q] -> ((label, target), ...)
    # syncs[i][q] -> ((j, {q_j: ((label, target_i, target_j), ...)}), ...)
    inherited: tuple
    syncs: tuple


def lowest_common_ancestor(tree: HierarchyTree, a: int, b: int) -> int:
    """LCA of two tree nodes by walking parent links."""
    da, db = tree.depth(a), tree.depth(b)
    while da > db:
        a = tree.nodes[a].parent
        da -= 1
    while db > da:
        b = tree.nodes[b].parent
        db -= 1
    while a != b:
        a = tree.nodes[a].parent
        b = tree.nodes[b].parent
    return a


def precompute(tree: HierarchyTree) -> PrecomputedTables:
    nleaves = len(tree.leaves)
    nodes = tree.nodes

    lca = {}
    for i in range(nleaves):
        for j in range(i + 1, nleaves):
            lca[i, j] = lowest_common_ancestor(tree, tree.leaf_nodes[i], tree.leaf_nodes[j])

    from_lca = {}
    for n in tree.internal_nodes:
        from_lca[n.index] = intersect_all(nodes[v].spec for v in tree.path_to_root(n.index))

    up_filter = []
    to_lca = {}
    for i in range(nleaves):
        path = tree.path_to_root(tree.leaf_nodes[i])[1:]
        acc = ALLOW_ALL
        for v in path:
            to_lca[i, v] = acc
            acc = intersect(acc, nodes[v].spec)
        up_filter.append(acc)

    outputs, inputs = {}, {}
    for i, leaf in enumerate(tree.leaves):
        for l in leaf.alphabet:
            if l.is_output:
                outputs.setdefault(l.action, set()).add(i)
            elif l.is_input:
                inputs.setdefault(l.action, set()).add(i)
    partners = {}
    for a, senders in outputs.items():
        receivers = inputs.get(a, set())
        for i in senders:
            ps = tuple(sorted(receivers - {i}))
            if ps:
                partners[i, a, "out"] = ps
        for j in receivers:
            ps = tuple(sorted(senders - {j}))
            if ps:
                partners[j, a, "in"] = ps

    def pair_lca(i, j):
        return lca[min(i, j), max(i, j)]

    inherited = []
    syncs = []
    for i, leaf in enumerate(tree.leaves):
        inh_i = []
        syn_i = []
        for q, outgoing in enumerate(leaf.outgoing):
            inh_i.append(tuple((l, t) for l, t in outgoing if feasible(up_filter[i], l)))
            per_partner = {}
            for lo, ti in outgoing:
                if not lo.is_output:
                    continue
                for j in partners.get((i, lo.action, "out"), ()):
                    lam = pair_lca(i, j)
                    if not feasible(to_lca[i, lam], lo):
                        continue
                    jtable = per_partner.setdefault(j, {})
                    for qj, jout in enumerate(tree.leaves[j].outgoing):
                        for li, tj in jout:
                            comb = complement(lo, li)
                            if comb is None:
                                continue
                            if feasible(to_lca[j, lam], li) and feasible(from_lca[lam], comb):
                                jtable.setdefault(qj, []).append((comb, ti, tj))
            syn_i.append(tuple(
                (j, {qj: tuple(v) for qj, v in table.items()})
                for j, table in sorted(per_partner.items()) if table))
        inherited.append(tuple(inh_i))
        syncs.append(tuple(syn_i))

    return PrecomputedTables(lca, tuple(up_filter), to_lca, from_lca, partners,
                             tuple(inherited), tuple(syncs))


class LcaGenerator:
    """Successor generation from precomputed tables.

    Patches are prebuilt so that a successor is a couple of byte-slice
    concatenations of the source encoding.
    """

    def __init__(self, tree: HierarchyTree, tables: PrecomputedTables | None = None, codec=None):
        self.tree = tree
        self.tables = tables or precompute(tree)
        self.codec = codec or StateCodec([len(l.states) for l in tree.leaves])
        w = self.codec.width
        piece = self.codec.piece
        self._inh = tuple(
            tuple(tuple((l, i * w, (i + 1) * w, piece(t)) for l, t in moves) for moves in per_leaf)
            for i, per_leaf in enumerate(self.tables.inherited))
        syn = []
        for i, per_leaf in enumerate(self.tables.syncs):
            rows = []
            for entries in per_leaf:
                row = []
                for j, byq in entries:
                    lo, hi = (i, j) if i < j else (j, i)
                    cooked = {}
                    for qj, combos in byq.items():
                        cl = []
                        for comb, ti, tj in combos:
                            plo, phi = (piece(ti), piece(tj)) if i < j else (piece(tj), piece(ti))
                            cl.append((comb, lo * w, (lo + 1) * w, plo, hi * w, (hi + 1) * w, phi))
                        cooked[qj] = tuple(cl)
                    row.append((j, cooked))
                rows.append(tuple(row))
            syn.append(tuple(rows))
        self._syn = tuple(syn)

    def successor_states(self, b) -> list:
        """Encoded successors of the encoded state ``b`` (unordered)."""
        out = []
        locs = self.codec.locals(b)
        inh, syn = self._inh, self._syn
        for i, q in enumerate(locs):
            for _l, s, e, p in inh[i][q]:
                out.append(b[:s] + p + b[e:])
            for j, byq in syn[i][q]:
                combos = byq.get(locs[j])
                if combos:
                    for _l, s1, e1, p1, s2, e2, p2 in combos:
                        out.append(b[:s1] + p1 + b[e1:s2] + p2 + b[e2:])
        return out

    def transitions(self, b) -> list:
        """``(label, kind, encoded successor)`` triples, unordered."""
        out = []
        locs = self.codec.locals(b)
        lca = self.tables.lca
        for i, q in enumerate(locs):
            for l, s, e, p in self._inh[i][q]:
                out.append((l, Inherited(i), b[:s] + p + b[e:]))
            for j, byq in self._syn[i][q]:
                combos = byq.get(locs[j])
                if combos:
                    kind = Sync(i, j, lca[min(i, j), max(i, j)])
                    for l, s1, e1, p1, s2, e2, p2 in combos:
                        out.append((l, kind, b[:s1] + p1 + b[e1:s2] + p2 + b[e2:]))
        return out


class RecursiveGenerator:
    """Combines children's transitions bottom-up at every internal node.

    Each internal node owns a reusable scratch list, so repeated calls on one
    generator do not allocate per-node buffers; a generator is not shareable
    between concurrent callers.
    """

    def __init__(self, tree: HierarchyTree, codec=None):
        self.tree = tree
        self.codec = codec or StateCodec([len(l.states) for l in tree.leaves])
        self._scratch = [[] for _ in tree.nodes]
        self._leaf_moves = tuple(
            tuple(tuple((l, ((i, t),)) for l, t in out) for out in leaf.outgoing)
            for i, leaf in enumerate(tree.leaves))
        w = self.codec.width
        self._pieces = [[self.codec.piece(q) for q in range(len(leaf.states))] for leaf in tree.leaves]
        self._w = w
        # precomputed per-node data only restates the tree; no filter intersection
        self._node_info = tuple(
            (n.is_leaf, n.leaf, n.children, n.spec) for n in tree.nodes)

    def _moves(self, v, locs):
        is_leaf, leaf, kids, spec = self._node_info[v]
        if is_leaf:
            return self._leaf_moves[leaf][locs[leaf]]
        buf = self._scratch[v]
        buf.clear()
        child_moves = [self._moves(c, locs) for c in kids]
        for cm in child_moves:
            for l, mv in cm:
                if feasible(spec, l):
                    buf.append((l, mv))
        if len(child_moves) > 1:
            for k1, cm1 in enumerate(child_moves):
                for lo, mo in cm1:
                    if not lo.is_output:
                        continue
                    for k2, cm2 in enumerate(child_moves):
                        if k2 == k1:
                            continue
                        for li, mi in cm2:
                            if li.sender == 0 and li.action == lo.action:
                                comb = Label(lo.sender, lo.action, li.receiver)
                                if feasible(spec, comb):
                                    buf.append((comb, mo + mi))
        return buf

    def _apply(self, b, moves):
        w = self._w
        for leaf, t in sorted(moves):
            b = b[: leaf * w] + self._pieces[leaf][t] + b[(leaf + 1) * w:]
        return b

    def successor_states(self, b) -> list:
        locs = self.codec.locals(b)
        return [self._apply(b, mv) for _l, mv in self._moves(self.tree.root, locs)]

    def transitions(self, b) -> list:
        locs = self.codec.locals(b)
        out = []
        for l, mv in self._moves(self.tree.root, locs):
            if len(mv) == 1:
                kind = Inherited(mv[0][0])
            else:
                (i, _), (j, _) = mv
                kind = Sync(i, j, _lca_of_leaves(self.tree, i, j))
            out.append((l, kind, self._apply(b, mv)))
        return out


def _lca_of_leaves(tree, i, j):
    return lowest_common_ancestor(tree, tree.leaf_nodes[i], tree.leaf_nodes[j])


def make_generator(tree, algorithm="lca", tables=None, codec=None):
    if algorithm == "lca":
        return LcaGenerator(tree, tables, codec)
    if algorithm == "recursive":
        return RecursiveGenerator(tree, codec)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _public(gen, state) -> list:
    codec = gen.codec
    ts = [Transition(l, k, codec.decode(s)) for l, k, s in gen.transitions(codec.encode(state))]
    ts.sort(key=_sort_key)
    return ts


def successors_recursive(tree: HierarchyTree, state) -> list:
    """Outgoing transitions of ``state``, sorted by (label, successor)."""
    return _public(RecursiveGenerator(tree), tuple(state))


def successors_lca(tree: HierarchyTree, tables: PrecomputedTables, state) -> list:
    """Same contract as :func:`successors_recursive`, answered from ``tables``."""
    return _public(LcaGenerator(tree, tables), tuple(state))


def tables_size(tables: PrecomputedTables) -> int:
    """Deep size in bytes of the precomputed tables (shared objects counted once)."""
    seen = set()
    stack = [tables]
    total = 0
    while stack:
        obj = stack.pop()
        if id(obj) in seen:
            continue
        seen.add(id(obj))
        total += sys.getsizeof(obj)
        if isinstance(obj, dict):
            stack.extend(obj.keys())
            stack.extend(obj.values())
        elif isinstance(obj, (tuple, list, set, frozenset)):
            stack.extend(obj)
        elif hasattr(obj, "__dataclass_fields__"):
            stack.extend(getattr(obj, f) for f in obj.__dataclass_fields__)
    return total
