"""Semantic core: interaction labels, feasible-label sets, the hierarchy tree.

A label is a triple ``(sender, action, receiver)``; the open endpoint is
encoded as ``OPEN`` (0), component ids start at 1.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

OPEN = 0

ALLOW_ALL_EXCEPT = "restrictL"
ALLOW_ONLY = "onlyL"


class Label(NamedTuple):
    sender: int
    action: str
    receiver: int

    @property
    def is_input(self) -> bool:
        return self.sender == OPEN

    @property
    def is_output(self) -> bool:
        return self.receiver == OPEN

    @property
    def is_internal(self) -> bool:
        return self.sender != OPEN and self.receiver != OPEN

    def __str__(self) -> str:
        m = "-" if self.sender == OPEN else str(self.sender)
        n = "-" if self.receiver == OPEN else str(self.receiver)
        return f"({m},{self.action},{n})"


def make_label(sender: int, action: str, receiver: int) -> Label:
    """Build a label, rejecting the doubly-open triple."""
    if sender == OPEN and receiver == OPEN:
        raise ValueError(f"label (-,{action},-) has no endpoint")
    if sender < 0 or receiver < 0:
        raise ValueError("component ids are positive integers")
    return Label(sender, action, receiver)


def complement(out: Label, inp: Label) -> Label | None:
    """The synchronisation label formed by an output and an input, if any."""
    if out.is_output and inp.is_input and out.action == inp.action:
        return Label(out.sender, out.action, inp.receiver)
    return None


@dataclass(frozen=True)
class FeasibleSpec:
    """Composition parameter of an internal node.

    ``mode`` is ``restrictL`` (blacklist) or ``onlyL`` (whitelist).
    """

    mode: str = ALLOW_ALL_EXCEPT
    labels: frozenset = frozenset()

    def __post_init__(self):
        if self.mode not in (ALLOW_ALL_EXCEPT, ALLOW_ONLY):
            raise ValueError(f"unknown filter mode {self.mode!r}")
        if not isinstance(self.labels, frozenset):
            object.__setattr__(self, "labels", frozenset(self.labels))

    def __contains__(self, label) -> bool:
        return feasible(self, label)

    @property
    def allows_all(self) -> bool:
        return self.mode == ALLOW_ALL_EXCEPT and not self.labels

    def __str__(self) -> str:
        if self.allows_all:
            return "allow-all"
        body = ", ".join(str(l) for l in sorted(self.labels))
        return f"{self.mode} {{{body}}}"


ALLOW_ALL = FeasibleSpec()


def feasible(spec: FeasibleSpec, label: Label) -> bool:
    if spec.mode == ALLOW_ALL_EXCEPT:
        return label not in spec.labels
    return label in spec.labels


def intersect(a: FeasibleSpec, b: FeasibleSpec) -> FeasibleSpec:
    """Symbolic intersection: the result admits exactly what both admit."""
    if a.mode == ALLOW_ONLY and b.mode == ALLOW_ONLY:
        return FeasibleSpec(ALLOW_ONLY, a.labels & b.labels)
    if a.mode == ALLOW_ONLY:
        return FeasibleSpec(ALLOW_ONLY, a.labels - b.labels)
    if b.mode == ALLOW_ONLY:
        return FeasibleSpec(ALLOW_ONLY, b.labels - a.labels)
    return FeasibleSpec(ALLOW_ALL_EXCEPT, a.labels | b.labels)


def intersect_all(specs) -> FeasibleSpec:
    result = ALLOW_ALL
    for s in specs:
        result = intersect(result, s)
    return result


@dataclass(frozen=True)
class PrimitiveAutomaton:
    """A leaf CI automaton with dense state indices.

    ``outgoing[q]`` is a tuple of ``(label, target)`` pairs sorted by
    ``(label, target)``; duplicates are removed on construction.
    """

    name: str
    component_id: int
    states: tuple
    init: int
    outgoing: tuple

    @classmethod
    def build(cls, name, component_id, states, init, transitions):
        """``transitions`` is an iterable of ``(src, Label, dst)`` with state names or indices."""
        states = tuple(states)
        index = {s: i for i, s in enumerate(states)}

        def idx(s):
            return s if isinstance(s, int) else index[s]

        out = [set() for _ in states]
        for src, label, dst in transitions:
            out[idx(src)].add((label, idx(dst)))
        return cls(name, component_id, states, idx(init), tuple(tuple(sorted(o)) for o in out))

    @property
    def alphabet(self) -> frozenset:
        return frozenset(l for o in self.outgoing for l, _ in o)

    @property
    def transition_count(self) -> int:
        return sum(len(o) for o in self.outgoing)


@dataclass(frozen=True)
class Node:
    index: int
    name: str
    parent: int | None
    children: tuple = ()
    spec: FeasibleSpec | None = None
    leaf: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None


@dataclass(frozen=True)
class HierarchyTree:
    """Nodes in preorder (root first); ``leaf_nodes[i]`` is the node of leaf ``i``."""

    nodes: tuple
    leaves: tuple
    leaf_nodes: tuple = field(default=())

    root = 0

    def __post_init__(self):
        if not self.leaf_nodes:
            ln = [0] * len(self.leaves)
            for n in self.nodes:
                if n.is_leaf:
                    ln[n.leaf] = n.index
            object.__setattr__(self, "leaf_nodes", tuple(ln))

    @property
    def internal_nodes(self) -> list:
        return [n for n in self.nodes if not n.is_leaf]

    def path_to_root(self, node: int) -> list:
        """Node indices from ``node`` (inclusive) up to the root (inclusive)."""
        path = []
        cur = node
        while cur is not None:
            path.append(cur)
            cur = self.nodes[cur].parent
        return path

    def depth(self, node: int) -> int:
        return len(self.path_to_root(node)) - 1

    def subtree_leaves(self, node: int) -> list:
        n = self.nodes[node]
        if n.is_leaf:
            return [n.leaf]
        return [l for c in n.children for l in self.subtree_leaves(c)]

    def leaf_index_by_name(self, name: str) -> int:
        for i, leaf in enumerate(self.leaves):
            if leaf.name == name:
                return i
        raise KeyError(name)

    def node_by_name(self, name: str) -> int:
        for n in self.nodes:
            if n.name == name:
                return n.index
        raise KeyError(name)

    def format_state(self, state) -> str:
        return "(" + ", ".join(leaf.states[q] for leaf, q in zip(self.leaves, state)) + ")"


def build_tree(root_name, primitives: dict, composites: dict) -> HierarchyTree:
    """Assemble a tree from name maps.

    ``primitives`` maps names to PrimitiveAutomaton, ``composites`` maps names
    to ``(children names, FeasibleSpec)``. Leaves are numbered left to right.
    """
    nodes = []
    leaves = []

    def visit(name, parent):
        idx = len(nodes)
        if name in primitives:
            nodes.append(Node(idx, name, parent, leaf=len(leaves)))
            leaves.append(primitives[name])
            return idx
        children_names, spec = composites[name]
        nodes.append(None)
        kids = tuple(visit(c, idx) for c in children_names)
        nodes[idx] = Node(idx, name, parent, kids, spec or ALLOW_ALL)
        return idx

    visit(root_name, None)
    return HierarchyTree(tuple(nodes), tuple(leaves))


def initial_state(tree: HierarchyTree) -> tuple:
    return tuple(leaf.init for leaf in tree.leaves)


class BoundExceeded(Exception):
    pass


@dataclass
class ExplicitLTS:
    """A fully materialised transition system over global states."""

    initial: tuple
    states: set
    transitions: list  # (source, Label, target)

    def outgoing(self, state) -> list:
        return sorted((l, t) for s, l, t in self.transitions if s == state)

    def by_source(self) -> dict:
        out = {s: [] for s in self.states}
        for s, l, t in self.transitions:
            out[s].append((l, t))
        for v in out.values():
            v.sort()
        return out


def _compose_node(tree, node_idx, bound):
    """Composite transition relation of a subtree over all its local vectors.

    Returns ``(leaf order, relation)`` where relation maps a tuple of local
    states (in subtree leaf order) to a list of (label, successor tuple).
    """
    node = tree.nodes[node_idx]
    if node.is_leaf:
        leaf = tree.leaves[node.leaf]
        rel = {(q,): [(l, (t,)) for l, t in leaf.outgoing[q]] for q in range(len(leaf.states))}
        return [node.leaf], rel

    parts = [_compose_node(tree, c, bound) for c in node.children]
    size = 1
    for _, rel in parts:
        size *= len(rel)
    if size > bound:
        raise BoundExceeded(f"composite {node.name} has {size} product states (bound {bound})")

    order = [l for leaves, _ in parts for l in leaves]
    spec = node.spec
    rel = {}
    for combo in itertools.product(*(sorted(r) for _, r in parts)):
        state = tuple(x for part in combo for x in part)
        moves = []
        child_moves = [parts[k][1][combo[k]] for k in range(len(parts))]

        def replace(k, new_part, cur=combo):
            return cur[:k] + (new_part,) + cur[k + 1:]

        for k, cm in enumerate(child_moves):
            for l, t in cm:
                if feasible(spec, l):
                    moves.append((l, tuple(x for part in replace(k, t) for x in part)))
        for k1, k2 in itertools.permutations(range(len(parts)), 2):
            for lo, t1 in child_moves[k1]:
                if not lo.is_output:
                    continue
                for li, t2 in child_moves[k2]:
                    comb = complement(lo, li)
                    if comb is None or not feasible(spec, comb):
                        continue
                    nxt = list(combo)
                    nxt[k1] = t1
                    nxt[k2] = t2
                    moves.append((comb, tuple(x for part in nxt for x in part)))
        rel[state] = moves
    return order, rel


def brute_force_compose(tree: HierarchyTree, bound: int = 10**6) -> ExplicitLTS:
    """Textbook bottom-up composition, then reachability from the initial state.

    Every internal node's relation is computed over the full product of its
    children; this is deliberately naive and serves as a testing oracle.
    """
    order, rel = _compose_node(tree, tree.root, bound)
    # subtree leaf order of the root equals leaf index order
    assert order == list(range(len(tree.leaves)))
    init = initial_state(tree)
    seen = {init}
    queue = deque([init])
    transitions = []
    while queue:
        s = queue.popleft()
        for l, t in rel[s]:
            transitions.append((s, l, t))
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return ExplicitLTS(init, seen, transitions)
