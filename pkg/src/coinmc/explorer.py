"""Partitioned state-space engine.

States are owned by exactly one shard (``partition``). Work proceeds in
synchronous rounds: every shard consumes its inbox, expands owned states and
sends each generated successor to its owner. Every shard sends one batch
(possibly empty) to every other shard per round, and the run is over when a
round leaves all inboxes empty. The same shard code runs in-process or in
forked worker processes.

Phases built on the rounds: reachability, the cycle proviso, and the
OWCTY elimination (reset to what accepting states reach, then drop states
without predecessors, until stable).
"""
from __future__ import annotations

import hashlib
import multiprocessing as mp
import resource
import sys
import time
import traceback
import zlib
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import NamedTuple

from . import ltl
from .buchi import BuchiAutomaton, guard_holds, never_claim, strongly_connected
from .core import initial_state
from .ltl import Letter
from .por import choose_ample, por_applicable, static_dependence
from .product import ProductState
from .succgen import make_generator, precompute

DEFAULT_MEM_LIMIT = 4 << 30


def partition(b: bytes, workers: int, seed: int = 0) -> int:
    """Owner of encoded state ``b``."""
    if workers <= 1:
        return 0
    return zlib.crc32(b, seed) % workers


def peak_rss() -> int:
    """Peak resident set size of this process in bytes."""
    kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    return kb if sys.platform == "darwin" else kb * 1024


# -- state spaces ------------------------------------------------------------------

class ModelSpace:
    """The model's own transition system over encoded global states."""

    def __init__(self, tree, algorithm="lca", tables=None, por=False, atoms=()):
        self.tree = tree
        self.algorithm = algorithm
        if tables is None and (algorithm == "lca" or por):
            tables = precompute(tree)
        self.tables = tables
        self.gen = make_generator(tree, algorithm, tables)
        self.codec = self.gen.codec
        self.dep = static_dependence(tree, tables, atoms) if por else None

    def initial(self) -> bytes:
        return self.codec.encode(initial_state(self.tree))

    def expand(self, b, full=False):
        """Successor encodings and whether an ample subset was used."""
        if self.dep is None or full:
            return self.gen.successor_states(b), False
        raw = self.gen.transitions(b)
        amp = choose_ample(self.dep, self.codec.locals(b), raw)
        if amp is None:
            return [t[2] for t in raw], False
        return [t[2] for t in amp], True

    def is_accepting(self, b) -> bool:
        return False

    def steps(self, b) -> list:
        return [(l, s) for l, _k, s in self.gen.transitions(b)]

    def decode(self, b):
        return self.codec.decode(b)

    def format(self, b) -> str:
        return self.tree.format_state(self.codec.decode(b))


class ProductSpace:
    """Model times never claim; the claim index is appended as two bytes."""

    def __init__(self, tree, claim: BuchiAutomaton, algorithm="lca", tables=None,
                 formula=None, por=False):
        self.tree = tree
        self.claim = claim
        if tables is None and (algorithm == "lca" or por):
            tables = precompute(tree)
        self.tables = tables
        self.gen = make_generator(tree, algorithm, tables)
        self.codec = self.gen.codec
        self.n = self.codec.width * self.codec.leaves
        self.edges = [[(tuple(g), t.to_bytes(2, "little")) for g, t in out]
                      for out in claim.out_edges()]
        self.acc = claim.accepting
        atoms = set(claim.atoms)
        if formula is not None:
            atoms |= ltl.atoms(formula)
        self.dep = static_dependence(tree, tables, atoms) if por else None

    def initial(self) -> bytes:
        return self.codec.encode(initial_state(self.tree)) + self.claim.initial.to_bytes(2, "little")

    def _steps(self, b, full):
        m = b[: self.n]
        raw = self.gen.transitions(m)
        if not raw:
            return m, [(None, m)], frozenset(), False
        enabled = frozenset(t[0] for t in raw)
        reduced = False
        if self.dep is not None and not full:
            amp = choose_ample(self.dep, self.codec.locals(m), raw)
            if amp is not None:
                raw, reduced = amp, True
        return m, [(l, s) for l, _k, s in raw], enabled, reduced

    def expand(self, b, full=False):
        _m, steps, enabled, reduced = self._steps(b, full)
        edges = self.edges[int.from_bytes(b[self.n:], "little")]
        out = []
        for l, s in steps:
            letter = Letter(enabled, l)
            for g, cb in edges:
                if guard_holds(g, letter):
                    out.append(s + cb)
        return out, reduced

    def is_accepting(self, b) -> bool:
        return int.from_bytes(b[self.n:], "little") in self.acc

    def steps(self, b) -> list:
        _m, steps, enabled, _ = self._steps(b, True)
        edges = self.edges[int.from_bytes(b[self.n:], "little")]
        out = []
        for l, s in steps:
            letter = Letter(enabled, l)
            for g, cb in edges:
                if guard_holds(g, letter):
                    out.append((l, s + cb))
        return out

    def decode(self, b) -> ProductState:
        return ProductState(self.codec.decode(b[: self.n]), int.from_bytes(b[self.n:], "little"))

    def format(self, b) -> str:
        p = self.decode(b)
        return f"{self.tree.format_state(p.model)} [{self.claim.states[p.claim]}]"


# -- results -----------------------------------------------------------------------

class Step(NamedTuple):
    source: object
    label: object  # Label, or None for a stutter step
    target: object


@dataclass
class Metrics:
    states: int = 0
    transitions: int = 0
    time: float = 0.0
    peak_memory: int = 0
    algorithm: str = "lca"
    workers: int = 1
    por: bool = False
    resource_limit: bool = False
    rounds: int = 0
    digest: str = ""


class Verdict:
    exit_code = None
    name = "verdict"


@dataclass
class PropertyHolds(Verdict):
    metrics: Metrics = None
    exit_code = 0
    name = "holds"


@dataclass
class CounterexampleFound(Verdict):
    stem: list = field(default_factory=list)
    cycle: list = field(default_factory=list)
    metrics: Metrics = None
    exit_code = 1
    name = "counterexample"


@dataclass
class DeadlockFound(Verdict):
    trace: list = field(default_factory=list)
    state: object = None
    metrics: Metrics = None
    exit_code = 4
    name = "deadlock"


@dataclass
class ResourceLimit(Verdict):
    metrics: Metrics = None
    exit_code = 3
    name = "resource-limit"


class LimitExceeded(Exception):
    pass


# -- shards ------------------------------------------------------------------------

_CHECK_EVERY = 2048


class Shard:
    """One worker's slice of the state space and its phase handlers.

    ``mode`` is ``count`` (state set only), ``trace`` (parent hints) or
    ``graph`` (edges in both directions plus expansion flags).
    """

    def __init__(self, index, workers, space, mode="count", seed=0, mem_limit=None):
        self.index = index
        self.workers = workers
        self.space = space
        self.mode = mode
        self.seed = seed
        self.mem_limit = mem_limit
        self.seen = set()
        self.parent = {}
        self.level = {}
        self.succs = {}
        self.preds = {}
        self.full = set()
        self.transitions = 0
        self.deadlocks = []
        self.inbox = []
        self.round_no = 0
        self.over_limit = False
        self._handler = self._reach
        self._since_check = 0

    def owner(self, b) -> int:
        return partition(b, self.workers, self.seed)

    def _outbox(self):
        return [[] for _ in range(self.workers)]

    # driver protocol

    def deliver(self, batches):
        inbox = []
        for batch in batches:
            inbox.extend(batch)
        self.inbox = inbox

    def step(self):
        msgs, self.inbox = self.inbox, []
        out = self._outbox()
        self.round_no += 1
        self._tick(_CHECK_EVERY)  # at least one memory check per round
        if not self.over_limit:
            self._handler(msgs, out)
        return out

    def report(self):
        return len(self.inbox), self.over_limit, len(self.deadlocks)

    def _tick(self, n=1):
        self._since_check += n
        if self._since_check >= _CHECK_EVERY:
            self._since_check = 0
            if self.mem_limit is not None and peak_rss() > self.mem_limit:
                self.over_limit = True

    # reachability

    def begin_reach(self, init):
        out = self._outbox()
        if self.index == 0:
            msg = init if self.mode == "count" else (init, None)
            out[self.owner(init)].append(msg)
        self._handler = self._reach
        return out

    def _reach(self, msgs, out):
        if self.mode == "count":
            self._reach_count(msgs, out)
        else:
            self._reach_edges(msgs, out)

    def _reach_count(self, msgs, out):
        seen = self.seen
        expand = self.space.expand
        single = self.workers == 1
        owner = self.owner
        new = 0
        for s in msgs:
            if s in seen:
                continue
            seen.add(s)
            new += 1
            succ, _ = expand(s)
            self.transitions += len(succ)
            if not succ:
                self.deadlocks.append((self.round_no, s))
            if single:
                out[0].extend(succ)
            else:
                for t in succ:
                    out[owner(t)].append(t)
            if self.over_limit:
                break
            if new % 256 == 0:
                self._tick(256)

    def _reach_edges(self, msgs, out):
        graph = self.mode == "graph"
        parent = self.parent
        expand = self.space.expand
        owner = self.owner
        for s, p in msgs:
            if graph and p is not None:
                self.preds.setdefault(s, []).append(p)
            if s in parent:
                continue
            parent[s] = p
            self.level[s] = self.round_no
            succ, reduced = expand(s)
            self.transitions += len(succ)
            if not succ:
                self.deadlocks.append((self.round_no, s))
            if graph:
                self.succs[s] = succ
                if not reduced:
                    self.full.add(s)
            for t in succ:
                out[owner(t)].append((t, s))
            self._tick()
            if self.over_limit:
                break

    # cycle proviso

    def _notify_preds(self, t, out):
        for p in self.preds.get(t, ()):
            out[self.owner(p)].append(p)

    def begin_proviso(self):
        out = self._outbox()
        self._counter = {}
        for s, succ in self.succs.items():
            if s in self.full:
                self._notify_preds(s, out)
            elif succ:
                self._counter[s] = len(succ)
            else:
                self._notify_preds(s, out)
        self._handler = self._proviso
        return out

    def _proviso(self, msgs, out):
        counter = self._counter
        for p in msgs:
            c = counter.get(p)
            if c is None:
                continue
            if c == 1:
                del counter[p]
                self._notify_preds(p, out)
            else:
                counter[p] = c - 1

    def proviso_remaining(self) -> int:
        return len(self._counter)

    def begin_reexpand(self):
        out = self._outbox()
        for s in sorted(self._counter):
            old = Counter(self.succs[s])
            succ, _ = self.space.expand(s, full=True)
            self.succs[s] = succ
            self.full.add(s)
            extra = list((Counter(succ) - old).elements())
            self.transitions += len(extra)
            for t in extra:
                out[self.owner(t)].append((t, s))
        self._counter = {}
        self._handler = self._reach
        return out

    # OWCTY

    def begin_owcty(self):
        self.alive = set(self.succs)
        return self._outbox()

    def begin_reset(self):
        out = self._outbox()
        self._visited = set()
        acc = self.space.is_accepting
        for s in self.alive:
            if acc(s):
                for t in self.succs[s]:
                    out[self.owner(t)].append(t)
        self._handler = self._reset
        return out

    def _reset(self, msgs, out):
        alive, visited = self.alive, self._visited
        for t in msgs:
            if t in alive and t not in visited:
                visited.add(t)
                for u in self.succs[t]:
                    out[self.owner(u)].append(u)

    def end_reset(self) -> int:
        self.alive = self._visited
        self._visited = None
        return len(self.alive)

    def begin_indegree(self):
        out = self._outbox()
        self._indeg = dict.fromkeys(self.alive, 0)
        for s in self.alive:
            for t in self.succs[s]:
                out[self.owner(t)].append(t)
        self._handler = self._count_indegree
        return out

    def _count_indegree(self, msgs, out):
        indeg = self._indeg
        for t in msgs:
            if t in indeg:
                indeg[t] += 1

    def begin_eliminate(self):
        out = self._outbox()
        for s, d in self._indeg.items():
            if d == 0:
                self._drop(s, out)
        self._handler = self._eliminate
        return out

    def _drop(self, s, out):
        self.alive.discard(s)
        for t in self.succs[s]:
            out[self.owner(t)].append(t)

    def _eliminate(self, msgs, out):
        indeg = self._indeg
        for t in msgs:
            if t in self.alive:
                indeg[t] -= 1
                if indeg[t] == 0:
                    self._drop(t, out)

    def alive_count(self) -> int:
        return len(self.alive)

    # queries

    def state_count(self) -> int:
        return len(self.seen) if self.mode == "count" else len(self.parent)

    def transition_count(self) -> int:
        return self.transitions

    def states(self) -> list:
        return sorted(self.seen if self.mode == "count" else self.parent)

    def parent_of(self, s):
        return self.parent.get(s)

    def first_deadlock(self):
        return min(self.deadlocks) if self.deadlocks else None

    def surviving(self) -> dict:
        return {s: (self.succs[s], self.space.is_accepting(s)) for s in self.alive}

    def graph(self) -> tuple:
        return dict(self.succs), set(self.full)

    def rss(self) -> int:
        return peak_rss()


# -- drivers -----------------------------------------------------------------------

class LocalDriver:
    """All shards in this process; rounds are simulated sequentially."""

    def __init__(self, shards):
        self.shards = shards
        self.rounds = 0

    def _exchange(self, outs):
        w = len(self.shards)
        for j, shard in enumerate(self.shards):
            shard.deliver([outs[i][j] for i in range(w)])
        return [sh.report() for sh in self.shards]

    def begin(self, method, *args):
        return self._exchange([getattr(sh, method)(*args) for sh in self.shards])

    def step(self):
        self.rounds += 1
        return self._exchange([sh.step() for sh in self.shards])

    def call(self, method, *args) -> list:
        return [getattr(sh, method)(*args) for sh in self.shards]

    def call_one(self, index, method, *args):
        return getattr(self.shards[index], method)(*args)

    def peak_memory(self) -> int:
        return peak_rss()

    def close(self):
        pass


def _worker_main(index, workers, space, mode, seed, mem_limit, inboxes, conn):
    shard = Shard(index, workers, space, mode, seed, mem_limit)
    inbox = inboxes[index]
    while True:
        cmd = conn.recv()
        op = cmd[0]
        if op == "stop":
            conn.send(("ok", None))
            break
        if op == "call":
            try:
                conn.send(("ok", getattr(shard, cmd[1])(*cmd[2])))
            except Exception:
                conn.send(("err", traceback.format_exc()))
            continue
        error = None
        try:
            out = shard.step() if op == "step" else getattr(shard, cmd[1])(*cmd[2])
        except Exception:
            error = traceback.format_exc()
            out = shard._outbox()
        for j in range(workers):
            if j != index:
                inboxes[j].put((index, out[j]))
        batches = {index: out[index]}
        for _ in range(workers - 1):
            src, batch = inbox.get()
            batches[src] = batch
        shard.deliver([batches[j] for j in range(workers)])
        conn.send(("err", error) if error else ("ok", shard.report()))


class ProcessDriver:
    """One forked process per shard; batches travel over per-worker queues."""

    def __init__(self, workers, space, mode, seed, mem_limit):
        ctx = mp.get_context("fork")
        self.rounds = 0
        self.inboxes = [ctx.Queue() for _ in range(workers)]
        self.conns = []
        self.procs = []
        share = None if mem_limit is None else mem_limit // workers
        for i in range(workers):
            parent_end, child_end = ctx.Pipe()
            p = ctx.Process(target=_worker_main,
                            args=(i, workers, space, mode, seed, share, self.inboxes, child_end),
                            daemon=True)
            p.start()
            self.conns.append(parent_end)
            self.procs.append(p)

    def _collect(self) -> list:
        results = []
        errors = []
        for c in self.conns:
            status, value = c.recv()
            if status == "err":
                errors.append(value)
            results.append(value)
        if errors:
            raise RuntimeError("worker failed:\n" + errors[0])
        return results

    def begin(self, method, *args):
        for c in self.conns:
            c.send(("begin", method, args))
        return self._collect()

    def step(self):
        self.rounds += 1
        for c in self.conns:
            c.send(("step",))
        return self._collect()

    def call(self, method, *args) -> list:
        for c in self.conns:
            c.send(("call", method, args))
        return self._collect()

    def call_one(self, index, method, *args):
        self.conns[index].send(("call", method, args))
        status, value = self.conns[index].recv()
        if status == "err":
            raise RuntimeError("worker failed:\n" + value)
        return value

    def peak_memory(self) -> int:
        return sum(self.call("rss"))

    def close(self):
        for c in self.conns:
            try:
                c.send(("stop",))
                c.recv()
            except (OSError, EOFError):
                pass
        for p in self.procs:
            p.join(timeout=5)
            if p.is_alive():
                p.terminate()
        for q in self.inboxes:
            q.close()


def make_driver(space, workers=1, mode="count", seed=0, mem_limit=DEFAULT_MEM_LIMIT,
                processes=None):
    """In-process shards, or forked workers when ``processes`` (default: workers > 1)."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if processes is None:
        processes = workers > 1
    if processes and workers > 1:
        return ProcessDriver(workers, space, mode, seed, mem_limit)
    return LocalDriver([Shard(i, workers, space, mode, seed, mem_limit) for i in range(workers)])


# -- engine --------------------------------------------------------------------------

class Engine:
    """Runs phases over a driver; the coordinator only sees counts and reports."""

    def __init__(self, space, workers=1, mode="count", seed=0, mem_limit=DEFAULT_MEM_LIMIT,
                 processes=None):
        self.space = space
        self.workers = workers
        self.mode = mode
        self.seed = seed
        self.driver = make_driver(space, workers, mode, seed, mem_limit, processes)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.driver.close()

    @staticmethod
    def _check(reports):
        if any(r[1] for r in reports):
            raise LimitExceeded()
        return sum(r[0] for r in reports)

    def run_phase(self, method, *args, stop_on_deadlock=False):
        pending = self._check(self.driver.begin(method, *args))
        while pending:
            reports = self.driver.step()
            pending = self._check(reports)
            if stop_on_deadlock and any(r[2] for r in reports):
                return

    def explore(self, por=False, stop_on_deadlock=False):
        self.run_phase("begin_reach", self.space.initial(), stop_on_deadlock=stop_on_deadlock)
        if not por:
            return
        while True:
            self.run_phase("begin_proviso")
            if sum(self.driver.call("proviso_remaining")) == 0:
                return
            self.run_phase("begin_reexpand")

    def owcty(self) -> int:
        self.driver.begin("begin_owcty")
        previous = None
        while True:
            self.run_phase("begin_reset")
            size = sum(self.driver.call("end_reset"))
            if size == 0:
                return 0
            self.run_phase("begin_indegree")
            self.run_phase("begin_eliminate")
            size = sum(self.driver.call("alive_count"))
            if size == 0 or size == previous:
                return size
            previous = size

    def path_to(self, s) -> list:
        """States from the initial state to ``s`` following parent hints."""
        path = [s]
        while True:
            p = self.driver.call_one(partition(path[-1], self.workers, self.seed), "parent_of", path[-1])
            if p is None:
                break
            path.append(p)
        path.reverse()
        return path

    def metrics(self, algorithm, por, started, digest=False) -> Metrics:
        states = sum(self.driver.call("state_count"))
        m = Metrics(states=states, transitions=sum(self.driver.call("transition_count")),
                    time=time.perf_counter() - started, peak_memory=self.driver.peak_memory(),
                    algorithm=algorithm, workers=self.workers, por=por,
                    rounds=self.driver.rounds)
        if digest:
            m.digest = state_digest(s for part in self.driver.call("states") for s in part)
        return m


def state_digest(states) -> str:
    h = hashlib.sha256()
    for s in sorted(states):
        h.update(len(s).to_bytes(4, "little"))
        h.update(s)
    return h.hexdigest()


def _label_of(space, u, v):
    for l, t in space.steps(u):
        if t == v:
            return l
    raise RuntimeError("edge not found while rebuilding a trace")


def _steps_along(space, path) -> list:
    return [Step(space.decode(u), _label_of(space, u, v), space.decode(v))
            for u, v in zip(path, path[1:])]


# -- public operations ---------------------------------------------------------------

def reach(tree, tables=None, algorithm="lca", por=False, workers=1, seed=0,
          mem_limit=DEFAULT_MEM_LIMIT, processes=None, digest=False) -> Metrics:
    """Explore the reachable state space and return its metrics.

    With ``por`` the count is that of the reduced graph (ample sets plus
    proviso re-expansions). On a memory overrun the partial metrics are
    returned with ``resource_limit`` set.
    """
    started = time.perf_counter()
    space = ModelSpace(tree, algorithm, tables, por=por)
    mode = "graph" if por else "count"
    with Engine(space, workers, mode, seed, mem_limit, processes) as eng:
        try:
            eng.explore(por=por)
        except LimitExceeded:
            m = eng.metrics(algorithm, por, started)
            m.resource_limit = True
            return m
        return eng.metrics(algorithm, por, started, digest=digest)


def check_deadlock(tree, tables=None, algorithm="lca", workers=1, seed=0,
                   mem_limit=DEFAULT_MEM_LIMIT, processes=None) -> Verdict:
    """Breadth-first search for a state without successors."""
    started = time.perf_counter()
    space = ModelSpace(tree, algorithm, tables)
    with Engine(space, workers, "trace", seed, mem_limit, processes) as eng:
        try:
            eng.explore(stop_on_deadlock=True)
        except LimitExceeded:
            m = eng.metrics(algorithm, False, started)
            m.resource_limit = True
            return ResourceLimit(m)
        m = eng.metrics(algorithm, False, started)
        found = [d for d in eng.driver.call("first_deadlock") if d is not None]
        if not found:
            return PropertyHolds(m)
        _, dead = min(found)
        path = eng.path_to(dead)
        return DeadlockFound(_steps_along(space, path), space.decode(dead), m)


def detect_accepting_cycle(tree, claim: BuchiAutomaton, tables=None, algorithm="lca",
                           workers=1, por=False, formula=None, seed=0,
                           mem_limit=DEFAULT_MEM_LIMIT, processes=None) -> Verdict:
    """Search the product of ``tree`` and ``claim`` for an accepting cycle."""
    started = time.perf_counter()
    space = ProductSpace(tree, claim, algorithm, tables, formula=formula, por=por)
    with Engine(space, workers, "graph", seed, mem_limit, processes) as eng:
        try:
            eng.explore(por=por)
            m = eng.metrics(algorithm, por, started)
            alive = eng.owcty()
        except LimitExceeded:
            m = eng.metrics(algorithm, por, started)
            m.resource_limit = True
            return ResourceLimit(m)
        m.time = time.perf_counter() - started
        if alive == 0:
            return PropertyHolds(m)
        survivors = {}
        for part in eng.driver.call("surviving"):
            survivors.update(part)
        stem_path, cycle_path = _find_lasso(survivors)
        stem_path = eng.path_to(stem_path)
        return CounterexampleFound(_steps_along(space, stem_path),
                                   _steps_along(space, cycle_path), m)


def _find_lasso(survivors):
    """Accepting state on a cycle within the surviving set and a shortest such cycle."""
    verts = sorted(survivors)
    vid = {v: k for k, v in enumerate(verts)}
    adj = [[vid[t] for t in survivors[v][0] if t in vid] for v in verts]
    comp = strongly_connected(len(verts), adj)
    size = Counter(comp)
    for k, v in enumerate(verts):
        if not survivors[v][1]:
            continue
        if size[comp[k]] == 1 and k not in adj[k]:
            continue
        # shortest cycle back to v inside its component
        prev = {}
        queue = deque()
        for w in adj[k]:
            if comp[w] == comp[k] and w not in prev:
                prev[w] = k
                queue.append(w)
        while queue and k not in prev:
            u = queue.popleft()
            for w in adj[u]:
                if comp[w] == comp[k] and w not in prev:
                    prev[w] = u
                    queue.append(w)
        cyc = [k]
        cur = prev[k]
        while cur != k:
            cyc.append(cur)
            cur = prev[cur]
        cyc.append(k)
        cyc.reverse()
        return v, [verts[c] for c in cyc]
    raise RuntimeError("surviving set without an accepting cycle")


def verify(tree, formula=None, claim=None, tables=None, algorithm="lca", workers=1,
           por=False, seed=0, mem_limit=DEFAULT_MEM_LIMIT, processes=None, warn=None) -> Verdict:
    """Check ``formula`` (or a ready-made never ``claim``) on the model.

    Reduction is applied only when it is known to preserve the verdict for
    the given formula; otherwise ``warn`` is called and the full graph is
    explored.
    """
    if claim is None:
        if formula is None:
            raise ValueError("verify needs a formula or a claim")
        claim = never_claim(formula)
    use_por = por
    if por and (formula is None or not por_applicable(formula)):
        use_por = False
        if warn is not None:
            reason = ("a raw claim gives no formula to check" if formula is None
                      else "the formula is sensitive to invisible steps")
            warn(f"partial-order reduction disabled: {reason}")
    return detect_accepting_cycle(tree, claim, tables, algorithm, workers, use_por, formula,
                                  seed, mem_limit, processes)
