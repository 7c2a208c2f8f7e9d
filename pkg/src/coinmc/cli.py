"""Command-line front end: ``coinmc {metrics,verify,property,gen,bench}``."""
from __future__ import annotations

import argparse
import os
import sys

from . import families
from .buchi import format_claim, never_claim
from .explorer import (DEFAULT_MEM_LIMIT, CounterexampleFound, DeadlockFound,
                       ResourceLimit, check_deadlock, reach, verify)
from .lang import CoinError, elaborate, parse_claim, parse_document, parse_formula
from .ltl import format_formula
from .succgen import precompute, tables_size

EXIT_HOLDS = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3
EXIT_DEADLOCK = 4


def _fail(msg, code=EXIT_PARSE):
    print(f"coinmc: {msg}", file=sys.stderr)
    return code


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path):
    """(tree, embedded claim or None)."""
    model, claim = parse_document(_read(path))
    return elaborate(model), claim


def _formula_source(text):
    if text is not None and os.path.isfile(text):
        return _read(text)
    return text


def _record(pairs) -> str:
    return " ".join(f"{k}={v}" for k, v in pairs)


def _metric_pairs(m, extra=()):
    pairs = [("states", m.states), ("transitions", m.transitions), ("time", f"{m.time:.6f}"),
             ("memory", m.peak_memory), ("algorithm", m.algorithm), ("workers", m.workers),
             ("por", "on" if m.por else "off")]
    return pairs + list(extra)


def _print_metrics(m, fmt, extra=()):
    if fmt == "machine":
        print(_record(_metric_pairs(m, extra)))
        return
    print(f"states:       {m.states}")
    print(f"transitions:  {m.transitions}")
    print(f"time:         {m.time:.3f} s")
    print(f"peak memory:  {m.peak_memory / 2**20:.1f} MiB")
    print(f"algorithm:    {m.algorithm}")
    print(f"workers:      {m.workers}")
    print(f"por:          {'on' if m.por else 'off'}")
    for k, v in extra:
        print(f"{k + ':':<13} {v}")


def _print_por_stats(full, red, fmt):
    ratio = full.states / red.states if red.states else float("inf")
    if fmt == "machine":
        print(_record([("full_states", full.states), ("full_transitions", full.transitions),
                       ("por_states", red.states), ("por_transitions", red.transitions),
                       ("ratio", f"{ratio:.2f}")]))
        return
    print(f"{'':>12} {'states':>12} {'transitions':>14}")
    print(f"{'full':>12} {full.states:>12} {full.transitions:>14}")
    print(f"{'with p.o.r.':>12} {red.states:>12} {red.transitions:>14}")
    print(f"reduction ratio {round(ratio)} : 1")


def _run_opts(args):
    return dict(algorithm=args.algorithm, workers=args.workers, seed=args.seed,
                mem_limit=args.mem_limit)


def cmd_metrics(args) -> int:
    try:
        tree, _ = _load(args.model)
    except OSError as e:
        return _fail(f"cannot read {args.model}: {e.strerror}")
    except CoinError as e:
        return _fail(f"{args.model}: {e}")
    tables = precompute(tree)
    extra = [("tables_bytes", tables_size(tables))]
    opts = _run_opts(args)
    m = reach(tree, tables if args.algorithm == "lca" else None, por=args.por, **opts)
    if m.resource_limit:
        _print_metrics(m, args.format, extra + [("verdict", "resource-limit")])
        return EXIT_RESOURCE
    _print_metrics(m, args.format, extra)
    if args.por_stats:
        other = reach(tree, tables if args.algorithm == "lca" else None, por=not args.por, **opts)
        full, red = (other, m) if args.por else (m, other)
        _print_por_stats(full, red, args.format)
    return EXIT_HOLDS


def _show_step(tree, claim, step):
    label = "stutter" if step.label is None else str(step.label)
    if claim is None:
        return f"{tree.format_state(step.source)} --{label}--> {tree.format_state(step.target)}"
    src, dst = step.source, step.target
    return (f"{tree.format_state(src.model)} [{claim.states[src.claim]}] --{label}--> "
            f"{tree.format_state(dst.model)} [{claim.states[dst.claim]}]")


def _report(verdict, tree, claim, args):
    m = verdict.metrics
    if args.format == "machine":
        extra = [("verdict", verdict.name)]
        if isinstance(verdict, CounterexampleFound):
            extra += [("stem", len(verdict.stem)), ("cycle", len(verdict.cycle))]
        if isinstance(verdict, DeadlockFound):
            extra += [("trace", len(verdict.trace))]
        print(_record(_metric_pairs(m, extra)))
        return
    if isinstance(verdict, CounterexampleFound):
        print("property violated; counterexample:")
        print("  stem:")
        for s in verdict.stem:
            print("    " + _show_step(tree, claim, s))
        print("  cycle:")
        for s in verdict.cycle:
            print("    " + _show_step(tree, claim, s))
    elif isinstance(verdict, DeadlockFound):
        print(f"deadlock in {tree.format_state(verdict.state)} after {len(verdict.trace)} steps:")
        for s in verdict.trace:
            print("    " + _show_step(tree, None, s))
    elif isinstance(verdict, ResourceLimit):
        print("memory limit exceeded; exploration aborted")
    else:
        print("property holds")
    print(f"({m.states} states, {m.transitions} transitions, {m.time:.3f} s)")


def cmd_verify(args) -> int:
    try:
        tree, embedded = _load(args.model)
        formula = claim = None
        if args.claim:
            claim = parse_claim(_read(args.claim))
        elif args.formula is not None:
            formula = parse_formula(_formula_source(args.formula))
        elif embedded is not None:
            claim = embedded
        elif not args.deadlock:
            return _fail("nothing to verify: give a formula, --claim or --deadlock")
    except OSError as e:
        return _fail(f"cannot read {e.filename}: {e.strerror}")
    except CoinError as e:
        return _fail(str(e))
    opts = _run_opts(args)
    if args.deadlock:
        verdict = check_deadlock(tree, **opts)
        _report(verdict, tree, None, args)
        return verdict.exit_code
    if claim is None:
        claim = never_claim(formula)
    verdict = verify(tree, formula=formula, claim=claim, por=args.por,
                     warn=lambda msg: print(f"coinmc: {msg}", file=sys.stderr), **opts)
    _report(verdict, tree, claim, args)
    return verdict.exit_code


def cmd_property(args) -> int:
    try:
        formula = parse_formula(_formula_source(args.formula))
    except OSError as e:
        return _fail(f"cannot read {e.filename}: {e.strerror}")
    except CoinError as e:
        return _fail(str(e))
    print(f"// never claim for !({format_formula(formula)})")
    sys.stdout.write(format_claim(never_claim(formula)))
    return EXIT_HOLDS


def cmd_gen(args) -> int:
    try:
        text = families.generate(args.family, args.n, args.d)
    except ValueError as e:
        return _fail(str(e))
    sys.stdout.write(text)
    return EXIT_HOLDS


def cmd_bench(args) -> int:
    from .lang import load_tree
    try:
        tree = load_tree(families.generate(args.family, args.n, args.d))
    except ValueError as e:
        return _fail(str(e))
    workers = [int(w) for w in args.workers_list.split(",")]
    algorithms = ["recursive", "lca"]
    times = {}
    counts = set()
    for alg in algorithms:
        for w in workers:
            best = None
            for _ in range(args.repeat):
                m = reach(tree, algorithm=alg, workers=w, por=args.por, seed=args.seed,
                          mem_limit=args.mem_limit)
                if m.resource_limit:
                    return _fail("memory limit exceeded during benchmark", EXIT_RESOURCE)
                counts.add((m.states, m.transitions))
                best = m.time if best is None else min(best, m.time)
            times[alg, w] = best
    if args.format == "machine":
        for (alg, w), t in times.items():
            print(_record([("family", args.family), ("n", args.n), ("d", args.d),
                           ("algorithm", alg), ("workers", w), ("time", f"{t:.6f}")]))
    else:
        states, trans = sorted(counts)[0]
        print(f"{args.family}({args.n},{args.d}): {states} states, {trans} transitions")
        head = "".join(f"{w:>10}" for w in workers)
        print(f"{'workers':<12}{head}")
        for alg in algorithms:
            print(f"{alg:<12}" + "".join(f"{times[alg, w]:>10.3f}" for w in workers))
    if len(counts) != 1:
        return _fail("state counts differ between configurations", 1)
    return EXIT_HOLDS


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algorithm", choices=["recursive", "lca"], default="lca",
                        help="successor generation algorithm (default: lca)")
    common.add_argument("--por", action="store_true", help="enable partial-order reduction")
    common.add_argument("--workers", type=_positive, default=1, help="worker processes")
    common.add_argument("--mem-limit", type=_positive, default=DEFAULT_MEM_LIMIT,
                        help="memory cap in bytes (default 4 GiB)")
    common.add_argument("--format", choices=["human", "machine"], default="human")
    common.add_argument("--seed", type=int, default=0, help="seed for state partitioning")

    parser = argparse.ArgumentParser(prog="coinmc", description="Model checker for hierarchical CI automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", parents=[common], help="state-space statistics")
    p.add_argument("model")
    p.add_argument("--por-stats", action="store_true", help="compare full and reduced state spaces")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("verify", parents=[common], help="check a CI-LTL property or deadlock freedom")
    p.add_argument("model")
    p.add_argument("formula", nargs="?", help="formula text or a file containing it")
    p.add_argument("--claim", help="never-claim file to use instead of a formula")
    p.add_argument("--deadlock", action="store_true", help="search for deadlocks instead")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("property", help="print the never claim of a formula")
    p.add_argument("formula", help="formula text or a file containing it")
    p.set_defaults(func=cmd_property)

    p = sub.add_parser("gen", help="generate a benchmark model")
    p.add_argument("family", choices=list(families.FAMILIES))
    p.add_argument("n", type=int)
    p.add_argument("d", type=int, nargs="?", default=1)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", parents=[common], help="time algorithms against worker counts")
    p.add_argument("--family", choices=list(families.FAMILIES), default="pipeline-tree")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--workers-list", default="1,2,4")
    p.add_argument("--repeat", type=_positive, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
