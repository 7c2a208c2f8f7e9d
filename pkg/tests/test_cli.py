"""Command-line front end."""
import subprocess
import sys

import pytest

from coinmc.buchi import never_claim
from coinmc.cli import (EXIT_COUNTEREXAMPLE, EXIT_DEADLOCK, EXIT_HOLDS, EXIT_PARSE, EXIT_RESOURCE,
                        main)
from coinmc.explorer import CounterexampleFound, DeadlockFound, PropertyHolds, ResourceLimit
from coinmc.lang import parse_claim, parse_formula

from oracles import ABC_PATH

RESPONSE = "G (act(1,b,1) -> F act(2,c,1))"


def record(line):
    return dict(kv.split("=", 1) for kv in line.split())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def toggles8(tmp_path, capsys):
    main(["gen", "toggles", "8"])
    path = tmp_path / "t8.coin"
    path.write_text(capsys.readouterr().out)
    return path


class TestMetrics:
    def test_abc_machine(self, capsys):
        code, out, _ = run(capsys, "metrics", ABC_PATH, "--format", "machine")
        assert code == EXIT_HOLDS
        lines = out.strip().split("\n")
        assert len(lines) == 1
        rec = record(lines[0])
        assert rec["states"] == "3" and rec["transitions"] == "9"
        assert list(rec)[:7] == ["states", "transitions", "time", "memory", "algorithm", "workers", "por"]
        assert rec["algorithm"] == "lca" and rec["por"] == "off"

    def test_abc_human(self, capsys):
        code, out, _ = run(capsys, "metrics", ABC_PATH, "--algorithm", "recursive", "--workers", "2")
        assert code == 0
        assert "states:       3" in out and "recursive" in out

    def test_toggles_por_stats(self, capsys, toggles8):
        code, out, _ = run(capsys, "metrics", toggles8, "--por", "--por-stats", "--format", "machine")
        assert code == 0
        first, second = out.strip().split("\n")
        assert int(record(first)["states"]) <= 17
        stats = record(second)
        assert stats["full_states"] == "256"
        assert float(stats["ratio"]) >= 15

    def test_por_stats_table(self, capsys, toggles8):
        code, out, _ = run(capsys, "metrics", toggles8, "--por-stats")
        assert "with p.o.r." in out and "reduction ratio" in out

    def test_missing_file(self, capsys, tmp_path):
        code, out, err = run(capsys, "metrics", tmp_path / "nope.coin")
        assert code == EXIT_PARSE
        assert out == "" and "cannot read" in err

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.coin"
        bad.write_text("automaton A (1) { state s; init t; trans; } system A;")
        code, _, err = run(capsys, "metrics", bad)
        assert code == EXIT_PARSE and "1:" in err

    def test_resource_limit(self, capsys, toggles8):
        code, out, _ = run(capsys, "metrics", toggles8, "--mem-limit", "1", "--format", "machine")
        assert code == EXIT_RESOURCE
        assert record(out.strip())["verdict"] == "resource-limit"

    def test_bad_workers(self, capsys):
        with pytest.raises(SystemExit):
            main(["metrics", str(ABC_PATH), "--workers", "0"])


class TestVerify:
    def test_counterexample(self, capsys):
        code, out, _ = run(capsys, "verify", ABC_PATH, RESPONSE)
        assert code == EXIT_COUNTEREXAMPLE
        stem, cycle = out.split("cycle:")
        cycle = [l for l in cycle.splitlines() if "-->" in l]
        assert cycle and not any("--(2,c,1)-->" in l for l in cycle)
        assert "--(1,b,1)-->" in stem

    def test_holds(self, capsys):
        code, out, _ = run(capsys, "verify", ABC_PATH, "G true")
        assert code == EXIT_HOLDS and "property holds" in out

    def test_eventually(self, capsys):
        code, _, _ = run(capsys, "verify", ABC_PATH, "F act(1,a,2)")
        assert code == EXIT_COUNTEREXAMPLE

    def test_machine(self, capsys):
        code, out, _ = run(capsys, "verify", ABC_PATH, RESPONSE, "--format", "machine")
        rec = record(out.strip())
        assert rec["verdict"] == "counterexample" and int(rec["cycle"]) >= 1

    def test_formula_file(self, capsys, tmp_path):
        f = tmp_path / "p.ltl"
        f.write_text(RESPONSE)
        code, _, _ = run(capsys, "verify", ABC_PATH, f)
        assert code == EXIT_COUNTEREXAMPLE

    def test_bad_formula(self, capsys):
        code, _, err = run(capsys, "verify", ABC_PATH, "G (act(1,b,1)")
        assert code == EXIT_PARSE and "unbalanced parenthesis" in err

    def test_deadlock_mode(self, capsys, tmp_path):
        m = tmp_path / "sink.coin"
        m.write_text("automaton A (1) { state x, y; init x; trans x -> y (1,go,1); } system A;")
        code, out, _ = run(capsys, "verify", m, "--deadlock")
        assert code == EXIT_DEADLOCK and "deadlock" in out
        code, _, _ = run(capsys, "verify", ABC_PATH, "--deadlock")
        assert code == EXIT_HOLDS

    def test_nothing_to_verify(self, capsys):
        code, _, _ = run(capsys, "verify", ABC_PATH)
        assert code == EXIT_PARSE

    def test_por_warning(self, capsys):
        code, _, err = run(capsys, "verify", ABC_PATH, "X act(1,a,2)", "--por")
        assert "disabled" in err

    def test_embedded_claim(self, capsys, tmp_path):
        claim_text = run(capsys, "property", RESPONSE)[1]
        doc = tmp_path / "abc_claim.coin"
        doc.write_text(ABC_PATH.read_text() + claim_text)
        code, _, _ = run(capsys, "verify", doc)
        assert code == EXIT_COUNTEREXAMPLE


class TestProperty:
    def test_globally(self, capsys):
        code, out, _ = run(capsys, "property", "G act(1,b,1)")
        assert code == 0
        assert out.startswith("// never claim for !(G act(1,b,1))")
        claim = parse_claim(out.split("\n", 1)[1])
        assert claim == never_claim(parse_formula("G act(1,b,1)"))
        assert any((False, parse_formula("act(1,b,1)")) in g for _, g, _ in claim.edges)

    def test_true(self, capsys):
        code, out, _ = run(capsys, "property", "true")
        claim = parse_claim(out.split("\n", 1)[1])
        assert len(claim.states) == 1 and not claim.accepting

    def test_malformed(self, capsys):
        code, _, _ = run(capsys, "property", "G (")
        assert code == EXIT_PARSE

    def test_round_trip_through_verify(self, capsys, tmp_path):
        out = run(capsys, "property", RESPONSE)[1]
        path = tmp_path / "claim.never"
        path.write_text(out)
        code, _, _ = run(capsys, "verify", ABC_PATH, "--claim", path)
        assert code == EXIT_COUNTEREXAMPLE


class TestGenAndBench:
    def test_gen_reparses(self, capsys):
        from coinmc.lang import load_tree
        for fam, n, d in [("toggles", 3, 1), ("ring", 4, 1), ("pipeline-tree", 4, 3)]:
            code, out, _ = run(capsys, "gen", fam, n, d)
            assert code == 0
            load_tree(out)

    def test_gen_rejects_bad_size(self, capsys):
        code, _, _ = run(capsys, "gen", "toggles", 0)
        assert code == EXIT_PARSE

    def test_bench(self, capsys):
        code, out, _ = run(capsys, "bench", "--family", "toggles", "--n", "4", "--workers-list", "1,2",
                           "--format", "machine")
        assert code == 0
        rows = [record(l) for l in out.strip().split("\n")]
        assert {(r["algorithm"], r["workers"]) for r in rows} == {
            ("recursive", "1"), ("recursive", "2"), ("lca", "1"), ("lca", "2")}


class TestExitCodes:
    def test_total_and_distinct(self):
        codes = [PropertyHolds.exit_code, CounterexampleFound.exit_code, DeadlockFound.exit_code,
                 ResourceLimit.exit_code]
        assert len(set(codes)) == 4 and EXIT_PARSE not in codes

    def test_module_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "coinmc", "metrics", str(ABC_PATH), "--format", "machine"],
                           capture_output=True, text=True)
        assert r.returncode == 0 and "states=3 transitions=9" in r.stdout
