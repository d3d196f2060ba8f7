import csv
import json

import pytest

from conftest import ASSETS
from tlreplan.cli import BENCH_HEADER, SUMMARY_HEADER, main

SEQ = str(ASSETS / "sequence_abcd.hoa")
SEQ32 = str(ASSETS / "sequence_abcd_32.hoa")
MAP_A = str(ASSETS / "bench_map_a.json")
BLOCKED = str(ASSETS / "bench_map_blocked_c.json")


def test_build_reports_product_sizes(capsys):
    assert main(["build", SEQ32, MAP_A]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["nba_states"] == 32
    assert stats["nba_transitions"] == 92
    assert stats["wts_states"] == 100
    assert stats["pa_states"] == 3200
    assert "relaxed_pa_transitions" not in stats


def test_build_relaxed_flag(capsys):
    assert main(["build", SEQ, MAP_A, "--relaxed"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["relaxed_pa_transitions"] >= stats["pa_transitions"]
    assert stats["pa_states"] == stats["wts_states"] * stats["nba_states"]


def test_build_single_state_nba(capsys, tmp_path):
    ev = str(ASSETS / "eventually_a.hoa")
    assert main(["build", ev, MAP_A]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["pa_states"] == stats["wts_states"] * 2
    unit = tmp_path / "unit.hoa"
    unit.write_text('HOA: v1\nStates: 1\nStart: 0\nAP: 1 "a"\nacc-name: Buchi\n'
                    'Acceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n')
    assert main(["build", str(unit), MAP_A]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["pa_states"] == stats["wts_states"]


def test_build_waypoint_graph(capsys):
    assert main(["build", str(ASSETS / "delivery_sequence.hoa"),
                 str(ASSETS / "delivery_6x6.json")]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["pa_states"] == 36 * 9


def test_build_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.hoa"
    bad.write_text("HOA: v1\nStates: oops\n--BODY--\n--END--\n")
    assert main(["build", str(bad), MAP_A]) == 1
    assert "error" in capsys.readouterr().err


def test_simulate_writes_traces_and_succeeds(tmp_path, capsys):
    out = tmp_path / "trace"
    code = main(["simulate", SEQ, MAP_A, "--trace-out", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["completed"] is True
    with open(f"{out}.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["event", "phase", "mod_size"]
    assert json.loads((tmp_path / "trace.json").read_text())["events"]


def test_simulate_infeasible_exit_code(capsys):
    assert main(["simulate", SEQ, BLOCKED, "--mode", "plain"]) == 3
    capsys.readouterr()
    assert main(["simulate", SEQ, BLOCKED, "--mode", "relaxed"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["completed"] is True
    assert summary["traversed_violation"] > 0


def test_simulate_random_scenario(capsys):
    assert main(["simulate", SEQ, "random", "--seed", "4", "--size", "8",
                 "--density", "0.2"]) == 0
    assert json.loads(capsys.readouterr().out)["completed"] is True


def test_simulate_random_needs_seed(capsys):
    assert main(["simulate", SEQ, "random"]) == 1


def test_builtin_nba_reference(capsys):
    assert main(["build", "builtin:sequence_abcd", MAP_A]) == 0
    assert json.loads(capsys.readouterr().out)["nba_states"] == 5


class TestBench:
    def _config(self, tmp_path, **overrides):
        cfg = {
            "sizes": [8], "seeds": [1, 2], "density": 0.3, "beta": 10,
            "mode": "plain", "algorithms": ["ltl-dstar", "iterative"],
            "loops": 1, "nba": "builtin:sequence_abcd",
            "output": str(tmp_path / "bench.csv"),
            "summary_output": str(tmp_path / "summary.csv"),
        }
        cfg.update(overrides)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return path, cfg

    def test_bench_runs_and_emits_stable_headers(self, tmp_path, capsys):
        path, cfg = self._config(tmp_path)
        assert main(["bench", str(path)]) == 0
        with open(cfg["output"], newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == BENCH_HEADER
        assert len(rows) == 1 + 2 * 2  # sizes x seeds x algorithms
        with open(cfg["summary_output"], newline="") as fh:
            srows = list(csv.reader(fh))
        assert srows[0] == SUMMARY_HEADER

    def test_bench_deterministic_except_timing(self, tmp_path, capsys):
        path, cfg = self._config(tmp_path)
        timing_cols = {BENCH_HEADER.index(c) for c in BENCH_HEADER if "_ns" in c}

        def strip(path):
            with open(path, newline="") as fh:
                return [[c for i, c in enumerate(row) if i not in timing_cols]
                        for row in csv.reader(fh)]

        assert main(["bench", str(path)]) == 0
        first = strip(cfg["output"])
        assert main(["bench", str(path)]) == 0
        second = strip(cfg["output"])
        assert first == second

    def test_bench_empty_algorithms_usage_error(self, tmp_path, capsys):
        path, _ = self._config(tmp_path, algorithms=[])
        assert main(["bench", str(path)]) == 2

    def test_bench_validates_sizes_and_beta(self, tmp_path, capsys):
        path, _ = self._config(tmp_path, sizes=[3])
        assert main(["bench", str(path)]) == 2
        path, _ = self._config(tmp_path, beta=0)
        assert main(["bench", str(path)]) == 2

    def test_bench_unknown_algorithm(self, tmp_path, capsys):
        path, _ = self._config(tmp_path, algorithms=["a-star"])
        assert main(["bench", str(path)]) == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])  # missing positionals
    assert exc.value.code == 2


def test_bench_flags_midrun_infeasible_rows(tmp_path, capsys):
    cfg = {
        "sizes": [10], "seeds": [2], "density": 0.35, "beta": 10,
        "mode": "plain", "algorithms": ["ltl-dstar"], "loops": 1,
        "nba": "builtin:sequence_abcd", "output": str(tmp_path / "b.csv"),
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["bench", str(path)]) == 0
    with open(cfg["output"], newline="") as fh:
        rows = list(csv.reader(fh))
    status = rows[1][BENCH_HEADER.index("status")]
    assert status == "infeasible"
