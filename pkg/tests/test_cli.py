import csv
import json
import subprocess
import sys

import pytest

from thetagrid import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_usage_error(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(list(argv))
    capsys.readouterr()
    return exc.value.code


GRID = ("--lx", "2", "--ly", "2", "--rh", "1", "--rv", "1")


class TestResistance:
    def test_oracle(self, capsys):
        code, out, _ = run(capsys, "resistance", *GRID, "--src", "0,0", "--dst", "1,0",
                           "--method", "oracle")
        data = json.loads(out)
        assert code == 0
        assert set(data) == {"resistance_ohms", "method", "corrections_applied", "wall_time_ms"}
        assert data["resistance_ohms"] == pytest.approx(0.75, rel=1e-12)
        assert data["method"] == "oracle"

    def test_hybrid_two_by_two(self, capsys):
        code, out, _ = run(capsys, "resistance", *GRID, "--src", "0,0", "--dst", "1,0",
                           "--method", "hybrid")
        assert code == 0
        assert json.loads(out)["resistance_ohms"] == pytest.approx(0.75, rel=5e-3)

    def test_self_pair(self, capsys):
        code, out, _ = run(capsys, "resistance", *GRID, "--src", "0,0", "--dst", "0,0")
        assert code == 0 and json.loads(out)["resistance_ohms"] == 0.0

    @pytest.mark.parametrize("method", ["theta", "hybrid", "analytic-infinite", "exact-infinite"])
    def test_methods(self, capsys, method):
        code, out, _ = run(capsys, "resistance", "--lx", "20", "--ly", "20", "--alpha", "2",
                           "--src", "3,3", "--dst", "9,12", "--method", method)
        data = json.loads(out)
        assert code == 0 and data["resistance_ohms"] > 0
        assert (data["corrections_applied"] > 0) == (method == "hybrid")

    def test_alpha_and_resistances_consistent(self, capsys):
        code, out, _ = run(capsys, "resistance", "--lx", "5", "--ly", "5", "--rh", "6",
                           "--rv", "2", "--alpha", "3", "--src", "0,0", "--dst", "1,0",
                           "--method", "oracle")
        assert code == 0
        direct = run(capsys, "resistance", "--lx", "5", "--ly", "5", "--rh", "6", "--rv", "2",
                     "--src", "0,0", "--dst", "1,0", "--method", "oracle")[1]
        assert json.loads(out)["resistance_ohms"] == json.loads(direct)["resistance_ohms"]

    @pytest.mark.parametrize("extra", [
        ("--src", "0,0", "--dst", "2,0"),
        ("--src", "0,-1", "--dst", "1,0"),
        ("--src", "0,0", "--dst", "1,0", "--rh", "0"),
        ("--src", "0,0", "--dst", "1,0", "--rv", "-2"),
        ("--src", "0,0", "--dst", "1,0", "--alpha", "3"),
        ("--src", "0,0", "--dst", "1,0", "--alpha", "-1", "--rh", "1", "--rv", "1"),
    ])
    def test_invalid_values_exit_2(self, capsys, extra):
        argv = ["resistance", "--lx", "2", "--ly", "2", "--rh", "1", "--rv", "1"]
        # later flags override earlier ones
        code, _, err = run(capsys, *argv, *extra)
        assert code == 2 and "error" in err

    @pytest.mark.parametrize("argv", [
        ("resistance", "--lx", "2", "--ly", "2", "--src", "0;0", "--dst", "1,0"),
        ("resistance", "--lx", "2", "--ly", "2", "--src", "0,0", "--dst", "1,0", "--method", "x"),
        ("resistance", "--ly", "2", "--src", "0,0", "--dst", "1,0"),
        ("nonsense",),
    ])
    def test_malformed_flags_exit_2(self, capsys, argv):
        assert run_usage_error(capsys, *argv) == 2

    def test_numerical_failure_exit_3(self, capsys, monkeypatch):
        from thetagrid.kernel import QuadratureError

        def boom(*a, **k):
            raise QuadratureError("no convergence")

        monkeypatch.setattr(cli, "omega_exact", boom)
        code, _, err = run(capsys, "resistance", *GRID, "--src", "0,0", "--dst", "1,0",
                           "--method", "exact-infinite")
        assert code == 3 and "numerical" in err

    def test_solver_failure_exit_3(self, capsys, monkeypatch):
        from thetagrid.oracle import SolverError

        def boom(*a, **k):
            raise SolverError("residual too large")

        monkeypatch.setattr(cli, "r_oracle", boom)
        code, _, _ = run(capsys, "resistance", *GRID, "--src", "0,0", "--dst", "1,0",
                         "--method", "oracle")
        assert code == 3


class TestErrorMap:
    def test_csv_and_summary(self, capsys, tmp_path):
        out = tmp_path / "map.csv"
        code, stdout, _ = run(capsys, "errormap", "--lx", "8", "--ly", "6", "--alpha", "10",
                              "--src", "0,0", "--out", str(out))
        assert code == 0
        summary = json.loads(stdout)
        with out.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["x", "y", "r_method", "r_oracle", "rel_error_percent"]
        body = rows[1:]
        assert len(body) == 8 * 6 - 1
        assert [(int(r[0]), int(r[1])) for r in body][:3] == [(1, 0), (2, 0), (3, 0)]
        pct = [float(r[4]) for r in body]
        assert max(pct) == pytest.approx(100 * summary["max_rel_error"], rel=1e-12)
        assert sum(pct) / len(pct) == pytest.approx(100 * summary["mean_rel_error"], rel=1e-12)
        for r in body:
            rel = abs(float(r[2]) - float(r[3])) / float(r[3])
            assert float(r[4]) == pytest.approx(100 * rel, rel=1e-12)

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            run(capsys, "errormap", "--lx", "6", "--ly", "6", "--rh", "3", "--rv", "1",
                "--src", "2,2", "--method", "theta", "--out", str(path))
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable(self, capsys, tmp_path):
        code, _, err = run(capsys, "errormap", "--lx", "4", "--ly", "4", "--src", "0,0",
                           "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 4 and "cannot write" in err

    def test_bad_source(self, capsys, tmp_path):
        code, _, _ = run(capsys, "errormap", "--lx", "4", "--ly", "4", "--src", "9,0",
                         "--out", str(tmp_path / "x.csv"))
        assert code == 2


class TestBench:
    def test_zero_queries(self, capsys):
        code, out, _ = run(capsys, "bench", "--lx", "11", "--ly", "11", "--alpha", "10",
                           "--queries", "0")
        data = json.loads(out)
        assert code == 0 and data["queries"] == 0 and data["hit_rate"] == 0.0

    def test_seeded_repeat(self, capsys):
        argv = ("bench", "--lx", "21", "--ly", "21", "--alpha", "4", "--queries", "200",
                "--seed", "9")
        first = json.loads(run(capsys, *argv)[1])
        second = json.loads(run(capsys, *argv)[1])
        assert first["resistance_sum"] == second["resistance_sum"]
        assert first["unique_integrations"] == second["unique_integrations"]

    def test_negative_queries(self, capsys):
        code, _, _ = run(capsys, "bench", "--lx", "5", "--ly", "5", "--queries", "-1")
        assert code == 2


class TestNetlist:
    def test_card_counts(self, capsys, tmp_path):
        for lx, ly, cards in ((2, 1, 1), (3, 3, 12)):
            path = tmp_path / f"{lx}x{ly}.sp"
            code, _, _ = run(capsys, "netlist", "--lx", str(lx), "--ly", str(ly), "--rh", "1",
                             "--rv", "1", "--src", "0,0", "--dst", f"{lx - 1},{ly - 1}",
                             "--out", str(path))
            assert code == 0
            lines = path.read_text().splitlines()
            assert sum(l.startswith(("RH_", "RV_")) for l in lines) == cards

    def test_stdout(self, capsys):
        code, out, _ = run(capsys, "netlist", "--lx", "2", "--ly", "1", "--src", "0,0",
                           "--dst", "1,0")
        assert code == 0 and "RH_0_0 n_0_0 n_1_0 1.0" in out

    def test_unwritable(self, capsys, tmp_path):
        code, _, _ = run(capsys, "netlist", "--lx", "2", "--ly", "2", "--src", "0,0",
                         "--dst", "1,1", "--out", str(tmp_path / "no" / "x.sp"))
        assert code == 4

    def test_same_nodes(self, capsys):
        code, _, _ = run(capsys, "netlist", "--lx", "2", "--ly", "2", "--src", "0,0",
                         "--dst", "0,0")
        assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "thetagrid", "resistance", *GRID,
                           "--src", "0,0", "--dst", "1,1", "--method", "oracle"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["resistance_ohms"] == pytest.approx(1.0)
    proc = subprocess.run([sys.executable, "-m", "thetagrid", "resistance", "--lx", "x"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2
