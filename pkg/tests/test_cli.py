import csv
from pathlib import Path

import numpy as np
import pytest

from heptaspline.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def rewrite_output(src: Path, tmp_path: Path, name: str) -> Path:
    """Copy a bundled config, pointing csv_path into tmp_path."""
    text = src.read_text()
    out_csv = tmp_path / (name + ".csv")
    lines = []
    for line in text.splitlines():
        if line.startswith("csv_path"):
            lines.append(f"csv_path = {out_csv}")
        else:
            lines.append(line)
    dst = tmp_path / (name + ".ini")
    dst.write_text("\n".join(lines) + "\n")
    return dst


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestCoeffs:
    def test_optimal_family_prints_vanishing_coefficients(self, capsys):
        assert main(["coeffs", "--delta", "30"]) == 0
        out = capsys.readouterr().out
        assert "alpha = 61/15" in out
        assert "c9 = 0" in out and "c12 = 0" in out

    def test_rational_delta(self, capsys):
        assert main(["coeffs", "--delta", "51/2"]) == 0
        out = capsys.readouterr().out
        assert "beta = -74/3" in out

    def test_explicit_params(self, capsys):
        assert main(["coeffs", "--params", "0,0,0,60"]) == 0
        out = capsys.readouterr().out
        assert "c9 = -20" in out

    def test_theta(self, capsys):
        assert main(["coeffs", "--theta", "0.5"]) == 0
        assert "violates sum-60" in capsys.readouterr().out

    def test_exactly_one_selector_required(self, capsys):
        assert main(["coeffs", "--delta", "30", "--theta", "0.5"]) == 1


class TestSolve:
    def test_bundled_improved_n20_reproduces_published_error(self, tmp_path, capsys):
        cfg = rewrite_output(CONFIG_DIR / "example1_improved_n20.ini", tmp_path, "run")
        assert main(["solve", "--config", str(cfg)]) == 0
        rows = read_csv(tmp_path / "run.csv")
        assert len(rows) == 21
        worst = max(float(r["abs_error"]) for r in rows)
        assert 2.08e-6 / 10 <= worst <= 2.08e-6 * 10

    def test_csv_schema_and_determinism(self, tmp_path):
        cfg = rewrite_output(CONFIG_DIR / "example1_improved_n20.ini", tmp_path, "run")
        assert main(["solve", "--config", str(cfg)]) == 0
        first = (tmp_path / "run.csv").read_bytes()
        assert first.splitlines()[0] == b"t,y_numeric,y_exact,abs_error"
        assert main(["solve", "--config", str(cfg)]) == 0
        assert (tmp_path / "run.csv").read_bytes() == first

    def test_missing_config_file(self, capsys):
        assert main(["solve", "--config", "/nonexistent.ini"]) == 1
        assert "error" in capsys.readouterr().err

    def test_constraint_violation_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("""\
[problem]
a = 0
b = 1
f = 0
g = 1
u0 = 0
u1 = 0
u2 = 0
u3 = 0
u4 = 0
u5 = 0
u6 = 0

[method]
mode = standard
alpha = 0
beta = 0
gamma_ = 0
delta = 59
n = 12

[output]
csv_path = {}
""".format(tmp_path / "bad.csv"))
        assert main(["solve", "--config", str(cfg)]) == 1
        assert "60" in capsys.readouterr().err

    def test_numerical_failure_exits_two(self, tmp_path, capsys):
        # exp(1000 t) overflows to inf on the grid, so assembly produces a
        # non-finite system and the solve is rejected as a numerical failure
        cfg = tmp_path / "overflow.ini"
        cfg.write_text("""\
[problem]
a = 0
b = 1
f = exp(1000*t)
g = 1.0
u0 = 0
u1 = 0
u2 = 0
u3 = 0
u4 = 0
u5 = 0
u6 = 0

[method]
mode = standard
alpha = 0
beta = 0
gamma_ = 0
delta = 60
n = 12

[output]
csv_path = {}
""".format(tmp_path / "overflow.csv"))
        with np.errstate(over="ignore", invalid="ignore"):
            code = main(["solve", "--config", str(cfg)])
        assert code == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_malformed_expression_exits_one(self, tmp_path, capsys):
        cfg = rewrite_output(CONFIG_DIR / "example1_improved_n20.ini", tmp_path, "run")
        broken = cfg.read_text().replace("f = 1", "f = oops(t)")
        cfg.write_text(broken)
        assert main(["solve", "--config", str(cfg)]) == 1
        assert "unknown function" in capsys.readouterr().err


class TestConverge:
    def test_report_csv_has_orders_for_doublings(self, tmp_path):
        cfg = rewrite_output(CONFIG_DIR / "example1_standard_col1.ini", tmp_path, "conv")
        assert main(["converge", "--config", str(cfg)]) == 0
        rows = read_csv(tmp_path / "conv.csv")
        assert [r["n"] for r in rows] == ["12", "24", "48", "96"]
        assert rows[0]["observed_order"] == ""
        orders = [float(r["observed_order"]) for r in rows[1:]]
        assert all(o > 1.7 for o in orders)
        published = (2.88e-1, 3.09e-2, 2.5e-3, 1.70e-4)
        for row, expect in zip(rows, published):
            assert expect / 10 <= float(row["max_abs_error"]) <= expect * 10


class TestCascade:
    def test_demo_runs_and_writes_g_expression(self, tmp_path, capsys):
        cfg = rewrite_output(CONFIG_DIR / "cascade_demo.ini", tmp_path, "casc")
        assert main(["cascade", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "composed g(t) =" in out
        g_text = (tmp_path / "casc.g.txt").read_text().strip()
        from heptaspline.forces import parse
        parse(g_text)                      # round-trips through the grammar
        rows = read_csv(tmp_path / "casc.csv")
        assert len(rows) == 21
        assert rows[0]["y_exact"] == ""    # no reference configured

    def test_solution_matches_direct_simulation(self, tmp_path):
        cfg = rewrite_output(CONFIG_DIR / "cascade_demo.ini", tmp_path, "casc")
        assert main(["cascade", "--config", str(cfg)]) == 0
        rows = read_csv(tmp_path / "casc.csv")

        import configparser
        from heptaspline.cascade import CascadeModel, simulate_direct
        from heptaspline.forces import parse
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp.read(cfg)
        sec = cp["cascade"]
        model = CascadeModel(
            n_scales=int(sec["N"]), gamma=float(sec["gamma"]),
            forces=tuple(parse(sec[f"L{k}"]) for k in range(1, 8)),
            init_velocities=tuple(float(sec[f"v{k}"]) for k in range(1, 8)),
            interval=(float(sec["a"]), float(sec["b"])))
        t, traj = simulate_direct(model, 20_000)
        for row in rows:
            tk = float(row["t"])
            idx = round((tk - t[0]) / (t[1] - t[0]))
            assert float(row["y_numeric"]) == pytest.approx(traj[idx, 0], abs=2e-5)

    def test_even_scale_count_exits_one(self, tmp_path, capsys):
        cfg = rewrite_output(CONFIG_DIR / "cascade_demo.ini", tmp_path, "casc")
        text = cfg.read_text().replace("N = 7", "N = 6").replace("L7 = 1\n", "")
        text = text.replace("v7 = 0\n", "")
        cfg.write_text(text)
        assert main(["cascade", "--config", str(cfg)]) == 1
        assert "odd" in capsys.readouterr().err
