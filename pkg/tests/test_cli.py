import io
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from taperbeam.cli import main
from taperbeam.report import CSV_COLUMNS, RunRecord, read_csv

SOLID = ["--alpha", "1", "--n", "0", "--gamma", "0", "--phi", "0", "--psi", "0", "--q0", "1", "--kp", "0",
         "--bc", "ss"]
# parameter sets of the deflection-versus-parameter figures
FIG_ALPHA = ["--n", "1", "--phi", "0.5", "--psi", "0.5", "--gamma", "0", "--q0", "1", "--kp", "10"]
FIG_GAMMA = ["--alpha", "0.5", "--n", "3", "--phi", "0.2", "--psi", "0.2", "--q0", "1", "--kp", "1"]
FIG_KP = ["--alpha", "0.5", "--n", "4", "--phi", "0.4", "--psi", "0.4", "--q0", "1", "--gamma", "1"]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def sweep_curve(text):
    rows = read_csv(text)
    return [float(r["W_tilde"]) for r in rows]


class TestSolve:
    def test_solid_beam(self):
        code, text = run("solve", *SOLID, "--method", "dfl-tfc", "--at", "0.5")
        assert code == 0
        assert "1.3021" in text

    def test_zero_load(self):
        code, text = run("solve", *SOLID, "--q0", "0", "--at", "0.1", "0.5", "0.9")
        assert code == 0
        values = [line.split()[1] for line in text.splitlines()[2:]]
        assert values == ["0.0000"] * 3

    def test_alpha_zero_rejected(self, capsys):
        code, _ = run("solve", *SOLID, "--alpha", "0")
        assert code != 0
        err = capsys.readouterr().err
        assert "--alpha" in err and "(0, 1]" in err

    def test_bad_solver_flag_named(self, capsys):
        assert run("solve", "--fd-grid", "50", "--method", "fd")[0] == 2
        assert "--fd-grid" in capsys.readouterr().err

    @pytest.mark.parametrize("method", ["galerkin", "fd", "analytic", "dfl-tfc-lbfgs"])
    def test_other_methods(self, method):
        code, text = run("solve", *SOLID, "--method", method, "--at", "0.5")
        assert code == 0 and "1.302" in text

    def test_analytic_not_applicable(self, capsys):
        assert run("solve", "--alpha", "0.5", "--n", "2", "--method", "analytic")[0] == 2
        assert "--method" in capsys.readouterr().err

    def test_config_file_and_precedence(self, tmp_path):
        cfg = tmp_path / "beam.toml"
        cfg.write_text('alpha = 1.0\nn = 0\nq0 = 2.0\nkp = 0.0\nbc = "ss"\nat = [0.5]\n')
        code, text = run("solve", "--config", str(cfg))
        assert code == 0 and "2.6042" in text
        code, text = run("solve", "--config", str(cfg), "--q0", "1")
        assert "1.3021" in text
        js = tmp_path / "beam.json"
        js.write_text(json.dumps({"alpha": 1.0, "q0": 1.0, "at": [0.5]}))
        assert "1.3021" in run("solve", "--config", str(js))[1]

    def test_config_file_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "beam.toml"
        cfg.write_text("colour = 3\n")
        assert run("solve", "--config", str(cfg))[0] == 2
        assert "colour" in capsys.readouterr().err

    def test_json_record_round_trip(self, tmp_path):
        path = tmp_path / "run.json"
        code, _ = run("solve", *SOLID, "--kp", "10", "--at", "0.5", "--json", str(path))
        assert code == 0
        text = path.read_text()
        rec = RunRecord.from_json(text)
        assert rec.method == "dfl-tfc-ls"
        assert rec.samples[0][1] == pytest.approx(0.6448, abs=5e-4)
        assert rec.to_json() + "\n" == text

    def test_pinn_record_has_seed(self, tmp_path):
        path = tmp_path / "run.json"
        run("solve", *SOLID, "--method", "pinn", "--seed", "3", "--outer-steps", "1", "--inner-iterations", "2",
            "--json", str(path))
        assert RunRecord.from_json(path.read_text()).seed == 3

    def test_csv_columns_and_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("solve", *SOLID, "--csv", str(a))
        run("solve", *SOLID, "--csv", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
        assert all(r["wall_time_s"] == "" for r in read_csv(a.read_text()))


class TestSweep:
    def test_alpha_trend(self):
        code, text = run("sweep", *FIG_ALPHA, "--vary", "alpha=0.05:1:8", "--at", "0.5", "--workers", "1")
        assert code == 0
        w = sweep_curve(text)
        assert len(w) == 8 and all(b < a for a, b in zip(w, w[1:]))

    @pytest.mark.parametrize("bc", ["ss", "cs"])
    def test_gamma_trend_at_every_point(self, bc):
        code, text = run("sweep", *FIG_GAMMA, "--bc", bc, "--vary", "gamma=1:5:5", "--at", "0.2", "0.5", "0.7",
                         "0.9", "--workers", "1")
        w = np.array(sweep_curve(text)).reshape(5, 4)
        assert code == 0 and np.all(np.diff(w, axis=0) > 0)

    def test_kp_trend(self):
        code, text = run("sweep", *FIG_KP, "--vary", "kp=1:10:4", "--at", "0.5", "--workers", "1")
        w = sweep_curve(text)
        assert code == 0 and all(b < a for a, b in zip(w, w[1:]))

    def test_empty_range_rejected(self, capsys):
        assert run("sweep", "--vary", "alpha=0.1:0.9:0")[0] == 2
        assert "empty" in capsys.readouterr().err

    def test_two_parameters_and_parallel_order(self):
        args = ["sweep", *FIG_KP, "--vary", "kp=1,5", "--vary", "phi=0.1,0.5", "--at", "0.5"]
        code, serial = run(*args, "--workers", "1")
        _, parallel = run(*args, "--workers", "2")
        assert code == 0 and serial == parallel
        rows = read_csv(serial)
        assert [r["param_value"] for r in rows] == ["1&0.1", "1&0.5", "5&0.1", "5&0.5"]
        assert rows[0]["param_name"] == "kp&phi"

    def test_svg(self, tmp_path):
        path = tmp_path / "sweep.svg"
        run("sweep", *FIG_KP, "--vary", "kp=1:10:4", "--at", "0.2", "0.5", "--workers", "1", "--svg", str(path))
        root = ET.fromstring(path.read_text())
        assert root.tag.endswith("svg")
        assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 2


class TestReproduceAndCompare:
    @pytest.mark.parametrize("table", ["T1", "T3"])
    def test_reproduce_passes(self, table):
        code, text = run("reproduce", table, "--workers", "1")
        assert code == 0
        assert "FAIL" not in text

    def test_reproduce_marks_suspect_cell(self):
        code, text = run("reproduce", "T6-gammaKp", "--workers", "2")
        assert code == 0
        assert text.count("suspect, not counted") == 1

    def test_compare(self):
        code, text = run("compare", *SOLID, "--kp", "10", "--at", "0.5", "--workers", "1", "--outer-steps", "5")
        assert code == 0
        for m in ("dfl-tfc", "galerkin", "pinn", "fd", "analytic"):
            assert m in text

    def test_loss_study_small(self, tmp_path):
        svg = tmp_path / "loss.svg"
        code, text = run("loss-study", "--alpha", "0.7", "--gamma", "3", "--phi", "0.5", "--psi", "0.5", "--n", "1",
                         "--kp", "10", "--q0", "2", "--layers", "1", "--orders", "13", "15", "--svg", str(svg))
        assert code == 0
        assert "FAIL" not in text and text.count("[PASS]") == 3
        ET.fromstring(svg.read_text())

    @pytest.mark.slow
    def test_reproduce_loss_table(self):
        code, text = run("reproduce", "L-SS")
        assert code == 0 and text.rstrip().endswith("PASS")
