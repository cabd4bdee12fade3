import json
import os

import numpy as np
import pytest

from qcvar.cli import ingest_csv, main
from qcvar.dgp import DgpSpec, NearUnitBase, local_sequence, simulate
from qcvar.exceptions import DomainError


def write_csv(path, names, values):
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@pytest.fixture
def sample_csv(tmp_path):
    rng = np.random.default_rng(0)
    values = np.cumsum(rng.normal(size=(100, 3)), axis=0)
    path = tmp_path / "series.csv"
    write_csv(path, ["a", "b", "c"], values)
    return str(path)


class TestIngestCsv:
    def test_plain_file(self, sample_csv):
        ds = ingest_csv(sample_csv)
        assert ds.p == 3 and ds.n == 100
        assert ds.names == ("a", "b", "c")

    def test_date_column_dropped_with_notice(self, tmp_path):
        path = tmp_path / "dated.csv"
        with open(path, "w") as fh:
            fh.write("date,x,y\n")
            for t in range(5):
                fh.write(f"2020-01-{t + 1:02d},{t * 1.0},{t * 2.0}\n")
        notices = []
        ds = ingest_csv(str(path), notices)
        assert ds.p == 2
        assert ds.names == ("x", "y")
        assert any("date" in n for n in notices)

    def test_missing_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        with open(path, "w") as fh:
            fh.write("x,y\n1.0,2.0\nNA,3.0\n")
        with pytest.raises(DomainError, match="row 3.*'x'"):
            ingest_csv(str(path))

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        with open(path, "w") as fh:
            fh.write("x,y\n1.0,2.0\n3.0\n")
        with pytest.raises(DomainError, match="line 3"):
            ingest_csv(str(path))

    def test_column_order_preserved(self, tmp_path):
        path = tmp_path / "ordered.csv"
        write_csv(path, ["z2", "z1"], np.array([[1.0, 2.0], [3.0, 4.0]]))
        ds = ingest_csv(str(path))
        assert ds.names == ("z2", "z1")
        assert ds.values[0, 0] == 1.0


class TestCommands:
    def test_roots_inline_coefficients(self, tmp_path, capsys):
        coeffs_path = tmp_path / "c.json"
        json.dump({"phi": [[[0.5, 0.0], [0.0, 0.95]]]}, open(coeffs_path, "w"))
        rc = main(["roots", "--coeffs", str(coeffs_path), "--rho", "0.9"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "near-unit" in out and "stable" in out
        assert "q: 1" in out

    def test_roots_from_data(self, sample_csv, capsys):
        rc = main(["roots", "--data", sample_csv, "--k", "1", "--rho", "0.9"])
        assert rc == 0
        assert "characteristic roots" in capsys.readouterr().out

    def test_irf_csv_output(self, tmp_path):
        coeffs_path = tmp_path / "c.json"
        json.dump({"phi": [[[0.5, 0.5], [0.0, 1.0]]]}, open(coeffs_path, "w"))
        out_path = tmp_path / "irf.csv"
        rc = main([
            "irf", "--coeffs", str(coeffs_path), "--q", "1", "--horizon", "5",
            "--format", "csv", "--output", str(out_path),
        ])
        assert rc == 0
        text = open(out_path).read()
        assert "value[0,0]" in text and text.startswith("# qcvar")

    def test_simulate_deterministic_and_zero_noise(self, tmp_path, capsys):
        coeffs_path = tmp_path / "c.json"
        json.dump(
            {"phi": [[[0.5, 0.0], [0.0, 0.9]]], "mu": [1.0, 2.0], "delta": [0.1, 0.0]},
            open(coeffs_path, "w"),
        )
        argv = ["simulate", "--coeffs", str(coeffs_path), "--n", "4", "--seed", "9",
                "--zero-noise", "--format", "csv"]
        rc = main(argv)
        first = capsys.readouterr().out
        assert rc == 0
        rows = [ln for ln in first.splitlines() if not ln.startswith(("#", "[", "y"))]
        assert rows[0].split(",")[0] == "1.1"  # mu + delta * 1
        main(argv)
        assert capsys.readouterr().out == first

    def test_fit_json_byte_identical(self, tmp_path, sample_csv):
        out1, out2 = tmp_path / "f1.json", tmp_path / "f2.json"
        argv = ["fit", "--data", sample_csv, "--k", "1", "--q", "1", "--rho", "0.9",
                "--grid-step", "0.02", "--format", "json"]
        assert main(argv + ["--output", str(out1)]) == 0
        assert main(argv + ["--output", str(out2)]) == 0
        assert open(out1).read() == open(out2).read()
        payload = json.loads(open(out1).read())
        assert payload["command"] == "fit"
        assert payload["config_hash"]

    def test_lr_command(self, tmp_path):
        base = NearUnitBase(
            a=np.array([[1.0]]), k=1,
            stationary=(np.array([[1.0], [0.0]]), np.array([[0.4]])),
        )
        ls = local_sequence(np.array([[-5.0]]), 200, base)
        y, _ = simulate(DgpSpec.simple(ls.realized, 200), 3)
        data_path = tmp_path / "y.csv"
        write_csv(data_path, ["s1", "s2"], y)
        out_path = tmp_path / "lr.json"
        rc = main([
            "lr", "--data", str(data_path), "--k", "1", "--q", "1",
            "--lambda0", "0.975", "--coef", "0,0", "--a0", "1.0",
            "--format", "json", "--output", str(out_path),
        ])
        assert rc == 0
        payload = json.loads(open(out_path).read())
        titles = [s["title"] for s in payload["sections"]]
        assert "dynamics-block LR" in titles and "coefficient LR" in titles

    def test_critvals_and_ci_pipeline(self, tmp_path, capsys):
        table_path = tmp_path / "cv.tbl"
        rc = main([
            "critvals", "--q", "1", "--det", "trend",
            "--c-grid=" + ",".join(str(v) for v in np.arange(-30.0, 0.5, 5.0)),
            "--steps", "200", "--reps", "2000", "--seed", "5",
            "--levels", "0.9,0.95,0.975,0.99", "--table", str(table_path),
        ])
        capsys.readouterr()
        assert rc == 0 and os.path.exists(table_path)

        base = NearUnitBase(
            a=np.array([[1.0]]), k=1,
            stationary=(np.array([[1.0], [0.0]]), np.array([[0.4]])),
        )
        ls = local_sequence(np.array([[-5.0]]), 250, base)
        y, _ = simulate(DgpSpec.simple(ls.realized, 250), 4)
        data_path = tmp_path / "y.csv"
        write_csv(data_path, ["s1", "s2"], y)
        rc = main([
            "ci", "--data", str(data_path), "--k", "1", "--q", "1", "--rho", "0.9",
            "--alpha1", "0.025", "--alpha2", "0.025", "--coef", "0,0",
            "--table", str(table_path), "--grid-step", "0.02",
        ])
        out = capsys.readouterr().out
        assert rc == 0
        assert "overall_level: 0.95" in out
        assert "bonferroni confidence set" in out

    def test_ci_missing_table_exit_code(self, tmp_path, sample_csv, capsys):
        rc = main([
            "ci", "--data", sample_csv, "--k", "1", "--q", "1",
            "--alpha1", "0.025", "--alpha2", "0.025", "--coef", "0,0",
            "--table", str(tmp_path / "missing.tbl"),
        ])
        capsys.readouterr()
        assert rc == 4

    def test_bad_csv_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        with open(path, "w") as fh:
            fh.write("x,y\n1.0,NA\n")
        rc = main(["roots", "--data", str(path), "--k", "1"])
        capsys.readouterr()
        assert rc == 2

    def test_separation_error_exit_code(self, tmp_path, capsys):
        # conjugate roots far from both regions: classification fails
        th = 0.5
        m = (0.95 * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]))
        coeffs_path = tmp_path / "c.json"
        json.dump({"phi": [m.tolist()]}, open(coeffs_path, "w"))
        rc = main(["roots", "--coeffs", str(coeffs_path), "--rho", "0.9"])
        capsys.readouterr()
        assert rc == 3

    def test_half_life_and_rho_mutually_exclusive(self, sample_csv, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["roots", "--data", sample_csv, "--k", "1",
                  "--rho", "0.9", "--half-life", "8"])
        capsys.readouterr()
        assert exc.value.code == 2
