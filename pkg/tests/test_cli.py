import csv
import io

import pytest

from ghz_witness.cli import PURIFICATION_BETA, beta_grid, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def record(out):
    return dict(line.split("=", 1) for line in out.splitlines())


class TestCompute:
    def test_ghz_five(self, capsys):
        code, out, _ = run(capsys, "compute", "--model", "ghz:5", "--beta", "1")
        rec = record(out)
        assert code == 0
        assert float(rec["value_wa"]) == pytest.approx(2.1119, abs=1e-4)
        assert float(rec["value_wb"]) == pytest.approx(0.4632, abs=1e-4)

    def test_ghz_five_cold(self, capsys):
        rec = record(run(capsys, "compute", "--model", "ghz:5", "--beta", "50")[1])
        assert float(rec["value_wa"]) == pytest.approx(16.0)
        assert rec["min_entangled_qubits"] == "5" and rec["min_partiteness"] == "5"

    def test_ring(self, capsys):
        code, out, _ = run(capsys, "compute", "--model", "ring:4", "--beta", "1", "--witness", "wb", "--restarts", "1")
        assert code == 0
        assert record(out)["multi_setting_wwzb_violated"] == "true"

    def test_csv_out(self, capsys, tmp_path):
        path = tmp_path / "row.csv"
        run(capsys, "compute", "--model", "cluster:6", "--beta", "2", "--out", str(path))
        rows = list(csv.DictReader(path.open()))
        assert rows[0]["n_qubits"] == "6"

    @pytest.mark.parametrize(
        "argv",
        [
            ["compute", "--model", "blob:3", "--beta", "1"],
            ["compute", "--model", "ghz:3"],
            ["compute", "--model", "ghz:3", "--beta", "-1"],
            ["compute", "--model", "ghz:3", "--beta", "1", "--witness", "wc"],
            ["nonsense"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 1

    def test_computation_error(self, capsys):
        code, _, err = run(capsys, "compute", "--model", "ring:5", "--beta", "1", "--cap", "4")
        assert code == 2 and "cap 4" in err

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "compute", "--model", "ghz:3", "--beta", "1", "--out", str(tmp_path / "no" / "x.csv"))
        assert code == 2 and "cannot write" in err


class TestSweepAndFigure:
    def test_sweep(self, capsys):
        code, out, _ = run(capsys, "sweep", "--model", "ghz:4", "--beta-grid", "0:2:3")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and [r["beta"] for r in rows] == ["0", "1", "2"]
        assert float(rows[-1]["W_A"]) > float(rows[0]["W_A"])

    def test_figure1(self, capsys):
        code, out, _ = run(capsys, "figure1", "--beta-grid", "0:5:11")
        rows = list(csv.DictReader(io.StringIO(out)))
        ghz = [float(r["W_A"]) for r in rows if r["model"] == "ghz:5"]
        cluster = [float(r["W_A"]) for r in rows if r["model"] == "cluster:7"]
        assert ghz == sorted(ghz) and cluster == sorted(cluster)
        at_one = next(r for r in rows if r["model"] == "ghz:5" and r["beta"] == "1")
        assert float(at_one["W_A"]) == pytest.approx(2.1119, abs=1e-4)
        assert [float(r["W_A"]) for r in rows if r["model"] == "hline"] == [1, 2, 4, 8]
        vline = next(r for r in rows if r["model"] == "vline")
        assert float(vline["beta"]) == pytest.approx(PURIFICATION_BETA)
        assert PURIFICATION_BETA == pytest.approx(0.8814, abs=1e-4)

    @pytest.mark.parametrize("text", ["1:2", "0:1:0", "a:b:c", "-1:2:3"])
    def test_bad_grid(self, text):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            beta_grid(text)


class TestCritical:
    def test_default_is_cluster_limit(self, capsys):
        code, out, _ = run(capsys, "critical")
        rows = list(csv.DictReader(io.StringIO(out)))
        values = {r["kind"]: float(r["beta_crit"]) for r in rows}
        assert code == 0
        assert values["wa"] == pytest.approx(1.667, abs=0.005)
        assert values["wb"] == pytest.approx(2.351, abs=0.005)
        assert len(rows[0]["beta_crit"].split(".")[1]) == 6

    def test_no_root(self, capsys):
        code, out, _ = run(capsys, "critical", "--model", "cluster:7", "--threshold", "5")
        assert code == 2 and "no-root" in out

    def test_scaling(self, capsys):
        _, out, _ = run(capsys, "critical", "--model", "ghz:3", "--witness", "wa", "--scaling", "3:16")
        assert "slope" in out and "ghz:3,wa,1,1.008802" in out


class TestVerifyAndScan:
    def test_verify_passes(self, capsys):
        code, out, _ = run(capsys, "verify")
        assert code == 0 and out.rstrip().endswith("overall: PASS")

    def test_verify_is_reproducible(self, capsys):
        assert run(capsys, "verify", "--seed", "3")[1] == run(capsys, "verify", "--seed", "3")[1]

    def test_tampered_tolerance(self, capsys):
        code, out, _ = run(capsys, "verify", "--tolerance", "-1")
        assert code == 3 and "FAIL" in out

    def test_wscan(self, capsys):
        code, out, _ = run(capsys, "wscan", "--m", "2", "--n", "3")
        assert code == 0 and record(out)["estimate"] == "2"

    def test_wscan_bad_sizes(self, capsys):
        assert run(capsys, "wscan", "--m", "5", "--n", "3")[0] == 1
