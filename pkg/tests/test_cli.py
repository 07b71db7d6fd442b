import csv
import json
from math import comb

import numpy as np
import pytest

from potential_encoding.cli import main
from potential_encoding.synth_hadamard import cnot_count_bound
from potential_encoding.synth_poly import gate_complexity


def run(tmp_path, *argv):
    return main(["--out", str(tmp_path), *argv])


def read_json(path):
    return json.loads(path.read_text())


class TestSample:
    def test_default_nai(self, tmp_path, capsys):
        assert run(tmp_path, "sample") == 0
        rows = list(csv.reader((tmp_path / "grid.csv").open()))
        assert rows[0] == ["x", "value"]
        assert len(rows) == 17
        assert float(rows[1][1]) == pytest.approx(1855.1655, rel=1e-6)
        assert "16 points" in capsys.readouterr().out

    def test_tabulated_infers_n(self, tmp_path):
        src = tmp_path / "in.csv"
        src.write_text("x,value\n" + "".join(f"{k * 0.5},{k * k}\n" for k in range(8)))
        out = tmp_path / "out"
        assert main(["--out", str(out), "--json", "sample", "--model", "tabulated", "--file", str(src)]) == 0
        assert read_json(out / "grid.json")["n"] == 3

    def test_non_power_of_two(self, tmp_path, capsys):
        src = tmp_path / "bad.csv"
        src.write_text("x,value\n0,1\n1,2\n2,3\n")
        assert run(tmp_path, "sample", "--model", "tabulated", "--file", str(src)) == 2
        assert "power of two" in capsys.readouterr().err

    def test_file_without_tabulated(self, tmp_path):
        assert run(tmp_path, "sample", "--file", "x.csv") == 2


class TestEncode:
    def test_hadamard_report(self, tmp_path):
        assert run(tmp_path, "encode", "--method", "hadamard", "--n", "4", "--model", "shifted") == 0
        rep = read_json(tmp_path / "encode_report.json")
        assert rep["counts"]["rz"] == 15 and rep["counts"]["cnot"] == 34
        assert rep["verified"] and rep["diagonal_max_error"] < 1e-10
        qasm = (tmp_path / "circuit.qasm").read_text()
        assert qasm.startswith("OPENQASM 2.0;")
        assert "qreg q[4];" in qasm
        assert qasm.count("\ncx ") == 34 and qasm.count("\nrz(") == 15

    def test_gray_cancel(self, tmp_path):
        assert run(tmp_path, "encode", "--ordering", "gray", "--cancel", "--model", "shifted") == 0
        assert read_json(tmp_path / "encode_report.json")["counts"]["cnot"] <= 30

    def test_poly_report(self, tmp_path):
        assert run(tmp_path, "encode", "--method", "poly", "--order", "2") == 0
        rep = read_json(tmp_path / "encode_report.json")
        assert rep["counts"]["physical"] == 10
        assert rep["formulas"]["parameters_K"] == 11
        assert rep["diagonal_vs_fit_max_error"] < 1e-10

    def test_ccp(self, tmp_path):
        assert run(tmp_path, "encode", "--method", "poly", "--order", "2", "--ccp", "2", "--ccp-select", "greedy") == 0
        assert read_json(tmp_path / "encode_report.json")["counts"]["ccphase"] == 2

    def test_circuit_json_round_trip(self, tmp_path):
        from potential_encoding.circuit import Circuit
        from potential_encoding.sim import circuit_diagonal

        run(tmp_path, "encode", "--method", "poly", "--order", "3", "--model", "decay")
        c = Circuit.from_json((tmp_path / "circuit.json").read_text())
        assert circuit_diagonal(c).entries.shape == (16,)

    @pytest.mark.parametrize("order", ["5", "4", "-1"])
    def test_bad_order(self, tmp_path, order):
        assert run(tmp_path, "encode", "--method", "poly", "--order", order) == 2


class TestReconstruct:
    def test_shifted_exact(self, tmp_path):
        assert run(tmp_path, "reconstruct", "--model", "shifted", "--t", "0.5", "--tol", "1e-9") == 0
        rep = read_json(tmp_path / "reconstruction.json")
        assert rep["max_abs_error"] < 1e-9 and rep["wrapped_points"] == 0
        header = (tmp_path / "reconstruction.csv").read_text().splitlines()[0]
        assert header == "x,v_ref,v_rec,abs_err,wrapped"
        assert (tmp_path / "diagonal.csv").exists()

    def test_constant_order_zero(self, tmp_path):
        src = tmp_path / "const.csv"
        src.write_text("x,value\n" + "".join(f"{k},0.7\n" for k in range(4)))
        assert run(tmp_path, "reconstruct", "--model", "tabulated", "--file", str(src),
                   "--method", "poly", "--order", "0", "--tol", "1e-12") == 0

    def test_tolerance_failure_exit_one(self, tmp_path):
        assert run(tmp_path, "reconstruct", "--method", "poly", "--order", "1", "--t", "1e-3", "--tol", "1e-9") == 1

    def test_nai_unit_time_warns(self, tmp_path, capsys):
        run(tmp_path, "reconstruct")
        assert "principal branch" in capsys.readouterr().out


class TestFidelity:
    def test_noiseless_all(self, tmp_path):
        assert run(tmp_path, "fidelity", "--n", "3", "--shots", "2000") == 0
        rep = read_json(tmp_path / "fidelity.json")
        assert set(rep["methods"]) == {"hadamard", "poly_r2", "poly_r3"}
        for entry in rep["methods"].values():
            assert entry["exact"] == pytest.approx(1.0)

    def test_noisy_ordering(self, tmp_path):
        assert run(tmp_path, "fidelity", "--p2", "0.02", "--p1", "0.005", "--p3", "0.05",
                   "--trajectories", "500", "--shots", "1000") == 0
        m = read_json(tmp_path / "fidelity.json")["methods"]
        assert m["poly_r2"]["noisy"]["mean"] > m["hadamard"]["noisy"]["mean"]

    def test_zero_shots(self, tmp_path):
        assert run(tmp_path, "fidelity", "--shots", "0") == 2

    def test_invalid_noise(self, tmp_path):
        assert run(tmp_path, "fidelity", "--p1", "2") == 2

    def test_seed_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["--out", str(a), "fidelity", "--seed", "7", "--p2", "0.01", "--trajectories", "50"])
        main(["--out", str(b), "fidelity", "--seed", "7", "--p2", "0.01", "--trajectories", "50"])
        assert (a / "fidelity.json").read_bytes() == (b / "fidelity.json").read_bytes()

    def test_seed_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("POTENC_SEED", "99")
        run(tmp_path, "fidelity", "--method", "hadamard", "--shots", "100")
        assert read_json(tmp_path / "fidelity.json")["seed"] == 99
        monkeypatch.setenv("POTENC_SEED", "abc")
        assert run(tmp_path, "fidelity", "--shots", "100") == 2


class TestSweep:
    def test_closed_forms(self, tmp_path):
        assert run(tmp_path, "gatecount-sweep", "--n-min", "2", "--n-max", "8") == 0
        rows = list(csv.DictReader((tmp_path / "gatecount.csv").open()))
        assert [int(r["n"]) for r in rows] == list(range(2, 9))
        for r in rows:
            n = int(r["n"])
            assert int(r["hadamard_rz"]) == 2**n - 1
            assert int(r["hadamard_cnot"]) == sum(comb(n, k) * 2 * (k - 1) for k in range(2, n + 1))
            assert int(r["hadamard_cnot"]) == cnot_count_bound(n)
            assert int(r["poly_r2_total"]) == n + n * (n - 1) // 2 == gate_complexity(n, 2)
        assert rows[0]["poly_r2_total"] == "3"
        assert read_json(tmp_path / "gatecount.json")["matches_closed_form"]

    def test_bad_range(self, tmp_path):
        assert run(tmp_path, "gatecount-sweep", "--n-min", "5", "--n-max", "3") == 2


def test_bad_choice_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "encode", "--method", "nope")
    assert info.value.code == 2
