import json

import pytest
from mpmath import mp

from eisperiods.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestFourierCommand:
    def test_check_lattice_high_weight_passes(self, capsys):
        code, doc = run(
            capsys,
            "--tol", "1e-18", "--trunc", "80", "--radius", "300",
            "fourier", "--k", "11", "--N", "3", "--lambda", "1,2",
            "--tau", "0.2,2.0", "--check-lattice",
        )
        assert code == 0
        assert doc["lattice_check"]["pass"] is True

    def test_check_lattice_low_weight_documented_bound(self, capsys):
        # weight-4 truncation error sits near the documented R^{2-w} bound,
        # so a tolerance far below it must fail with exit code 1
        code, doc = run(
            capsys,
            "--tol", "1e-12", "--trunc", "60", "--radius", "50",
            "fourier", "--k", "4", "--N", "1", "--lambda", "0,0", "--check-lattice",
        )
        assert code == 1
        assert doc["lattice_check"]["pass"] is False
        code, doc = run(
            capsys,
            "--tol", "1e-2", "--trunc", "60", "--radius", "50",
            "fourier", "--k", "4", "--N", "1", "--lambda", "0,0", "--check-lattice",
        )
        assert code == 0

    def test_maass_all_zero_series(self, capsys):
        code, doc = run(
            capsys, "--trunc", "6",
            "fourier", "--k", "2", "--l", "1", "--N", "1", "--lambda", "0,0",
        )
        assert code == 0
        s = doc["series"]
        assert s["kind"] == "maass"
        assert all(not d for d in s["coeffs"])
        assert all(not d for d in s["coeffs_conj"])
        assert not s["nonholo"]

    def test_malformed_lambda_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["fourier", "--k", "4", "--N", "1", "--lambda", "zz"])
        assert exc.value.code == 2

    def test_out_of_range_weight_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["fourier", "--k", "40", "--N", "1", "--lambda", "0,0"])
        assert exc.value.code == 2


class TestLvaluesCommand:
    def test_triple_agreement(self, capsys):
        code, doc = run(
            capsys, "--tol", "1e-20",
            "lvalues", "--k", "4", "--N", "2", "--lambda", "0,1",
        )
        assert code == 0
        assert len(doc["values"]) == 3
        assert all(rec["pass"] for rec in doc["values"])

    def test_inadmissible_parameter_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["lvalues", "--k", "2", "--N", "2", "--lambda", "0,0"])
        assert exc.value.code == 2


class TestPeriodsCommand:
    def test_period_json(self, capsys):
        code, doc = run(capsys, "periods", "--k", "4", "--N", "1", "--lambda", "0,0")
        assert code == 0
        assert doc["period_T"][0]["rational"] == "1/2160"
        assert doc["period_S"][1]["rational"] == "-1/432"
        assert doc["period_S"][0]["symbols"][0]["w"] == 3


class TestRationalityCommand:
    def test_small_sweep(self, capsys):
        code, doc = run(capsys, "rationality", "--k-max", "4", "--N-max", "3")
        assert code == 0
        assert doc["summary"]["failed"] == 0
        assert doc["summary"]["cells"] == doc["summary"]["certified"] > 0

    def test_weight_two_level_two_has_three_records(self, capsys):
        code, doc = run(capsys, "rationality", "--k", "2", "--N", "2")
        assert code == 0
        assert doc["summary"]["cells"] == 3

    def test_empty_sweep_warns(self, capsys):
        code, doc = run(capsys, "rationality", "--k", "3", "--N", "2")
        assert code == 0
        assert "warning" in doc
        assert doc["summary"]["cells"] == 0


class TestRelationsCommand:
    def test_relations_sweep(self, capsys):
        code, doc = run(capsys, "relations", "--k", "4", "--N", "2")
        assert code == 0
        assert all(rec["relations_hold"] for rec in doc["records"])


class TestInvariantCommand:
    def test_gaussian_m2(self, capsys):
        code, doc = run(capsys, "invariant", "--m", "2", "--preset", "gaussian")
        assert code == 0
        assert doc["failed"] == 0
        recs = {c.get("gamma", c["check"]): c["reconstructed"] for c in doc["checks"]}
        assert recs["T"] == "2/135"
        assert recs["value_ratio"] == "-1/6"

    def test_eisenstein_m3_gamma_s(self, capsys):
        code, doc = run(capsys, "invariant", "--m", "3", "--preset", "eisenstein", "--gamma", "S")
        assert code == 0
        assert doc["failed"] == 0

    def test_missing_data_file_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["invariant", "--m", "2", "--data", "/no/such/file.json"])
        assert exc.value.code == 2

    def test_data_file_round_trip(self, capsys, tmp_path):
        path = tmp_path / "lattice.json"
        path.write_text(json.dumps({"minpoly": [1, 0, 1], "omega2": "1/1", "N": 1, "lambda": [0, 0]}))
        code, doc = run(capsys, "invariant", "--m", "2", "--data", str(path), "--gamma", "T")
        assert code == 0
        assert doc["lattice"]["disc"] == -4


class TestHeckeCommand:
    def test_gaussian_value(self, capsys):
        code, doc = run(capsys, "--trunc", "200", "hecke", "--m", "2", "--preset", "gaussian")
        assert code == 0
        with mp.workprec(120):
            want = mp.zeta(2) * mp.catalan
            got = mp.mpf(doc["value"]["dec"].strip("()").split(" ")[0])
            assert abs(got - want) < mp.mpf(10) ** -12


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for target in (a, b):
            code = main(
                ["--out", str(target), "rationality", "--k-max", "3", "--N-max", "3"]
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_fourier_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for target in (a, b):
            main(
                ["--out", str(target), "--trunc", "20",
                 "fourier", "--k", "5", "--l", "3", "--N", "2", "--lambda", "1,0"]
            )
        assert a.read_bytes() == b.read_bytes()


class TestEnvPrecision:
    def test_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("EISP_PREC", "96")
        code, doc = run(capsys, "periods", "--k", "4", "--N", "1", "--lambda", "0,0")
        assert code == 0


class TestTolValidation:
    def test_tol_below_precision_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["--prec", "64", "--tol", "1e-40",
                  "periods", "--k", "4", "--N", "1", "--lambda", "0,0"])
        assert exc.value.code == 2
