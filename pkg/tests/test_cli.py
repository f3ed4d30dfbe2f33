import csv
import io
import json

import numpy as np
import pytest

from curvlab import decomp, tensor
from curvlab.cli import main, parse_range
from curvlab.euclid import GeometryError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParsing:
    def test_parse_range(self):
        assert parse_range("3") == (3, 3)
        assert parse_range("2..5") == (2, 5)

    def test_parse_range_rejects(self):
        with pytest.raises(GeometryError):
            parse_range("5..2")
        with pytest.raises(GeometryError):
            parse_range("x..2")

    def test_unknown_suite_is_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "--suite", "nosuch")
        assert code == 2
        assert "unknown suite" in err

    def test_bad_trials(self, capsys):
        code, _, err = run(capsys, "verify", "--suite", "tripod", "--trials", "0")
        assert code == 2


class TestVerify:
    def test_hp_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "hp", "--m", "2")
        assert code == 0
        report = json.loads(out)
        assert report["summary"]["failed"] == 0
        names = [r["name"] for r in report["records"]]
        assert "hp[2].spectrum" in names

    def test_wolf_adjudication_fails_both_candidates(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "wolf", "--m", "2")
        assert code == 1
        report = json.loads(out)
        by_name = {r["name"]: r for r in report["records"]}
        assert not by_name["wolf[2].hat_candidate_proof"]["passed"]
        assert not by_name["wolf[2].hat_candidate_statement"]["passed"]
        adj = by_name["wolf[2].hat_adjudication"]
        assert not adj["passed"]
        assert adj["actual"]["measured"] == pytest.approx(288.0)
        assert by_name["wolf[2].hat_resolved_form"]["passed"]

    def test_qk_ratio_reports_measured_constant(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "qk-ratio", "--m", "2", "--trials", "5"
        )
        assert code == 1
        report = json.loads(out)
        by_name = {r["name"]: r for r in report["records"]}
        pub = by_name["qk-ratio[2].matches_published_form"]
        assert pub["actual"]["matched"] == 0
        assert pub["actual"]["mean_ratio"] == pytest.approx(16.0)
        assert by_name["qk-ratio[2].measured_constant"]["passed"]
        assert by_name["qk-ratio[2].constancy_rel_spread"]["passed"]

    def test_tripod_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "tripod", "--trials", "50",
            "--format", "csv",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert all(r["passed"] == "true" for r in rows)
        assert {"name", "expected", "actual", "tolerance", "inputs"} <= set(rows[0])

    def test_grassmann_single_pair(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--suite", "grassmann", "--p", "2", "--q", "3"
        )
        assert code == 0
        report = json.loads(out)
        assert all("grassmann[2,3]" in r["name"] for r in report["records"])


class TestDeterminism:
    def test_repeat_runs_are_byte_identical(self, capsys):
        _, out1, _ = run(capsys, "verify", "--suite", "hp", "--m", "2")
        _, out2, _ = run(capsys, "verify", "--suite", "hp", "--m", "2")
        assert out1 == out2

    def test_thread_count_does_not_change_bytes(self, capsys, monkeypatch):
        _, base, _ = run(
            capsys, "verify", "--suite", "weyl-norm", "--n", "4", "--trials", "12"
        )
        monkeypatch.setenv("CURVLAB_THREADS", "4")
        _, threaded, _ = run(
            capsys, "verify", "--suite", "weyl-norm", "--n", "4", "--trials", "12"
        )
        assert base == threaded

    def test_seed_changes_sample_rows(self, capsys):
        _, a, _ = run(capsys, "sample", "--holonomy", "so", "--n", "4", "--trials", "3")
        _, b, _ = run(
            capsys, "sample", "--holonomy", "so", "--n", "4", "--trials", "3",
            "--seed", "7",
        )
        assert a != b

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        run(capsys, "verify", "--suite", "tripod", "--trials", "20",
            "--out", str(path))
        _, out, _ = run(capsys, "verify", "--suite", "tripod", "--trials", "20")
        assert path.read_text() == out


class TestSpectrum:
    def test_hp_example(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--model", "hp", "--m", "2")
        assert code == 0
        rec = json.loads(out)["records"][0]
        assert rec["inputs"]["dim"] == 13
        mults = {round(v): c for v, c in rec["actual"]["multiplicities"]}
        assert mults == {4: 10, 8: 3}

    def test_grassmann_example(self, capsys):
        code, out, _ = run(
            capsys, "spectrum", "--model", "grassmann", "--p", "4", "--q", "3"
        )
        rec = json.loads(out)["records"][0]
        mults = {round(v): c for v, c in rec["actual"]["multiplicities"]}
        assert mults == {0: 57, 3: 6, 4: 3}

    def test_sphere_example(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--model", "sphere", "--n", "5")
        rec = json.loads(out)["records"][0]
        assert rec["actual"]["multiplicities"] == [[pytest.approx(2.0), 10]]
        assert rec["inputs"]["domain"] == "full"

    def test_missing_parameter(self, capsys):
        code, _, err = run(capsys, "spectrum", "--model", "hp")
        assert code == 2
        assert "--m" in err


class TestDecompose:
    def test_sphere_has_no_weyl(self, capsys, tmp_path):
        path = tmp_path / "s6.json"
        tensor.save_tensor(decomp.sphere(6), path)
        code, out, _ = run(capsys, "decompose", str(path))
        assert code == 0
        payload = json.loads(out)["records"][0]["actual"]
        assert payload["part_norms_sq"]["weyl"] <= 1e-20
        assert payload["criterion"]["satisfied"] is True

    def test_hp_pure_model_flag(self, capsys, tmp_path):
        path = tmp_path / "hp2.json"
        tensor.save_tensor(decomp.hp(2), path)
        code, out, _ = run(capsys, "decompose", str(path), "--holonomy", "qk")
        assert code == 0
        payload = json.loads(out)["records"][0]["actual"]
        assert payload["pure_model"] is True

    def test_wolf_coefficient(self, capsys, tmp_path):
        path = tmp_path / "w3.json"
        tensor.save_tensor(decomp.wolf(3), path)
        code, out, _ = run(capsys, "decompose", str(path))
        payload = json.loads(out)["records"][0]["actual"]
        assert payload["coefficients"]["scalar"] == pytest.approx(0.25)
        assert payload["pure_model"] is False

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        code, _, err = run(capsys, "decompose", str(path))
        assert code == 2
        assert "invalid tensor file" in err

    def test_symmetry_violation_reports_residual(self, capsys, tmp_path):
        comp = np.zeros((4, 4, 4, 4))
        comp[0, 1, 0, 1] = 1.0
        path = tmp_path / "asym.json"
        path.write_text(json.dumps(
            {"n": 4, "structure": "generic", "components": comp.ravel().tolist()}
        ))
        code, _, err = run(capsys, "decompose", str(path))
        assert code == 2
        assert "residual" in err

    def test_holonomy_structure_mismatch(self, capsys, tmp_path):
        path = tmp_path / "s5.json"
        tensor.save_tensor(decomp.sphere(5), path)
        code, _, err = run(capsys, "decompose", str(path), "--holonomy", "qk")
        assert code == 2


class TestSample:
    def test_csv_columns(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--holonomy", "so", "--n", "4", "--trials", "4"
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 4
        assert {"trial", "lambda_min_1", "curvature_term_self",
                "criterion_value"} <= set(rows[0])

    def test_qk_rows_have_constant_hat_ratio(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--algebra", "qk", "--m", "2", "--trials", "4"
        )
        rows = list(csv.DictReader(io.StringIO(out)))
        ratios = {float(r["hat_ratio"]) for r in rows}
        assert all(abs(v - 16.0) < 1e-9 for v in ratios)

    def test_two_nonnegative_filter(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--holonomy", "so", "--n", "4", "--trials", "6",
            "--condition", "2-nonnegative",
        )
        rows = list(csv.DictReader(io.StringIO(out)))
        for r in rows:
            assert float(r["curvature_term_self"]) >= -1e-9
            assert float(r["lambda_min_1"]) + float(r["lambda_min_2"]) >= -1e-9

    def test_unfiltered_so4_has_negative_terms(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--holonomy", "so", "--n", "4", "--trials", "20"
        )
        rows = list(csv.DictReader(io.StringIO(out)))
        assert any(float(r["curvature_term_self"]) < 0 for r in rows)

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--holonomy", "u", "--m", "2", "--trials", "3",
            "--format", "json",
        )
        report = json.loads(out)
        assert report["summary"]["total"] == 3
