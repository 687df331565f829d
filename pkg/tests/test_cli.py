"""Tests for the command-line harness (run in-process via main(argv))."""

import csv
import json
import subprocess
import sys

import pytest

from linkcert import cli


def run_cli(*args):
    return cli.main([str(a) for a in args])


@pytest.fixture
def euclidean_instance(tmp_path):
    assert run_cli("--out-dir", tmp_path, "generate", "euclidean",
                   "--n", 8, "--dim", 2) == 0
    return tmp_path / "euclidean_n8_d2_s0.json"


class TestGenerate:
    def test_euclidean(self, tmp_path, capsys):
        assert run_cli("--out-dir", tmp_path, "generate", "euclidean",
                       "--n", 6, "--dim", 3) == 0
        out = json.loads(capsys.readouterr().out)
        data = json.loads(open(out["instance"]).read())
        assert data["n"] == 6
        assert len(data["dist"]) == 15

    def test_metric(self, tmp_path, capsys):
        assert run_cli("--out-dir", tmp_path, "--seed", 4, "generate",
                       "metric", "--n", 7) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["n"] == 7

    def test_adversary_with_sidecar(self, tmp_path, capsys):
        assert run_cli("--out-dir", tmp_path, "generate", "adversary",
                       "--k", 4, "--B", 50, "--eps", 1) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["n"] == 7
        sidecar = json.loads(open(out["sidecar"]).read())
        assert sidecar["k"] == 4
        assert len(sidecar["target"]) == 4

    def test_adversary_requires_k(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("--out-dir", tmp_path, "generate", "adversary")
        assert exc.value.code == 2

    def test_seed_changes_instance(self, tmp_path):
        run_cli("--out-dir", tmp_path, "generate", "euclidean", "--n", 6)
        run_cli("--out-dir", tmp_path, "--seed", 1, "generate", "euclidean",
                "--n", 6)
        d0 = json.loads((tmp_path / "euclidean_n6_d2_s0.json").read_text())
        d1 = json.loads((tmp_path / "euclidean_n6_d2_s1.json").read_text())
        assert d0["dist"] != d1["dist"]


class TestRun:
    def test_dendrogram_and_scores(self, tmp_path, euclidean_instance, capsys):
        assert run_cli("--out-dir", tmp_path, "run", "--instance",
                       euclidean_instance, "--method", "CL", "--k", 3) == 0
        out = json.loads(capsys.readouterr().out)
        merges = json.loads(open(out["dendrogram"]).read())
        assert len(merges) == 7
        assert [m["iteration"] for m in merges] == list(range(1, 8))
        blocks = json.loads(open(out["clustering"]).read())
        assert sorted(x for b in blocks for x in b) == list(range(8))
        assert set(out["scores"]) == {"max-diam", "avg-diam", "max-avg",
                                      "max-radius"}

    def test_method_is_validated(self, tmp_path, euclidean_instance):
        with pytest.raises(SystemExit) as exc:
            run_cli("--out-dir", tmp_path, "run", "--instance",
                    euclidean_instance, "--method", "ward")
        assert exc.value.code == 2

    def test_missing_instance_is_usage_error(self, tmp_path):
        assert run_cli("--out-dir", tmp_path, "run", "--instance",
                       tmp_path / "nope.json", "--method", "CL") == 2


class TestCertify:
    def test_green_path_with_oracle_targets(self, tmp_path, euclidean_instance,
                                            capsys):
        assert run_cli("--out-dir", tmp_path, "certify", "--instance",
                       euclidean_instance, "--k", 3) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["certificates"]["alg1"]["ok"]
        assert report["certificates"]["alg2"]["ok"]
        assert report["certificates"]["alg1"]["failed"] == 0
        assert report["oracle"]["opt_dm"] <= report["achieved"]["max-diam"]
        assert (tmp_path / "euclidean_n8_d2_s0.CL.k3.alg1_trace.json").exists()
        assert (tmp_path / "euclidean_n8_d2_s0.CL.k3.alg2_trace.json").exists()
        assert (tmp_path / "euclidean_n8_d2_s0.CL.k3.report.json").exists()

    def test_bounds_in_report(self, tmp_path, euclidean_instance, capsys):
        run_cli("--out-dir", tmp_path, "certify", "--instance",
                euclidean_instance, "--k", 2)
        report = json.loads(capsys.readouterr().out)
        # k=2: avg exponent log2(3), dm factor exactly 2k-2 = 2
        assert report["bounds"]["factor_dm"] == 2.0
        assert report["bounds"]["avg_based"] == pytest.approx(
            3.0 * report["oracle"]["opt_av"], rel=1e-12)
        assert report["achieved"]["max-diam"] <= report["bounds"]["avg_based"]

    def test_file_target(self, tmp_path, capsys):
        run_cli("--out-dir", tmp_path, "generate", "adversary", "--k", 4,
                "--B", 50, "--eps", 1)
        capsys.readouterr()
        code = run_cli("--out-dir", tmp_path, "certify",
                       "--instance", tmp_path / "adversary_k4_B50_eps1.json",
                       "--k", 4, "--target",
                       tmp_path / "adversary_k4_B50_eps1.target.json")
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["certificates"]["alg1"]["ok"]
        assert report["certificates"]["alg2"]["ok"]

    def test_target_k_mismatch_is_usage_error(self, tmp_path, euclidean_instance):
        target = tmp_path / "t.json"
        target.write_text(json.dumps([[i] for i in range(8)]))
        assert run_cli("--out-dir", tmp_path, "certify", "--instance",
                       euclidean_instance, "--k", 3, "--target", target) == 2

    def test_failing_instance_exits_3_with_manifest(self, tmp_path):
        # no metric structure at all: the long edges cannot be certified
        inst = tmp_path / "bad.json"
        inst.write_text(json.dumps(
            {"n": 4, "dist": [2.0, 1.0, 1000.0, 1000.0, 1000.0, 2.0]}))
        target = tmp_path / "bad_target.json"
        target.write_text(json.dumps([[0, 1], [2, 3]]))
        assert run_cli("--out-dir", tmp_path, "certify", "--instance", inst,
                       "--k", 2, "--target", target) == 3
        manifest = json.loads((tmp_path / "failures.json").read_text())
        assert manifest["command"] == "certify"
        assert any(f["assertion"] == "p4" for f in manifest["failures"])

    def test_oracle_guard_exits_4(self, tmp_path, euclidean_instance):
        assert run_cli("--out-dir", tmp_path, "--n-max-oracle", 7, "certify",
                       "--instance", euclidean_instance, "--k", 3) == 4


class TestOracle:
    def test_value_and_witness(self, tmp_path, euclidean_instance, capsys):
        assert run_cli("--out-dir", tmp_path, "oracle", "--instance",
                       euclidean_instance, "--k", 3, "--score", "max-diam") == 0
        out = json.loads(capsys.readouterr().out)
        assert out["enumerated"] == 966  # S(8, 3)
        assert len(out["witness"]) == 3

    def test_guard(self, tmp_path, euclidean_instance):
        assert run_cli("--out-dir", tmp_path, "--n-max-oracle", 7, "oracle",
                       "--instance", euclidean_instance, "--k", 3,
                       "--score", "max-diam") == 4


class TestSweep:
    CONFIG = """\
[grid]
generators = euclidean
ns = 6 7
dims = 2
seeds = 0..1
ks = 2 3
methods = CL AL

[oracle]
enabled = true

[certificates]
enabled = true

[output]
csv = out.csv
"""

    def test_runs_and_is_deterministic(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.ini"
        cfg.write_text(self.CONFIG)
        assert run_cli("--out-dir", tmp_path, "sweep", "--config", cfg) == 0
        first = (tmp_path / "out.csv").read_bytes()
        assert run_cli("--out-dir", tmp_path, "--workers", 3, "sweep",
                       "--config", cfg) == 0
        assert (tmp_path / "out.csv").read_bytes() == first

    def test_rows_and_precision(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.ini"
        cfg.write_text(self.CONFIG)
        run_cli("--out-dir", tmp_path, "sweep", "--config", cfg)
        with open(tmp_path / "out.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 16  # 2 ns * 2 seeds * 2 methods * 2 ks
        for row in rows:
            # 17 significant digits survive the text round trip exactly
            v = float(row["max_diam"])
            assert f"{v:.17g}" == row["max_diam"]
            assert row["bound_ok"] == "true"
        cl_rows = [r for r in rows if r["method"] == "CL"]
        assert all(r["cert_ok"] == "true" for r in cl_rows)

    def test_bad_config_is_usage_error(self, tmp_path):
        cfg = tmp_path / "cfg.ini"
        cfg.write_text("[grid]\nmethods = ward\n")
        assert run_cli("--out-dir", tmp_path, "sweep", "--config", cfg) == 2

    def test_certificates_require_oracle(self, tmp_path):
        cfg = tmp_path / "cfg.ini"
        cfg.write_text("[grid]\nns = 6\n[certificates]\nenabled = true\n")
        assert run_cli("--out-dir", tmp_path, "sweep", "--config", cfg) == 2


class TestInequalities:
    def test_clean_run(self, tmp_path, capsys):
        assert run_cli("--out-dir", tmp_path, "inequalities",
                       "--samples", 500, "--i-max", 5000) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["ineq_avg"]["failures"] == 0
        assert out["ineq_2"]["failures"] == 0
        assert out["alpha_sup"]["argmax"] == 4
        with open(tmp_path / "ineq_avg_extremes.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 10


class TestEntryPoint:
    def test_console_script_help(self):
        proc = subprocess.run([sys.executable, "-m", "linkcert.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "certify" in proc.stdout
