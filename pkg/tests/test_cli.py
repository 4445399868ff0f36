import json
import math

import numpy as np
import pytest

from bridgelaw import cli, experiments

from conftest import requires_compiled


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


class TestVerifyCommand:
    @requires_compiled
    def test_verify_writes_report_and_exits_zero(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = cli.main([
            "verify", "theorem1", "--paths", "4000", "--dt", "2e-3",
            "--exact-n", "4000", "--seed", "42", "--workers", "2",
            "--out", str(out),
        ])
        assert code == 0
        doc = json.loads(out.read_text())
        assert set(doc) == {"header", "body"}
        body = doc["body"]
        assert body["name"] == "verify_theorem1"
        assert body["seed"] == 42
        assert body["version"]
        assert body["overall"] == "pass"
        assert {c["id"] for c in body["checks"]} >= {"x_marginal_vs_exact", "z_vs_uniform_cdf"}

    def test_verify_accepts_prefixed_name(self, capsys):
        code, out = run_cli([
            "verify", "verify_mellin", "--exact-n", "20000", "--seed", "1",
        ], capsys)
        assert code == 0

    def test_unknown_experiment_is_config_error(self, capsys):
        code, _ = run_cli(["verify", "nonsense", "--seed", "1"], capsys)
        assert code == 2

    def test_failed_verification_exits_one(self, capsys, monkeypatch):
        def always_fail(recipe):
            recipe.hard("forced", False)

        monkeypatch.setitem(experiments.CATALOG, "verify_theorem1", always_fail)
        code, _ = run_cli(["verify", "theorem1", "--seed", "1"], capsys)
        assert code == 1

    def test_csv_format(self, capsys):
        code, out = run_cli([
            "verify", "mellin", "--exact-n", "20000", "--seed", "1", "--format", "csv",
        ], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "experiment,check_id,kind,statistic,target,tolerance,p_value,verdict"
        assert len(lines) == 10

    def test_seed_env_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("BRIDGELAW_SEED", "777")
        code, out = run_cli(["verify", "mellin", "--exact-n", "20000"], capsys)
        assert code == 0
        assert json.loads(out)["body"]["seed"] == 777


class TestDensityCommand:
    def test_k_grid_riemann_sum(self, capsys):
        # a wide grid captures all but ~2.5e-3 of the heavy left tail
        code, out = run_cli(["density", "k", "--grid", "-200:1:0.01"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,pdf,cdf"
        data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        riemann = data[:, 1].sum() * 0.01
        assert abs(riemann - 1.0) < 0.01
        cdf = data[:, 2]
        assert np.all(np.diff(cdf) >= -1e-12)
        # last grid point is nudged to 1 - step/2
        from bridgelaw import laws

        assert cdf[-1] == pytest.approx(laws.k_cdf_exact(data[-1, 0]), abs=1e-9)

    def test_open_endpoints_nudged(self, capsys):
        code, out = run_cli(["density", "l", "--grid", "0:1:0.1"], capsys)
        assert code == 0
        lines = out.strip().splitlines()[1:]
        xs = [float(line.split(",")[0]) for line in lines]
        assert xs[0] == pytest.approx(0.05)
        assert xs[-1] == pytest.approx(0.95)

    def test_interior_singularity_exported_as_inf(self, capsys):
        code, out = run_cli(["density", "l", "--grid", "0.3:0.7:0.1"], capsys)
        assert code == 0
        lines = out.strip().splitlines()[1:]
        mid = [line for line in lines if line.startswith("0.5,")]
        assert mid and mid[0].split(",")[1] == "inf"

    def test_seventeen_significant_digits(self, capsys):
        code, out = run_cli(["density", "u", "--grid", "-0.25:-0.15:0.1"], capsys)
        assert code == 0
        row = out.strip().splitlines()[1].split(",")
        assert float(row[1]) == math.log(3.0)
        assert row[1] == f"{math.log(3.0):.17g}"

    def test_family_parameter(self, capsys):
        code, out = run_cli(["density", "ac_a", "--c", "1", "--grid", "-1:1:0.5",
                             "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["name"] == "ac_a[1]"

    def test_bad_grid_is_config_error(self, capsys):
        assert run_cli(["density", "k", "--grid", "1:0:0.1"], capsys)[0] == 2
        assert run_cli(["density", "k", "--grid", "oops"], capsys)[0] == 2
        assert run_cli(["density", "zeta", "--grid", "0:1:0.1"], capsys)[0] == 2


class TestSampleCommand:
    def test_reference_kind_csv(self, capsys):
        code, out = run_cli(["sample", "thm1_rhs", "-n", "50", "--seed", "3"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,y,z"
        assert len(lines) == 51

    def test_scalar_kind(self, capsys):
        code, out = run_cli(["sample", "exact_T1", "-n", "10", "--seed", "3"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x"
        assert len(lines) == 11
        assert all(float(line) > 0 for line in lines[1:])

    def test_simulated_kind(self, capsys):
        code, out = run_cli([
            "sample", "hitting", "-n", "30", "--dt", "1e-2", "--seed", "3",
        ], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,y,z"
        zs = [float(line.split(",")[2]) for line in lines[1:]]
        assert all(0.0 <= z <= 1.0 for z in zs)

    def test_unknown_kind(self, capsys):
        assert run_cli(["sample", "wat", "-n", "5"], capsys)[0] == 2

    def test_json_format(self, capsys):
        code, out = run_cli([
            "sample", "lemma_exp_pair", "-n", "5", "--seed", "1", "--format", "json",
        ], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["columns"] == ["x", "y"]
        assert len(doc["values"]) == 5


class TestDeterminism:
    @requires_compiled
    def test_verify_body_bytes_stable_across_workers(self, tmp_path):
        bodies = []
        for workers in (1, 2):
            out = tmp_path / f"w{workers}.json"
            code = cli.main([
                "verify", "corollary2", "--paths", "4000", "--dt", "2e-3",
                "--exact-n", "4000", "--seed", "5", "--workers", str(workers),
                "--out", str(out),
            ])
            assert code == 0
            body = json.loads(out.read_text())["body"]
            bodies.append(cli.report_body_bytes(body))
        assert bodies[0] == bodies[1]

    def test_bad_command_exits_config(self, capsys):
        assert cli.main(["frobnicate"]) == 2
        assert cli.main([]) == 2
