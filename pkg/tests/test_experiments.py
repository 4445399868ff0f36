import numpy as np
import pytest

from bridgelaw import experiments
from bridgelaw.experiments import ExperimentSpec

from conftest import requires_compiled


def _spec(name, **kw):
    base = dict(paths=4000, dt=2e-3, master_seed=1, exact_n=30_000)
    base.update(kw)
    return ExperimentSpec(name=name, **base)


class TestRunMechanics:
    def test_unknown_name(self):
        with pytest.raises(KeyError):
            experiments.run(_spec("verify_everything"))

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            experiments.run(_spec("verify_mellin", paths=0))
        with pytest.raises(ValueError):
            experiments.run(_spec("verify_mellin", dt=0.0))

    def test_report_shape_and_policy_fields(self):
        rep = experiments.run(_spec("verify_mellin"))
        assert rep.name == "verify_mellin"
        assert rep.n_stat_checks == 9
        assert rep.allowed_stat_failures >= 0
        body = rep.to_body()
        assert set(body) == {
            "name", "spec", "checks", "n_stat_checks", "stat_failures",
            "allowed_stat_failures", "overall",
        }
        for c in body["checks"]:
            assert set(c) == {
                "id", "kind", "statistic", "target", "tolerance", "p_value", "verdict",
            }

    def test_deterministic_body(self):
        a = experiments.run(_spec("verify_lemma_exp")).to_body()
        b = experiments.run(_spec("verify_lemma_exp")).to_body()
        assert a == b

    @requires_compiled
    def test_worker_count_does_not_change_body(self):
        a = experiments.run(_spec("verify_theorem1"), workers=1).to_body()
        b = experiments.run(_spec("verify_theorem1"), workers=3).to_body()
        assert a == b

    def test_wall_time_outside_body(self):
        rep = experiments.run(_spec("verify_mellin"))
        assert rep.wall_time > 0.0
        assert "wall_time" not in rep.to_body()

    @requires_compiled
    def test_failure_budget_flags_scheme(self):
        # strangle the horizon so most paths exhaust: the report must flag it
        spec = _spec(
            "verify_theorem1", paths=300, dt=1e-4,
            options={"far_field_threshold": None, "max_chunks": 1},
        )
        rep = experiments.run(spec)
        flag = next(c for c in rep.checks if c.id == "path_failure_budget")
        assert flag.verdict == "fail"
        assert rep.overall == "fail"


class TestRecipesQuick:
    @requires_compiled
    @pytest.mark.parametrize("name", sorted(experiments.CATALOG))
    def test_catalog_entry_passes_at_small_scale(self, name, workers):
        rep = experiments.run(_spec(name), workers=workers)
        hard_fails = [
            c.id for c in rep.checks
            if experiments._check_level(c) is None and not c.passed
        ]
        assert not hard_fails, hard_fails
        assert rep.overall == "pass", [
            c.id for c in rep.checks if not c.passed
        ]

    def test_gamma_psi_option(self):
        spec = _spec("verify_appendixA", exact_n=20_000,
                     options={"gamma_psi": True})
        rep = experiments.run(spec)
        ids = [c.id for c in rep.checks]
        assert "gamma_psi_identity" in ids
        check = next(c for c in rep.checks if c.id == "gamma_psi_identity")
        assert check.passed


class TestGlobalVerdict:
    def test_aggregation(self):
        reports = [
            experiments.run(_spec("verify_mellin")),
            experiments.run(_spec("verify_lemma_exp")),
        ]
        verdict = experiments.global_verdict(reports)
        assert verdict["n_stat_checks"] == sum(r.n_stat_checks for r in reports)
        assert verdict["overall"] in ("pass", "fail")

    def test_budget_catalog(self):
        with pytest.raises(KeyError):
            experiments.run_all(1, budget="huge")


def test_stream_blocks_distinct():
    seen = {experiments.stream_block(n, t) for n in experiments.CATALOG for t in ("a", "b")}
    assert len(seen) == 2 * len(experiments.CATALOG)
    assert all(v % (1 << 32) == 0 for v in seen)
