import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgelaw import kernel, laws, pathkit, stats
from bridgelaw.stats import BiasLadder, EmpiricalSample

from conftest import requires_compiled


def _brute_force_ks(x, y):
    """O(n*m) oracle: sup over all observed points of |F_n - G_m|."""
    x = np.sort(x)
    y = np.sort(y)
    pts = np.concatenate([x, y])
    d = 0.0
    for v in pts:
        fx = np.sum(x <= v) / len(x)
        fy = np.sum(y <= v) / len(y)
        d = max(d, abs(fx - fy))
    return d


class TestKsTwoSample:
    def test_identical_samples(self):
        a = EmpiricalSample.from_values(np.linspace(0, 1, 50))
        rep = stats.ks_two_sample(a, a)
        assert rep.d == 0.0
        assert rep.p_value == pytest.approx(1.0)

    def test_shifted_uniforms_detected(self):
        u = kernel.fill_uniforms(3, 0, 10_000)
        v = kernel.fill_uniforms(3, 200, 10_000) + 0.5
        rep = stats.ks_two_sample(
            EmpiricalSample.from_values(u), EmpiricalSample.from_values(v)
        )
        assert rep.d >= 0.45
        assert rep.p_value < 1e-10

    def test_undersized_rejected(self):
        small = EmpiricalSample.from_values([1.0, 2.0, 3.0])
        big = EmpiricalSample.from_values(np.arange(100.0))
        with pytest.raises(ValueError):
            stats.ks_two_sample(small, big)

    @given(
        st.lists(st.integers(-5, 5), min_size=10, max_size=60),
        st.lists(st.integers(-5, 5), min_size=10, max_size=60),
    )
    @settings(max_examples=80, deadline=None)
    def test_matches_brute_force_with_ties(self, xs, ys):
        a = EmpiricalSample.from_values([float(v) for v in xs])
        b = EmpiricalSample.from_values([float(v) for v in ys])
        rep = stats.ks_two_sample(a, b)
        assert rep.d == pytest.approx(_brute_force_ks(a.values, b.values), abs=1e-12)

    @given(st.integers(0, 2**32))
    @settings(max_examples=20, deadline=None)
    def test_symmetric_and_monotone_invariant(self, seed):
        x = kernel.fill_uniforms(seed, 0, 300)
        y = kernel.fill_uniforms(seed, 100, 400)
        a = EmpiricalSample.from_values(x)
        b = EmpiricalSample.from_values(y)
        d1 = stats.ks_two_sample(a, b).d
        d2 = stats.ks_two_sample(b, a).d
        assert d1 == d2
        ta = EmpiricalSample.from_values(np.exp(x))
        tb = EmpiricalSample.from_values(np.exp(y))
        assert stats.ks_two_sample(ta, tb).d == pytest.approx(d1, abs=1e-12)

    @pytest.mark.slow
    @requires_compiled
    def test_level_calibration(self):
        # two same-law batches at n = 1e5: p > 0.001 in >= 99% of 1000 runs
        passed = 0
        reps = 1000
        for i in range(reps):
            x = kernel.fill_uniforms(1000 + i, 0, 100_000)
            y = kernel.fill_uniforms(1000 + i, 50_000, 100_000)
            rep = stats.ks_two_sample(
                EmpiricalSample.from_values(x), EmpiricalSample.from_values(y)
            )
            passed += rep.p_value > 1e-3
        assert passed >= 990


class TestKsOneSample:
    def test_correct_null_passes(self):
        z = np.abs(kernel.fill_normals(5, 0, 100_000))
        rep = stats.ks_one_sample(EmpiricalSample.from_values(z), laws.half_normal_cdf)
        assert rep.p_value > 1e-3

    def test_gross_misfit_fails(self):
        u = kernel.fill_uniforms(5, 0, 10_000)
        rep = stats.ks_one_sample(EmpiricalSample.from_values(u), laws.half_normal_cdf)
        assert rep.p_value < 1e-10

    def test_single_point_at_median(self):
        rep = stats.ks_one_sample(
            EmpiricalSample.from_values([0.5]), laws.uniform01_cdf
        )
        assert rep.d == pytest.approx(0.5)

    def test_nonfinite_cdf_rejected(self):
        with pytest.raises(ValueError):
            stats.ks_one_sample(
                EmpiricalSample.from_values([0.1, 0.2]), lambda v: np.full(len(v), np.nan)
            )

    def test_p_monotone_in_d(self):
        ps = [stats.KsReport(d=d, n_eff=1e4, p_value=0.0).d for d in (0.01, 0.02)]
        from scipy.special import kolmogorov

        p1 = kolmogorov(math.sqrt(1e4) * 0.01)
        p2 = kolmogorov(math.sqrt(1e4) * 0.02)
        assert p2 < p1


class TestMomentReport:
    def test_constant_sample(self):
        rep = stats.moment_report(EmpiricalSample.from_values([2.0] * 50), 3.0)
        assert rep.estimate == pytest.approx(8.0)
        assert rep.std_error == 0.0

    def test_half_normal_mean(self):
        z = np.abs(kernel.fill_normals(6, 0, 200_000))
        rep = stats.moment_report(
            EmpiricalSample.from_values(z), 1.0,
            target=math.sqrt(2.0 / math.pi), signed=True,
        )
        assert rep.within(3.0)

    def test_signed_flag(self):
        sample = EmpiricalSample.from_values([-2.0, 2.0])
        assert stats.moment_report(sample, 1.0, signed=True).estimate == 0.0
        assert stats.moment_report(sample, 1.0, signed=False).estimate == 2.0

    def test_pooled_merge_matches(self):
        x = kernel.fill_uniforms(7, 0, 4096)
        y = kernel.fill_uniforms(7, 64, 4096)
        a = EmpiricalSample.from_values(x)
        b = EmpiricalSample.from_values(y)
        merged = stats.merge_samples(a, b)
        pooled = stats.moment_report(merged, 2.0).estimate
        direct = 0.5 * (
            stats.moment_report(a, 2.0).estimate + stats.moment_report(b, 2.0).estimate
        )
        assert pooled == pytest.approx(direct, abs=1e-12)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            stats.moment_report(EmpiricalSample.from_values([1.0, np.inf]), 1.0)


class TestRichardson:
    def test_exact_linear_model(self):
        lim, c = 3.7, -2.0
        ladder = BiasLadder(dts=(1e-2, 5e-3), estimates=(lim + c * 1e-2, lim + c * 5e-3))
        res = stats.richardson(ladder, order_guess=1.0)
        assert res.extrapolated == pytest.approx(lim, abs=1e-12)

    def test_constant_estimates(self):
        ladder = BiasLadder(dts=(1e-2, 5e-3, 2.5e-3), estimates=(1.5, 1.5, 1.5))
        res = stats.richardson(ladder, order_guess=1.0)
        assert res.extrapolated == pytest.approx(1.5)

    def test_fitted_order_recovery(self):
        lim, c, q = 0.9, 0.4, 0.5
        dts = (4e-3, 1e-3, 2.5e-4)
        est = tuple(lim + c * dt**q for dt in dts)
        res = stats.richardson(BiasLadder(dts=dts, estimates=est), order_guess=1.0)
        assert res.fitted_order == pytest.approx(q, abs=1e-6)
        assert res.extrapolated == pytest.approx(lim, abs=1e-10)

    def test_degenerate_ladders_rejected(self):
        with pytest.raises(ValueError):
            BiasLadder(dts=(1e-2,), estimates=(1.0,))
            stats.richardson(BiasLadder(dts=(1e-2,), estimates=(1.0,)), 1.0)
        with pytest.raises(ValueError):
            BiasLadder(dts=(1e-2, 1e-2), estimates=(1.0, 1.1))
        with pytest.raises(ValueError):
            stats.richardson(BiasLadder(dts=(1e-2, 5e-3), estimates=(1.0,)), 1.0)

    @pytest.mark.slow
    @requires_compiled
    def test_hitting_bias_ladder_extrapolates_to_half_normal_mean(self):
        # without the crossing correction the mean of 1/sqrt(T) has an
        # O(sqrt(dt)) bias; extrapolation recovers the exact value
        dts = (4e-3, 1e-3, 2.5e-4)
        ests, ses = [], []
        for i, dt in enumerate(dts):
            scheme = pathkit.StepScheme(dt=dt, crossing_correction="none")
            b = pathkit.hit_time_batch(61 + i, (20 + i) << 33, 100_000, scheme, workers=2)
            vals = 1.0 / np.sqrt(b.t_hit)
            ests.append(float(vals.mean()))
            ses.append(float(vals.std() / math.sqrt(len(vals))))
        res = stats.richardson(
            BiasLadder(dts=dts, estimates=tuple(ests), std_errors=tuple(ses)),
            order_guess=0.5,
        )
        target = math.sqrt(2.0 / math.pi)
        assert abs(ests[0] - target) > 5.0 * ses[0]  # raw coarse value is biased
        assert abs(res.extrapolated - target) < 3.0 * res.std_error


class TestIndependenceCheck:
    def test_detects_dependence(self):
        x = kernel.fill_uniforms(8, 0, 20_000)
        prods = stats.rank_product_uniforms(x, x)
        rep = stats.ks_one_sample(EmpiricalSample.from_values(prods), laws.rank_product_cdf)
        assert rep.p_value < 1e-10

    def test_independent_pairs_pass(self):
        x = kernel.fill_uniforms(8, 0, 50_000)
        y = kernel.fill_normals(8, 0, 50_000)
        prods = stats.rank_product_uniforms(x, y)
        rep = stats.ks_one_sample(EmpiricalSample.from_values(prods), laws.rank_product_cdf)
        assert rep.p_value > 1e-3


class TestPolicy:
    def test_binomial_quantiles(self):
        assert stats.allowed_failures([1e-3] * 100) == 2
        assert stats.allowed_failures([]) == 0
        assert stats.allowed_failures([0.5] * 4, confidence=0.999) >= 3

    def test_poisson_binomial_mixture(self):
        allowed = stats.allowed_failures([1e-3] * 50 + [2.7e-3] * 50)
        assert 1 <= allowed <= 3
