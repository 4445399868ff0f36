"""Acceptance suite: one test per criterion, full stated scales.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them
live).  Heavy runs are shared through module fixtures.  Wall-clock bounds
are stated for 4 cores and scaled by the available core count.
"""

import math
import os
import time

import numpy as np
import pytest

from bridgelaw import cli, experiments, kernel, laws, pathkit, stats

from conftest import WORKERS

pytestmark = [
    pytest.mark.acceptance,
    pytest.mark.skipif(
        kernel.backend_name() != "compiled",
        reason="acceptance runtimes require the compiled kernel",
    ),
]

SEED = 1
FULL = "full"
FULL_PATHS = experiments.BUDGETS[FULL].paths
FULL_DT = experiments.BUDGETS[FULL].dt
EXACT_N = experiments.BUDGETS[FULL].exact_n
CORES = os.cpu_count() or 1
TIME_SCALE = max(1.0, 4.0 / CORES)


def _announce(num: int, label: str, ok: bool, detail: str = "") -> None:
    print(f"\nACCEPTANCE {num} ({label}): {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num} ({label}) failed {detail}"


def _run_full(name: str, **overrides) -> experiments.ExperimentReport:
    spec = experiments.ExperimentSpec.for_budget(name, FULL, SEED)
    for key, value in overrides.items():
        setattr(spec, key, value)
    return experiments.run(spec, workers=WORKERS)


def _check(report, cid: str):
    return next(c for c in report.checks if c.id == cid)


@pytest.fixture(scope="module")
def theorem1_timed():
    start = time.perf_counter()
    report = _run_full("verify_theorem1")
    return report, time.perf_counter() - start


@pytest.fixture(scope="module")
def hitting_ladder():
    """Hitting-triplet batches at dt = 4e-4 and 1e-4 for extrapolation."""
    out = {}
    for dt in (4e-4, 1e-4):
        scheme = pathkit.StepScheme(dt=dt)
        out[dt] = pathkit.triplet_batch(
            SEED, experiments.stream_block("acceptance_alpha", f"dt{dt:g}"),
            FULL_PATHS, scheme, workers=WORKERS,
        )
    return out


@pytest.fixture(scope="module")
def descB_report():
    return _run_full("verify_descB")


@pytest.fixture(scope="module")
def centered_report():
    return _run_full("verify_centered", paths=100_000)


@pytest.fixture(scope="module")
def bessel_report():
    return _run_full("verify_bessel_ratio")


@pytest.fixture(scope="module")
def appendixB_report():
    return _run_full("verify_appendixB")


def test_criterion_1_theorem1_exact_vs_simulated(theorem1_timed):
    report, elapsed = theorem1_timed
    ks_ids = [
        "x_marginal_vs_exact", "y_marginal_vs_exact", "z_marginal_vs_exact",
        "proj_x_plus_z", "proj_x_times_y", "proj_y_times_z", "z_vs_uniform_cdf",
    ]
    ks_ok = all(_check(report, cid).passed for cid in ks_ids)
    budget = 180.0 * TIME_SCALE
    time_ok = elapsed < budget
    detail = (
        f"[{FULL_PATHS} paths, dt={FULL_DT}, {len(ks_ids)} KS checks, "
        f"{elapsed:.0f}s < {budget:.0f}s on {CORES} cores]"
    )
    _announce(1, "pseudo-bridge triplet law", ks_ok and time_ok and report.overall == "pass", detail)


def test_criterion_2_alpha_moments(hitting_ladder):
    ref = laws.sample_reference_batch(
        "cor1_hitting_rhs", SEED, experiments.stream_block("acceptance_alpha", "exact"), EXACT_N
    )
    alpha = ref[:, 0]
    m1 = stats.moment_report(stats.EmpiricalSample.from_values(alpha), 1.0,
                             target=0.0, signed=True)
    m2 = stats.moment_report(stats.EmpiricalSample.from_values(alpha), 2.0,
                             target=1.0 / 3.0)
    exact_ok = m1.within(3.0) and m2.within(3.0)

    dts, means, mean_ses, secs, sec_ses = [], [], [], [], []
    for dt, batch in sorted(hitting_ladder.items(), reverse=True):
        x = batch.triplet("hitting")[0]
        dts.append(dt)
        means.append(float(x.mean()))
        mean_ses.append(float(x.std() / math.sqrt(len(x))))
        secs.append(float((x**2).mean()))
        sec_ses.append(float((x**2).std() / math.sqrt(len(x))))
    # finest raw rung within the loose 5% band
    raw_ok = abs(secs[-1] - 1.0 / 3.0) < 0.05 / 3.0 and abs(means[-1]) < 0.05 * math.sqrt(1.0 / 3.0)
    r_mean = stats.richardson(
        stats.BiasLadder(dts=tuple(dts), estimates=tuple(means), std_errors=tuple(mean_ses)),
        order_guess=1.0,
    )
    r_sec = stats.richardson(
        stats.BiasLadder(dts=tuple(dts), estimates=tuple(secs), std_errors=tuple(sec_ses)),
        order_guess=1.0,
    )
    extrap_ok = (
        abs(r_mean.extrapolated - 0.0) < 3.0 * r_mean.std_error
        and abs(r_sec.extrapolated - 1.0 / 3.0) < 3.0 * r_sec.std_error
    )
    detail = (
        f"[exact z=({m1.z_score:+.2f},{m2.z_score:+.2f}); raw E2={secs[-1]:.5f}; "
        f"extrap E2={r_sec.extrapolated:.5f}]"
    )
    _announce(2, "moments of the uniform-time ratio", exact_ok and raw_ok and extrap_ok, detail)


def test_criterion_3_sign_mass(hitting_ladder):
    target = 1.0 - 0.5 * laws.LOG3
    ref = laws.sample_reference_batch(
        "cor1_hitting_rhs", SEED, experiments.stream_block("acceptance_sign", "exact"), EXACT_N
    )
    p_hat = float((ref[:, 0] > 0).mean())
    se = math.sqrt(target * (1.0 - target) / EXACT_N)
    exact_ok = abs(p_hat - target) < 3.0 * se

    dts, props, ses = [], [], []
    for dt, batch in sorted(hitting_ladder.items(), reverse=True):
        x = batch.triplet("hitting")[0]
        dts.append(dt)
        props.append(float((x > 0).mean()))
        ses.append(math.sqrt(target * (1.0 - target) / len(x)))
    res = stats.richardson(
        stats.BiasLadder(dts=tuple(dts), estimates=tuple(props), std_errors=tuple(ses)),
        order_guess=1.0,
    )
    sim_ok = abs(res.extrapolated - target) < 3.0 * res.std_error
    detail = f"[exact {p_hat:.6f} vs {target:.6f}; sim extrap {res.extrapolated:.6f}]"
    _announce(3, "positive-value mass", exact_ok and sim_ok, detail)


def test_criterion_4_mellin_grid():
    pair = laws.sample_reference_batch(
        "fixed_time_factorization", SEED,
        experiments.stream_block("acceptance_mellin", "draws"), EXACT_N,
    )
    abs_b, loc = pair[:, 0], pair[:, 1]
    worst = 0.0
    ok = True
    for a in (0.5, 1.0, 2.0):
        for c in (0.5, 1.0, 2.0):
            vals = abs_b**a * loc**c
            rep = stats.moment_report(
                stats.EmpiricalSample.from_values(vals), 1.0,
                target=laws.mellin_abs_b1_l1(a, c), signed=True,
            )
            worst = max(worst, abs(rep.z_score))
            ok = ok and rep.within(3.0)
    _announce(4, "mixed-moment grid", ok, f"[max |z| = {worst:.2f} over 9 pairs]")


def test_criterion_5_joint_hitting_law(descB_report):
    rep = descB_report
    quad_ok = (
        _check(rep, "k_normalization").passed
        and _check(rep, "k_negative_mass").passed
        and abs(_check(rep, "k_normalization").statistic - 1.0) <= 1e-9
        and abs(_check(rep, "k_negative_mass").statistic - 0.5 * laws.LOG3) <= 1e-9
    )
    marg = _check(rep, "h_marginalizes_to_k")
    marg_ok = marg.passed and marg.statistic <= 1e-6
    ks_ok = _check(rep, "y_marginal_vs_exact").passed and _check(rep, "b_marginal_vs_exact").passed
    detail = f"[marginalization max err {marg.statistic:.2e}; overall {rep.overall}]"
    _announce(5, "joint law of (1/sqrt(T1), B_UT1)", quad_ok and marg_ok and ks_ok, detail)


def test_criterion_6_centered_functionals(centered_report):
    rep = centered_report
    sim_ids = [f"sim_{v}_p{p}_mean" for v in ("H", "Hprime") for p in (1, 2, 3)]
    exact_ids = [f"exact_reduced_p{p}_mean" for p in (1, 2, 3)]
    ok = all(_check(rep, cid).passed for cid in sim_ids + exact_ids)
    worst = max(
        abs(_check(rep, cid).statistic) / (_check(rep, cid).tolerance / 3.0)
        for cid in sim_ids + exact_ids
    )
    _announce(6, "centered path functionals", ok, f"[max |z| = {worst:.2f} over 9 checks]")


def test_criterion_7_subordinator_identity_grid():
    start = time.perf_counter()
    ok = True
    worst = 0.0
    for l in (0.25, 0.5, 0.75):
        tau_l, tau_1 = pathkit.subordinator_batch(
            SEED, experiments.stream_block("acceptance_appA", f"l{l:g}"), EXACT_N, l
        )
        for lam in (0.5, 1.0, 2.0):
            vals = (tau_l / tau_1) * np.exp(-lam * tau_1)
            rep = stats.moment_report(
                stats.EmpiricalSample.from_values(vals), 1.0,
                target=l * math.exp(-math.sqrt(2.0 * lam)), signed=True,
            )
            worst = max(worst, abs(rep.z_score))
            ok = ok and rep.within(3.0)
    elapsed = time.perf_counter() - start
    budget = 10.0 * TIME_SCALE
    detail = f"[max |z| = {worst:.2f} over 9 cells, {elapsed:.1f}s < {budget:.0f}s]"
    _announce(7, "inverse-local-time Laplace identity", ok and elapsed < budget, detail)


def test_criterion_8_bessel_ratio_law(bessel_report):
    rep = bessel_report
    ok = (
        abs(_check(rep, "l_normalization").statistic - 1.0) <= 1e-9
        and abs(_check(rep, "r_gamma_normalization").statistic - 1.0) <= 1e-6
        and _check(rep, "sim_ratio_vs_r_gamma_pdf").passed
    )
    detail = f"[KS p = {_check(rep, 'sim_ratio_vs_r_gamma_pdf').p_value:.4f}]"
    _announce(8, "last-passage ratio law", ok and rep.overall == "pass", detail)


def test_criterion_9_one_parameter_family(appendixB_report):
    rep = appendixB_report
    ok = rep.overall == "pass"
    for c in (0.25, 0.5, 1.0):
        ok = ok and _check(rep, f"a_vs_assembled_density_c{c:g}").passed
        ok = ok and _check(rep, f"positive_mass_c{c:g}").passed
    ok = ok and _check(rep, "c_half_reduces_to_base_constant").passed
    _announce(9, "one-parameter family", ok, f"[{rep.stat_failures} stat failures]")


def test_criterion_10_worker_determinism(tmp_path):
    bodies = []
    for workers in (1, 4, 8):
        start = time.perf_counter()
        reports = experiments.run_all(7, budget="quick", workers=workers)
        verdict = experiments.global_verdict(reports)
        body = {
            "budget": "quick",
            "seed": 7,
            "reports": [r.to_body() for r in reports],
            "global": verdict,
        }
        bodies.append(cli.report_body_bytes(body))
    ok = bodies[0] == bodies[1] == bodies[2]
    _announce(10, "worker-count determinism", ok,
              f"[{len(bodies[0])} canonical bytes x 3 worker counts]")


def test_criterion_11_global_statistical_policy():
    all_reports = []
    for seed in (1, 2, 3):
        all_reports.extend(experiments.run_all(seed, budget="quick", workers=WORKERS))
    verdict = experiments.global_verdict(all_reports)
    ok = (
        verdict["overall"] == "pass"
        and verdict["stat_failures"] <= verdict["allowed_stat_failures"]
        and verdict["hard_checks_pass"]
    )
    detail = (
        f"[{verdict['stat_failures']} failures <= {verdict['allowed_stat_failures']} allowed "
        f"across {verdict['n_stat_checks']} checks, 3 seeds]"
    )
    _announce(11, "suite-wide failure budget", ok, detail)
