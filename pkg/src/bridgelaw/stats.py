"""Empirical-distribution machinery turning identities in law into verdicts.

Kolmogorov-Smirnov statistics are computed exactly (merged sorted walk for
two samples, one-sided gaps at sample points against an analytic CDF);
p-values use the asymptotic Kolmogorov distribution with the effective
sample size n*m/(n+m), which is accurate at the n >= 1e4 scales used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogorov

__all__ = [
    "EmpiricalSample",
    "KsReport",
    "MomentReport",
    "BiasLadder",
    "RichardsonResult",
    "ks_two_sample",
    "ks_one_sample",
    "moment_report",
    "merge_samples",
    "richardson",
    "rank_product_uniforms",
    "allowed_failures",
]


@dataclass
class EmpiricalSample:
    """A sorted batch of scalar draws with provenance."""

    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, values, provenance: dict | None = None) -> "EmpiricalSample":
        arr = np.sort(np.asarray(values, dtype=float))
        return cls(values=arr, provenance=provenance or {})

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class KsReport:
    d: float
    n_eff: float
    p_value: float
    threshold: float = 1e-3

    @property
    def passed(self) -> bool:
        return self.p_value > self.threshold


@dataclass(frozen=True)
class MomentReport:
    order: float
    estimate: float
    std_error: float
    target: float | None = None
    z_score: float | None = None

    def within(self, n_se: float = 3.0) -> bool:
        return self.z_score is not None and abs(self.z_score) < n_se


@dataclass(frozen=True)
class BiasLadder:
    """Per-step-size estimates of one statistic, for extrapolation."""

    dts: tuple[float, ...]
    estimates: tuple[float, ...]
    std_errors: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.dts) != len(self.estimates):
            raise ValueError("dts and estimates must have equal length")
        if len(self.dts) >= 2 and any(
            self.dts[i + 1] >= self.dts[i] for i in range(len(self.dts) - 1)
        ):
            raise ValueError("dts must be strictly decreasing")


@dataclass(frozen=True)
class RichardsonResult:
    extrapolated: float
    fitted_order: float | None = None
    std_error: float | None = None


def _ks_p(d: float, n_eff: float) -> float:
    return float(kolmogorov(math.sqrt(n_eff) * d))


def ks_two_sample(a: EmpiricalSample, b: EmpiricalSample, threshold: float = 1e-3) -> KsReport:
    """Exact two-sample KS statistic.

    Walks the merged sorted samples (vectorized as right-continuous ECDF
    evaluations at every jump point), so ties are handled exactly.
    """
    n, m = a.n, b.n
    if n < 10 or m < 10:
        raise ValueError("samples must have at least 10 values each")
    x, y = a.values, b.values
    data = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, data, side="right") / n
    cdf_y = np.searchsorted(y, data, side="right") / m
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    n_eff = n * m / (n + m)
    return KsReport(d=d, n_eff=n_eff, p_value=_ks_p(d, n_eff), threshold=threshold)


def ks_one_sample(a: EmpiricalSample, cdf, threshold: float = 1e-3) -> KsReport:
    """Sup-norm distance of the empirical CDF against an analytic CDF.

    ``cdf`` may be a vectorized callable or an object with ``cdf_values``.
    """
    n = a.n
    if n < 1:
        raise ValueError("empty sample")
    if hasattr(cdf, "cdf_values"):
        f = np.asarray(cdf.cdf_values(a.values), dtype=float)
    else:
        f = np.asarray(cdf(a.values), dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValueError("cdf evaluation produced non-finite values")
    i = np.arange(1, n + 1)
    d_plus = float(np.max(i / n - f))
    d_minus = float(np.max(f - (i - 1) / n))
    d = max(d_plus, d_minus)
    return KsReport(d=d, n_eff=float(n), p_value=_ks_p(d, n), threshold=threshold)


def moment_report(
    a: EmpiricalSample,
    order: float,
    target: float | None = None,
    signed: bool = False,
) -> MomentReport:
    """Sample moment of |X|^order (or the signed moment) with its SE."""
    if order < 0:
        raise ValueError("order must be >= 0")
    v = a.values
    if not np.all(np.isfinite(v)):
        raise ValueError("sample contains non-finite values")
    if signed:
        powed = np.sign(v) * np.abs(v) ** order
    else:
        powed = np.abs(v) ** order
    est = float(np.mean(powed))
    se = float(np.std(powed, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    z = None
    if target is not None:
        z = (est - target) / se if se > 0.0 else (0.0 if est == target else math.inf)
    return MomentReport(order=order, estimate=est, std_error=se, target=target, z_score=z)


def merge_samples(a: EmpiricalSample, b: EmpiricalSample) -> EmpiricalSample:
    """Order-independent pooling of two samples."""
    values = np.sort(np.concatenate([a.values, b.values]))
    return EmpiricalSample(values=values, provenance={"merged": [a.provenance, b.provenance]})


def richardson(ladder: BiasLadder, order_guess: float) -> RichardsonResult:
    """Extrapolate estimate(dt) = limit + C * dt^q to dt -> 0.

    With two rungs, q = order_guess is used as given; with three or more,
    q is fitted from the three most refined rungs (falling back to the
    guess when the rung differences do not support a fit).
    """
    dts = np.asarray(ladder.dts, dtype=float)
    est = np.asarray(ladder.estimates, dtype=float)
    if len(dts) < 2:
        raise ValueError("ladder needs at least 2 rungs")
    if np.any(dts <= 0.0) or len(np.unique(dts)) != len(dts):
        raise ValueError("degenerate ladder")
    fitted: float | None = None
    q = order_guess
    if len(dts) >= 3:
        e0, e1, e2 = est[-3], est[-2], est[-1]
        h0, h1, h2 = dts[-3], dts[-2], dts[-1]
        num = e0 - e1
        den = e1 - e2
        if den != 0.0 and num / den > 0.0:
            # assume a geometric-ish ladder; solve (h0^q-h1^q)/(h1^q-h2^q)=ratio
            ratio = num / den
            lo_q, hi_q = 1e-3, 8.0

            def g(qq: float) -> float:
                return (h0**qq - h1**qq) / (h1**qq - h2**qq) - ratio

            glo, ghi = g(lo_q), g(hi_q)
            if glo * ghi < 0.0:
                for _ in range(200):
                    mid = 0.5 * (lo_q + hi_q)
                    gm = g(mid)
                    if glo * gm <= 0.0:
                        hi_q = mid
                    else:
                        lo_q, glo = mid, gm
                fitted = 0.5 * (lo_q + hi_q)
                q = fitted
    h1, h2 = dts[-2], dts[-1]
    e1, e2 = est[-2], est[-1]
    r = (h1 / h2) ** q
    extrapolated = (r * e2 - e1) / (r - 1.0)
    se = None
    if ladder.std_errors:
        s1, s2 = ladder.std_errors[-2], ladder.std_errors[-1]
        se = math.sqrt((r * s2) ** 2 + s1**2) / (r - 1.0)
    return RichardsonResult(extrapolated=extrapolated, fitted_order=fitted, std_error=se)


def rank_product_uniforms(x, y) -> np.ndarray:
    """Rank-transform two coordinates and return products of their ranks.

    Under independence the products are asymptotically distributed as the
    product of two independent uniforms, giving a simple KS-testable
    independence check.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    rx = np.empty(n)
    ry = np.empty(n)
    rx[np.argsort(x, kind="stable")] = np.arange(1, n + 1)
    ry[np.argsort(y, kind="stable")] = np.arange(1, n + 1)
    return (rx / (n + 1.0)) * (ry / (n + 1.0))


def allowed_failures(levels, confidence: float = 0.999) -> int:
    """Quantile of the number of false failures under true nulls.

    ``levels`` holds the per-check test levels; the count of failures is
    Poisson-binomial, computed exactly by convolution.
    """
    probs = list(levels)
    dist = np.array([1.0])
    for p in probs:
        dist = np.convolve(dist, [1.0 - p, p])
    cum = np.cumsum(dist)
    return int(np.searchsorted(cum, confidence))
