"""Brownian paths and the pathwise functionals derived from them.

The hitting-time couplings used throughout:

* reflection: ``(M - W, M)`` has the law of ``(|B|, L)`` (reflected process
  and local time at 0), so the first time the running maximum of the driver
  reaches ``l`` is the inverse local time at ``l`` of the coupled process;
* maximum-to-Bessel: ``2M - W`` has the law of a three-dimensional Bessel
  process with future infimum ``M``, and its last passage at 1 is the
  driver's first hitting time of 1.

All production sampling is storage-free: one pass finds the hitting time,
a replay of the same increment stream evaluates the path at the sampled
interior time (see the kernel modules).  Materialized paths on a uniform
grid are available for inspection, view algebra and the occupation-density
local-time estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .rng import LANE_SIGNS, RandomStream, make_stream

__all__ = [
    "HorizonExhausted",
    "StepScheme",
    "HitRecord",
    "DiscretePath",
    "ReflectedView",
    "BesselView",
    "TripletSample",
    "SubordinatorPair",
    "PathSampleBatch",
    "make_stream",
    "simulate_until_max_hits",
    "simulate_fixed_horizon",
    "levy_view",
    "pitman_view",
    "sample_triplet_pseudo_bridge",
    "sample_triplet_hitting",
    "sample_triplet_bessel",
    "sample_functional_Hp",
    "sample_subordinator_pair",
    "direct_local_time",
    "triplet_batch",
    "hp_batch",
    "hp_values",
    "subordinator_batch",
    "fixed_slice_batch",
    "bessel3_last_passage_batch",
    "sample_gamma",
]

TRIPLET_KINDS = ("pseudo_bridge", "hitting", "bessel", "cor2")


class HorizonExhausted(RuntimeError):
    """The step budget ran out before the running maximum reached the level."""


@dataclass(frozen=True)
class StepScheme:
    """Discretization policy for path simulation.

    ``dt`` is the base time step, which always governs the resolution near
    the barrier and near the running maximum.  ``far_field_threshold`` (d0)
    enables geometric step coarsening when the path is far below both; set
    to ``None`` for a uniform grid.  ``crossing_correction='bridge'`` samples
    the exact within-step maximum, detecting sub-step level crossings with
    probability exp(-2 (a-x0)(a-x1) / dt).

    The step budget grows in geometric chunks: chunk k covers
    ``chunk_steps * 2**k`` steps, and after ``max_chunks`` chunks the
    simulation raises :class:`HorizonExhausted`.
    """

    dt: float = 1e-3
    max_chunks: int = 14
    crossing_correction: str = "bridge"
    far_field_threshold: float | None = 0.5
    chunk_steps: int = 16384

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("dt must be > 0")
        if self.max_chunks < 1:
            raise ValueError("max_chunks must be >= 1")
        if self.crossing_correction not in ("none", "bridge"):
            raise ValueError("crossing_correction must be 'none' or 'bridge'")
        if self.far_field_threshold is not None and self.far_field_threshold <= 0.0:
            raise ValueError("far_field_threshold must be positive or None")
        if self.chunk_steps < 1:
            raise ValueError("chunk_steps must be >= 1")

    @property
    def bridge(self) -> bool:
        return self.crossing_correction == "bridge"

    @property
    def d0(self) -> float:
        return 0.0 if self.far_field_threshold is None else self.far_field_threshold

    @property
    def max_steps(self) -> int:
        return self.chunk_steps * ((1 << self.max_chunks) - 1)


@dataclass
class HitRecord:
    level: float
    index: int
    t_hit: float


@dataclass
class DiscretePath:
    """A simulated path on a (uniform) grid, running maximum included.

    When the path ends in a hit, the terminal grid point is the crossing
    estimate itself: ``times[-1] = t_hit`` and ``w[-1] = m[-1] = level``.
    """

    times: np.ndarray
    w: np.ndarray
    m: np.ndarray
    dt: float
    hit: HitRecord | None = None

    def __len__(self) -> int:
        return len(self.times)


@dataclass
class ReflectedView:
    """Reflected process and local time read off a driver path."""

    times: np.ndarray
    abs_b: np.ndarray
    loc: np.ndarray
    signs: np.ndarray  # one fair sign per excursion of abs_b away from 0
    segment: np.ndarray  # excursion id per grid index (-1 at zeros)

    def signed_values(self) -> np.ndarray:
        out = self.abs_b.copy()
        mask = self.segment >= 0
        out[mask] *= self.signs[self.segment[mask]]
        return out


@dataclass
class BesselView:
    times: np.ndarray
    r: np.ndarray
    j: np.ndarray


@dataclass(frozen=True)
class TripletSample:
    x: float
    y: float
    z: float
    kind: str


@dataclass(frozen=True)
class SubordinatorPair:
    tau_l: float
    tau_1: float
    l: float


@dataclass
class PathSampleBatch:
    """Successful hitting paths evaluated at an independent uniform time.

    Raw per-path quantities; the triplets of every construction are simple
    algebraic reads of these (see :meth:`triplet`).
    """

    t_hit: np.ndarray
    w_at: np.ndarray
    m_at: np.ndarray
    u: np.ndarray
    sign: np.ndarray
    snap_t: np.ndarray
    n_requested: int
    n_failed: int
    level: float = 1.0

    @property
    def failure_rate(self) -> float:
        return self.n_failed / self.n_requested if self.n_requested else 0.0

    def triplet(self, kind: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = 1.0 / np.sqrt(self.t_hit)
        if kind == "pseudo_bridge":
            x = self.sign * (self.m_at - self.w_at) * y
            return x, y, self.m_at
        if kind == "hitting":
            return self.w_at * y, y, self.m_at
        if kind == "bessel":
            return (2.0 * self.m_at - self.w_at) * y, y, self.m_at
        if kind == "cor2":
            a = self.m_at - self.w_at
            return a, self.m_at, (1.0 + 2.0 * a) * y
        raise ValueError(f"unknown triplet kind {kind!r}")


def simulate_until_max_hits(stream: RandomStream, scheme: StepScheme, level: float) -> DiscretePath:
    """Simulate W on a uniform grid until its running maximum reaches ``level``.

    Grows in geometric chunks per the scheme and raises
    :class:`HorizonExhausted` when the budget runs out.
    """
    if level <= 0.0:
        raise ValueError("level must be > 0")
    state = kernel.path_state_init(stream.master_seed, stream.stream_index)
    pieces_w: list[np.ndarray] = []
    pieces_m: list[np.ndarray] = []
    pieces_t: list[np.ndarray] = []
    for k in range(scheme.max_chunks):
        size = scheme.chunk_steps << k
        cw = np.empty(size)
        cm = np.empty(size)
        ct = np.empty(size)
        filled, hit, t_hit = kernel.fill_path_chunk(state, scheme.dt, level, scheme.bridge, cw, cm, ct)
        pieces_w.append(cw[:filled])
        pieces_m.append(cm[:filled])
        pieces_t.append(ct[:filled])
        if hit:
            return _assemble_path(pieces_t, pieces_w, pieces_m, scheme.dt, level, t_hit)
    raise HorizonExhausted(
        f"no hit of level {level} within {scheme.max_steps} steps (dt={scheme.dt})"
    )


def simulate_fixed_horizon(stream: RandomStream, scheme: StepScheme, t_end: float) -> DiscretePath:
    """Simulate W on a uniform grid up to the fixed time ``t_end`` (no hit)."""
    if t_end <= 0.0:
        raise ValueError("t_end must be > 0")
    n = int(round(t_end / scheme.dt))
    state = kernel.path_state_init(stream.master_seed, stream.stream_index)
    w = np.empty(n)
    m = np.empty(n)
    t = np.empty(n)
    filled, hit, _ = kernel.fill_path_chunk(state, scheme.dt, math.inf, scheme.bridge, w, m, t)
    assert filled == n and not hit
    times = np.concatenate(([0.0], t))
    return DiscretePath(times=times, w=np.concatenate(([0.0], w)), m=np.concatenate(([0.0], m)), dt=scheme.dt)


def _assemble_path(pieces_t, pieces_w, pieces_m, dt, level, t_hit) -> DiscretePath:
    t = np.concatenate([[0.0], *pieces_t, [t_hit]])
    w = np.concatenate([[0.0], *pieces_w, [level]])
    m = np.concatenate([[0.0], *pieces_m, [level]])
    hit = HitRecord(level=level, index=len(t) - 1, t_hit=t_hit)
    return DiscretePath(times=t, w=w, m=m, dt=dt, hit=hit)


def levy_view(path: DiscretePath, stream: RandomStream) -> ReflectedView:
    """Reflected process |B| = M - W and local time L = M, with excursion signs.

    A maximal run of grid indices with ``abs_b > 0`` is one excursion; each
    carries one independent fair sign drawn from ``stream``.
    """
    if len(path) == 0:
        raise ValueError("empty path")
    abs_b = path.m - path.w
    loc = path.m.copy()
    zero = abs_b <= 0.0
    starts = ~zero & np.concatenate(([True], zero[:-1]))
    segment = np.cumsum(starts) - 1
    segment[zero] = -1
    n_exc = int(starts.sum())
    signs = kernel.fill_signs(stream.master_seed, stream.stream_index, n_exc)
    return ReflectedView(times=path.times, abs_b=abs_b, loc=loc, signs=signs, segment=segment)


def pitman_view(path: DiscretePath) -> BesselView:
    """Bessel(3) representation R = 2M - W with future infimum J = M."""
    if len(path) == 0:
        raise ValueError("empty path")
    return BesselView(times=path.times, r=2.0 * path.m - path.w, j=path.m.copy())


def direct_local_time(view: ReflectedView, epsilon: float) -> np.ndarray:
    """Occupation-density estimate of local time along a signed path.

    ``(1/2*eps) * meas{s <= t : |B_s| < eps}`` with right-endpoint step
    weights.  Valid regime requires ``dt << eps**2``.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    dts = np.diff(view.times, prepend=0.0)
    if dts.max() >= epsilon * epsilon:
        warnings.warn(
            "occupation estimator outside its regime: dt >= epsilon**2",
            RuntimeWarning,
            stacklevel=2,
        )
    signed = view.signed_values()
    inside = np.abs(signed) < epsilon
    return np.cumsum(dts * inside) / (2.0 * epsilon)


def triplet_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    scheme: StepScheme,
    *,
    level: float = 1.0,
    snap_level: float = 0.0,
    workers: int = 1,
) -> PathSampleBatch:
    """Simulate ``n`` hitting paths with interior-time evaluation.

    Horizon-exhausted paths are dropped and counted; path ``i`` always owns
    stream ``stream_base + i``, so the result is worker-count independent.
    """
    raw = kernel.run_path_batch(
        master_seed, stream_base, n,
        dt=scheme.dt, d0=scheme.d0, level=level, bridge=scheme.bridge,
        max_steps=scheme.max_steps, mode=kernel.MODE_TRIPLET,
        snap_level=snap_level, workers=workers,
    )
    ok = raw["status"] == kernel.STATUS_OK
    return PathSampleBatch(
        t_hit=raw["t_hit"][ok],
        w_at=raw["w_at"][ok],
        m_at=raw["m_at"][ok],
        u=raw["u"][ok],
        sign=raw["sign"][ok],
        snap_t=raw["snap_t"][ok],
        n_requested=n,
        n_failed=int(n - ok.sum()),
        level=level,
    )


def hit_time_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    scheme: StepScheme,
    *,
    level: float = 1.0,
    snap_level: float = 0.0,
    workers: int = 1,
) -> PathSampleBatch:
    """Hitting times only (no interior evaluation pass)."""
    raw = kernel.run_path_batch(
        master_seed, stream_base, n,
        dt=scheme.dt, d0=scheme.d0, level=level, bridge=scheme.bridge,
        max_steps=scheme.max_steps, mode=kernel.MODE_THIT,
        snap_level=snap_level, workers=workers,
    )
    ok = raw["status"] == kernel.STATUS_OK
    return PathSampleBatch(
        t_hit=raw["t_hit"][ok],
        w_at=raw["w_at"][ok],
        m_at=raw["m_at"][ok],
        u=raw["u"][ok],
        sign=raw["sign"][ok],
        snap_t=raw["snap_t"][ok],
        n_requested=n,
        n_failed=int(n - ok.sum()),
        level=level,
    )


def _single_triplet(stream: RandomStream, scheme: StepScheme, kind: str) -> TripletSample:
    batch = triplet_batch(stream.master_seed, stream.stream_index, 1, scheme)
    if batch.n_failed:
        raise HorizonExhausted(
            f"no hit within {scheme.max_steps} steps (dt={scheme.dt})"
        )
    x, y, z = batch.triplet(kind)
    return TripletSample(x=float(x[0]), y=float(y[0]), z=float(z[0]), kind=kind)


def sample_triplet_pseudo_bridge(stream: RandomStream, scheme: StepScheme) -> TripletSample:
    """One draw of (B_{U tau1}/sqrt(tau1), 1/sqrt(tau1), L_{U tau1})."""
    return _single_triplet(stream, scheme, "pseudo_bridge")


def sample_triplet_hitting(stream: RandomStream, scheme: StepScheme) -> TripletSample:
    """One draw of (B_{U T1}/sqrt(T1), 1/sqrt(T1), M_{U T1})."""
    return _single_triplet(stream, scheme, "hitting")


def sample_triplet_bessel(stream: RandomStream, scheme: StepScheme) -> TripletSample:
    """One draw of (R_{U gamma}/sqrt(gamma), 1/sqrt(gamma), J_{U gamma})."""
    return _single_triplet(stream, scheme, "bessel")


def hp_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    scheme: StepScheme,
    *,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Raw path integrals for the centered-functional family, p = 1..3."""
    return kernel.run_hp_batch(
        master_seed, stream_base, n,
        dt=scheme.dt, d0=scheme.d0, level=1.0, bridge=scheme.bridge,
        max_steps=scheme.max_steps, workers=workers,
    )


def hp_values(raw: dict[str, np.ndarray], p: int, variant: str) -> np.ndarray:
    """Assemble H_p (or the inverse-local-time variant) from raw integrals.

    H_p uses the driver pair (B, M); the primed variant reads (L, |B|) off
    the reflection coupling, i.e. (M, M - W), up to the same terminal time.
    """
    if p not in (1, 2, 3):
        raise ValueError("p must be 1, 2 or 3")
    if variant not in ("H", "Hprime"):
        raise ValueError("variant must be 'H' or 'Hprime'")
    ok = raw["status"] == kernel.STATUS_OK
    t = raw["t_hit"][ok]
    i_p = raw[f"i{p}"][ok]
    coef = (p + 1) / (2.0 * p * p)
    norm = t ** (0.5 * p + 1.0)
    if variant == "H":
        return ((coef - 1.0) * i_p + raw[f"j{p}"][ok]) / norm
    return (coef * i_p - raw[f"k{p}"][ok]) / norm


def sample_functional_Hp(
    stream: RandomStream, scheme: StepScheme, p: int, variant: str = "H"
) -> float:
    """One draw of the normalized centered path functional of order ``p``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    raw = hp_batch(stream.master_seed, stream.stream_index, 1, scheme)
    if raw["status"][0] != kernel.STATUS_OK:
        raise HorizonExhausted(
            f"no hit within {scheme.max_steps} steps (dt={scheme.dt})"
        )
    return float(hp_values(raw, p, variant)[0])


def sample_subordinator_pair(stream: RandomStream, l: float) -> SubordinatorPair:
    """Exact draw of (tau_l, tau_1) for the stable-1/2 subordinator.

    Uses independent increments: tau_l = l^2/N^2 and
    tau_1 - tau_l = (1-l)^2/N'^2 (no discretization).
    """
    if not 0.0 < l < 1.0:
        raise ValueError("l must be in (0, 1)")
    n1 = stream.normal()
    while n1 == 0.0:
        n1 = stream.normal()
    n2 = stream.normal()
    while n2 == 0.0:
        n2 = stream.normal()
    tau_l = (l / n1) ** 2
    tau_1 = tau_l + ((1.0 - l) / n2) ** 2
    return SubordinatorPair(tau_l=tau_l, tau_1=tau_1, l=l)


def subordinator_batch(
    master_seed: int, stream_base: int, n: int, l: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized exact (tau_l, tau_1) draws."""
    if not 0.0 < l < 1.0:
        raise ValueError("l must be in (0, 1)")
    z = kernel.fill_normals(master_seed, stream_base, 2 * n)
    n1 = z[:n]
    n2 = z[n:]
    with np.errstate(divide="ignore"):
        tau_l = (l / n1) ** 2
        tau_1 = tau_l + ((1.0 - l) / n2) ** 2
    return tau_l, tau_1


def fixed_slice_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    scheme: StepScheme,
    t_end: float,
    *,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """(W_t, M_t) at the fixed time ``t_end`` for ``n`` independent paths."""
    return kernel.run_slice_batch(
        master_seed, stream_base, n,
        dt=scheme.dt, d0=scheme.d0, bridge=scheme.bridge, t_end=t_end,
        workers=workers,
    )


def bessel3_last_passage_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    *,
    dt: float,
    horizon: float,
    bridge: bool = True,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Direct |3D BM| simulation of the last passage at 1 (cross-check).

    Returns (gamma, r_at, u) for paths whose last passage happened within
    the horizon.  Truncation misses late returns with probability about
    sqrt(2/(pi*horizon)), biasing gamma low; use loose tolerances.
    """
    raw = kernel.run_bes3_batch(
        master_seed, stream_base, n, dt=dt, bridge=bridge, horizon=horizon,
        workers=workers,
    )
    ok = raw["status"] == kernel.STATUS_OK
    return {
        "gamma": raw["gamma"][ok],
        "r_at": raw["r_at"][ok],
        "u": raw["u"][ok],
        "n_requested": n,
        "n_failed": int(n - ok.sum()),
    }


def sample_gamma(stream: RandomStream, shape: float) -> float:
    """Gamma(shape, 1) draw (squeeze-free Marsaglia-Tsang with boost)."""
    if shape <= 0.0:
        raise ValueError("shape must be > 0")
    if shape < 1.0:
        u = stream.uniform()
        while u == 0.0:
            u = stream.uniform()
        return sample_gamma(stream, shape + 1.0) * u ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = stream.normal()
        v = (1.0 + c * x) ** 3
        if v <= 0.0:
            continue
        u = stream.uniform()
        if u < 1.0 - 0.0331 * x**4:
            return d * v
        if u > 0.0 and math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v
