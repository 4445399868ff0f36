"""Backend selection and batch drivers for the simulation kernels.

The compiled extension is preferred; the pure-Python twin is selected when
the extension is missing or when ``BRIDGELAW_FORCE_PYTHON`` is set.  Both
produce bit-identical output, so everything downstream (including the
worker-count determinism contract) is backend-independent.

Batch functions split path ranges across a thread pool.  The compiled
kernels release the GIL, so threads give real parallelism; results are
written into per-path slots keyed by the global path index, which makes the
output independent of the number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .rng import LANE_NORMALS, LANE_SIGNS, LANE_UNIFORMS

if os.environ.get("BRIDGELAW_FORCE_PYTHON"):
    from . import _kernel_py as _impl
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

MODE_THIT = 0
MODE_TRIPLET = 1
STATUS_OK = 0
STATUS_EXHAUSTED = 1
STATUS_NO_CROSSING = 2

_MASK = (1 << 64) - 1

# Bulk fills consume one derived stream per block of this many draws, so a
# batch of draws is reproducible regardless of how it is later chunked.
FILL_BLOCK = 1 << 16


def backend_name() -> str:
    return _impl.BACKEND


def _norm_seed(seed: int) -> int:
    return seed & _MASK


def _split(lo: int, hi: int, workers: int) -> list[tuple[int, int]]:
    n = hi - lo
    if workers <= 1 or n < 2048:
        return [(lo, hi)]
    chunks = min(workers * 4, max(1, n // 512))
    bounds = np.linspace(lo, hi, chunks + 1).astype(np.int64)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(chunks) if bounds[i] < bounds[i + 1]]


def _run_parallel(fn, lo: int, hi: int, workers: int) -> None:
    parts = _split(lo, hi, workers)
    if len(parts) == 1:
        fn(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, a, b) for a, b in parts]
        for f in futures:
            f.result()


def fill_uniforms(master_seed: int, stream_base: int, n: int, lane: int = LANE_UNIFORMS) -> np.ndarray:
    """n uniforms in [0,1), blocked over streams ``stream_base + j``."""
    out = np.empty(n, dtype=np.float64)
    master = _norm_seed(master_seed)
    for j, lo in enumerate(range(0, n, FILL_BLOCK)):
        hi = min(lo + FILL_BLOCK, n)
        _impl.fill_uniforms(master, (stream_base + j) & _MASK, lane, out[lo:hi])
    return out


def fill_normals(master_seed: int, stream_base: int, n: int, lane: int = LANE_NORMALS) -> np.ndarray:
    """n standard normals, blocked over streams ``stream_base + j``."""
    out = np.empty(n, dtype=np.float64)
    master = _norm_seed(master_seed)
    for j, lo in enumerate(range(0, n, FILL_BLOCK)):
        hi = min(lo + FILL_BLOCK, n)
        _impl.fill_normals(master, (stream_base + j) & _MASK, lane, out[lo:hi])
    return out


def fill_signs(master_seed: int, stream_base: int, n: int) -> np.ndarray:
    """n independent fair signs (+1.0 / -1.0)."""
    u = fill_uniforms(master_seed, stream_base, n, lane=LANE_SIGNS)
    return np.where(u < 0.5, 1.0, -1.0)


def run_path_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    *,
    dt: float,
    d0: float,
    level: float = 1.0,
    bridge: bool = True,
    max_steps: int,
    mode: int = MODE_TRIPLET,
    snap_level: float = 0.0,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Simulate ``n`` hitting paths; see the kernel modules for semantics.

    Returns arrays keyed ``t_hit, w_at, m_at, u, sign, snap_t, status``;
    path ``i`` always uses stream ``stream_base + i``.
    """
    out = {
        "t_hit": np.empty(n),
        "w_at": np.empty(n),
        "m_at": np.empty(n),
        "u": np.empty(n),
        "sign": np.empty(n),
        "snap_t": np.empty(n),
        "status": np.empty(n, dtype=np.int8),
    }
    master = _norm_seed(master_seed)
    base = stream_base & _MASK

    def work(lo: int, hi: int) -> None:
        _impl.run_path_batch(
            master, base, lo, hi, dt, d0, level, bridge, max_steps, mode, snap_level,
            out["t_hit"], out["w_at"], out["m_at"], out["u"], out["sign"],
            out["snap_t"], out["status"],
        )

    _run_parallel(work, 0, n, workers)
    return out


def run_hp_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    *,
    dt: float,
    d0: float,
    level: float = 1.0,
    bridge: bool = True,
    max_steps: int,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Path integrals of M^p, B M^(p-1), (M-B) M^(p-1) for p = 1, 2, 3."""
    keys = ["i1", "i2", "i3", "j1", "j2", "j3", "k1", "k2", "k3", "t_hit"]
    out = {key: np.empty(n) for key in keys}
    out["status"] = np.empty(n, dtype=np.int8)
    master = _norm_seed(master_seed)
    base = stream_base & _MASK

    def work(lo: int, hi: int) -> None:
        _impl.run_hp_batch(
            master, base, lo, hi, dt, d0, level, bridge, max_steps,
            out["i1"], out["i2"], out["i3"],
            out["j1"], out["j2"], out["j3"],
            out["k1"], out["k2"], out["k3"],
            out["t_hit"], out["status"],
        )

    _run_parallel(work, 0, n, workers)
    return out


def run_slice_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    *,
    dt: float,
    d0: float,
    bridge: bool = True,
    t_end: float,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-path (value, running maximum) at the fixed time ``t_end``."""
    w = np.empty(n)
    m = np.empty(n)
    master = _norm_seed(master_seed)
    base = stream_base & _MASK

    def work(lo: int, hi: int) -> None:
        _impl.run_slice_batch(master, base, lo, hi, dt, d0, bridge, t_end, w, m)

    _run_parallel(work, 0, n, workers)
    return w, m


def run_bes3_batch(
    master_seed: int,
    stream_base: int,
    n: int,
    *,
    dt: float,
    bridge: bool = True,
    horizon: float,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Last passage at 1 of |3D BM| within ``horizon`` (cross-check only)."""
    out = {
        "gamma": np.empty(n),
        "r_at": np.empty(n),
        "u": np.empty(n),
        "status": np.empty(n, dtype=np.int8),
    }
    master = _norm_seed(master_seed)
    base = stream_base & _MASK

    def work(lo: int, hi: int) -> None:
        _impl.run_bes3_batch(
            master, base, lo, hi, dt, bridge, horizon,
            out["gamma"], out["r_at"], out["u"], out["status"],
        )

    _run_parallel(work, 0, n, workers)
    return out


def path_state_init(master_seed: int, stream_index: int):
    return _impl.path_state_init(_norm_seed(master_seed), stream_index & _MASK)


def fill_path_chunk(state, dt: float, level: float, bridge: bool, out_w, out_m, out_t):
    return _impl.fill_path_chunk(state, dt, level, bridge, out_w, out_m, out_t)
