"""Benchmark the compiled kernel against the pure-Python twin.

Runs the same small workloads on both backends, asserts bit-identical
outputs, and reports throughput.  Run as ``python -m bridgelaw.benchmark``.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _kernel_py

try:
    from . import _kernel
except ImportError:
    _kernel = None


def _run_batch(impl, n: int, dt: float):
    out = {
        "t": np.empty(n), "w": np.empty(n), "m": np.empty(n), "u": np.empty(n),
        "sg": np.empty(n), "sn": np.empty(n), "st": np.empty(n, dtype=np.int8),
    }
    start = time.perf_counter()
    impl.run_path_batch(
        2024, 0, 0, n, dt, 0.5, 1.0, True, 10**8, 1, 0.0,
        out["t"], out["w"], out["m"], out["u"], out["sg"], out["sn"], out["st"],
    )
    return time.perf_counter() - start, out


def _run_fill(impl, n: int):
    out = np.empty(n)
    start = time.perf_counter()
    impl.fill_normals(2024, 0, 2, out)
    return time.perf_counter() - start, out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="compiled vs pure-Python kernel benchmark")
    parser.add_argument("--paths", type=int, default=200, help="triplet paths per backend")
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--normals", type=int, default=200_000)
    args = parser.parse_args(argv)

    if _kernel is None:
        print("compiled kernel unavailable; nothing to compare")
        return 1

    t_fill_c, fill_c = _run_fill(_kernel, args.normals)
    t_fill_p, fill_p = _run_fill(_kernel_py, args.normals)
    assert np.array_equal(fill_c, fill_p), "backends disagree on normal fills"
    print(f"normal draws    compiled {args.normals / t_fill_c:12.3e}/s   "
          f"python {args.normals / t_fill_p:12.3e}/s   speedup {t_fill_p / t_fill_c:8.1f}x")

    t_c, out_c = _run_batch(_kernel, args.paths, args.dt)
    t_p, out_p = _run_batch(_kernel_py, args.paths, args.dt)
    for key in out_c:
        assert np.array_equal(out_c[key], out_p[key], equal_nan=True), f"mismatch in {key}"
    print(f"triplet paths   compiled {args.paths / t_c:12.3e}/s   "
          f"python {args.paths / t_p:12.3e}/s   speedup {t_p / t_c:8.1f}x")
    print("outputs bit-identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
