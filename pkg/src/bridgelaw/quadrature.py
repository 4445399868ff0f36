"""Adaptive quadrature with declared singularity splits."""

from __future__ import annotations

from dataclasses import dataclass

from scipy.integrate import quad


class QuadratureError(RuntimeError):
    """Quadrature failed to converge; carries the achieved error estimate."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved abserr {achieved:.3e})")
        self.achieved = achieved


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    singularity_splits: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be > 0")


DEFAULT_QUAD = QuadratureConfig()


def integrate(f, lo: float, hi: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Integrate ``f`` on (lo, hi), splitting at configured interior points.

    Infinite endpoints are allowed.  Raises :class:`QuadratureError` when the
    error estimate exceeds the configured tolerances.
    """
    if hi <= lo:
        return 0.0
    cuts = sorted(p for p in cfg.singularity_splits if lo < p < hi)
    points = [lo, *cuts, hi]
    total = 0.0
    err = 0.0
    for a, b in zip(points[:-1], points[1:]):
        val, abserr = quad(f, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=400)
        total += val
        err += abserr
    if err > max(cfg.abs_tol, cfg.rel_tol * abs(total)) * 100.0:
        raise QuadratureError(f"integral on ({lo}, {hi}) did not converge", err)
    return total
