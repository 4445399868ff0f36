"""Closed-form laws, Mellin moments and exact reference samplers.

Everything here is discretization-free: densities and CDFs are evaluated in
closed form or by adaptive quadrature, and reference samplers draw from the
exact joint laws, so they serve as the trusted side of every verification.

The load-bearing identities:

* joint law of (|B_1|, L_1): density (x+l) exp(-(x+l)^2/2) / sqrt(2 pi),
  equivalently (|B_1|, L_1) ~ R_1 (1-U, U) with R_1 the norm of three
  standard Gaussians and U uniform;
* mixed moments E[|B_1|^a L_1^c] = Gamma(1+a) Gamma(1+c) /
  (2^((a+c)/2) Gamma(1+(a+c)/2));
* 1 / sqrt(T_1) is half-normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import gammaln, ndtr

from . import kernel
from .quadrature import DEFAULT_QUAD, QuadratureConfig, integrate
from .rng import RandomStream

LOG3 = math.log(3.0)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

REFERENCE_KINDS = (
    "thm1_rhs",
    "cor1_hitting_rhs",
    "cor1_bessel_rhs",
    "cor2_rhs",
    "lemma_exp_pair",
    "fixed_time_factorization",
    "exact_T1",
    "exact_joint_descB",
)


# ---------------------------------------------------------------------------
# Simple closed-form CDFs used as test oracles.

def normal_cdf(x):
    return ndtr(x)


def half_normal_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, 2.0 * ndtr(x) - 1.0, 0.0)


def scaled_half_normal_cdf(x, c):
    """CDF of c * |N|."""
    return half_normal_cdf(np.asarray(x, dtype=float) / c)


def maxwell_cdf(x):
    """CDF of the norm of three independent standard Gaussians."""
    x = np.asarray(x, dtype=float)
    pos = np.maximum(x, 0.0)
    val = 2.0 * ndtr(pos) - 1.0 - SQRT_2_OVER_PI * pos * np.exp(-0.5 * pos * pos)
    return np.where(x > 0.0, val, 0.0)


def uniform01_cdf(x):
    return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)


def exponential_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, -np.expm1(-x), 0.0)


def gamma2_cdf(x):
    """CDF of the sum of two independent standard exponentials."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.0, 1.0 - np.exp(-x) * (1.0 + x), 0.0)


def reciprocal_uniform_cdf(t):
    """CDF of (1/U - 1)/2 for U uniform on (0, 1)."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0.0, 1.0 - 1.0 / (1.0 + 2.0 * t), 0.0)


def rank_product_cdf(t):
    """CDF of the product of two independent uniforms: t (1 - log t)."""
    t = np.asarray(t, dtype=float)
    tt = np.clip(t, 1e-300, 1.0)
    return np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, tt * (1.0 - np.log(tt))))


# ---------------------------------------------------------------------------
# Mellin moments and the fixed-time joint density.

def mellin_abs_b1_l1(a: float, c: float) -> float:
    """E[|B_1|^a L_1^c] in closed form (log-gamma evaluation)."""
    if a < 0.0 or c < 0.0:
        raise ValueError("a and c must be >= 0")
    return math.exp(
        gammaln(1.0 + a) + gammaln(1.0 + c)
        - 0.5 * (a + c) * math.log(2.0)
        - gammaln(1.0 + 0.5 * (a + c))
    )


def joint_density_b_l(x: float, l: float, s: float) -> float:
    """Density of (B_s, L_s) at (x, l)."""
    if l < 0.0:
        raise ValueError("l must be >= 0")
    if s <= 0.0:
        raise ValueError("s must be > 0")
    q = abs(x) + l
    return q * math.exp(-q * q / (2.0 * s)) / math.sqrt(2.0 * math.pi * s**3)


# ---------------------------------------------------------------------------
# Densities of the uniform-time laws.

def u_density(x: float) -> float:
    """Density of A = Lambda*U - (1-U)/2: log 3 on [-1/2, 0], log(3/(1+2x)) on (0, 1]."""
    if -0.5 <= x <= 0.0:
        return LOG3
    if 0.0 < x <= 1.0:
        return math.log(3.0 / (1.0 + 2.0 * x))
    return 0.0


def u_density_c(x: float, c: float) -> float:
    """Density of A_c = Lambda*U - c(1-U) for 0 < c <= 1 (c = 1/2 gives u)."""
    _check_c(c)
    big_c = 1.0 / c
    if -c <= x <= 0.0:
        return math.log1p(big_c)
    if 0.0 < x <= 1.0:
        return math.log1p(big_c) - math.log1p(big_c * x)
    return 0.0


def k_density(x: float) -> float:
    """Density of B_{U T_1}: 2(1-x)/(3-2x) on (0,1), 2/((1-2x)(3-2x)) below 0."""
    if 0.0 < x < 1.0:
        return 2.0 * (1.0 - x) / (3.0 - 2.0 * x)
    if x < 0.0:
        return 2.0 / ((1.0 - 2.0 * x) * (3.0 - 2.0 * x))
    return 0.0


def k_cdf_exact(x: float) -> float:
    if x <= 0.0:
        return 0.5 * math.log((3.0 - 2.0 * x) / (1.0 - 2.0 * x))
    if x >= 1.0:
        return 1.0
    return 0.5 * LOG3 + x + 0.5 * math.log((3.0 - 2.0 * x) / 3.0)


def h_density(z: float, x: float) -> float:
    """Joint density of (1/sqrt(T_1), B_{U T_1}) at (z, x), z > 0, x < 1.

    The two open pieces meet x = 0 with different limits; by convention the
    boundary of measure zero (x = 0 and x >= 1) returns 0.
    """
    if z <= 0.0:
        raise ValueError("z must be > 0")
    if 0.0 < x < 1.0:
        a = 3.0 - 2.0 * x
        return SQRT_2_OVER_PI * (math.exp(-0.5 * z * z) - math.exp(-0.5 * a * a * z * z))
    if x < 0.0:
        a = 3.0 - 2.0 * x
        b = 1.0 - 2.0 * x
        return SQRT_2_OVER_PI * (math.exp(-0.5 * b * b * z * z) - math.exp(-0.5 * a * a * z * z))
    return 0.0


def l_density(a: float) -> float:
    """Density of A' = Lambda*U + (1-U)/2: log(1/|2a-1|) on (0, 1).

    The logarithmic singularity at 1/2 is reported as ``inf``.
    """
    if not 0.0 < a < 1.0:
        return 0.0
    if a == 0.5:
        return math.inf
    return math.log(1.0 / abs(2.0 * a - 1.0))


def l_cdf_exact(a: float) -> float:
    if a <= 0.0:
        return 0.0
    if a >= 1.0:
        return 1.0
    if a <= 0.5:
        u = 1.0 - 2.0 * a
        return 0.5 * (1.0 - u + u * math.log(u)) if u > 0.0 else 0.5
    return 1.0 - l_cdf_exact(1.0 - a)


def _maxwell_pdf(r: float) -> float:
    return SQRT_2_OVER_PI * r * r * math.exp(-0.5 * r * r)


def alpha_pdf(x: float) -> float:
    """Density of B_{U T_1}/sqrt(T_1), via the scale mixture R_1 * A.

    pdf(x) = integral of maxwell(r) * u(x/r) / r over r > 0, with the
    integrand supported on r >= |x| (positive x) or r >= 2|x| (negative x).
    """
    return _scale_mixture_pdf(x, 0.5)


def alpha_c_pdf(x: float, c: float) -> float:
    """Density of Lambda L_1 - c |B_1| via the scale mixture R_1 * A_c."""
    _check_c(c)
    return _scale_mixture_pdf(x, c)


def _scale_mixture_pdf(x: float, c: float) -> float:
    # The positive part is |N| * Z in law, so the density is positive for
    # every x > 0 (no finite upper support endpoint).

    def integrand(r: float) -> float:
        return _maxwell_pdf(r) * u_density_c(x / r, c) / r

    if x > 0.0:
        lo = x
        cfg = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-10)
        return integrate(integrand, lo, lo + 40.0, cfg)
    if x == 0.0:
        # continuous limit: u_c(0) = log(1 + 1/c) for every r
        return math.log1p(1.0 / c) * SQRT_2_OVER_PI
    # x < 0: u_c(x/r) is the constant log(1+C) for r >= |x|/c, so the
    # mixture collapses to a Gaussian tail integral.
    return math.log1p(1.0 / c) * SQRT_2_OVER_PI * math.exp(-0.5 * (x / c) ** 2)


def r_gamma_pdf(x: float) -> float:
    """Density of R_{U gamma}/sqrt(gamma):
    sqrt(2/pi) x^2 * integral_1^inf y exp(-x^2 y^2 / 2) log(y/|2-y|) dy.

    Evaluated after the substitution u = x*y, which maps the integration
    range to (x, ~12] uniformly in x and moves the logarithmic singularity
    from y = 2 to u = 2x.
    """
    if x <= 0.0:
        raise ValueError("x must be > 0")

    def integrand(u: float) -> float:
        return u * math.exp(-0.5 * u * u) * math.log(u / abs(u - 2.0 * x))

    hi = max(12.0, x + 6.0)
    cfg = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-10, singularity_splits=(2.0 * x,))
    return SQRT_2_OVER_PI * integrate(integrand, x, hi, cfg)


def descB_weighted_integral(p: float, phi, side: str, cfg: QuadratureConfig | None = None) -> float:
    """Closed-form side of the weighted expectations of (1/sqrt(T_1), B_{U T_1}).

    positive side: c_p * int_0^1 phi(b) (1 - (3-2b)^-(p+1)) db
    negative side: c_p * int_-inf^0 phi(x) ((1-2x)^-(p+1) - (3-2x)^-(p+1)) dx
    with c_p = E|N|^p.
    """
    if p < 0.0:
        raise ValueError("p must be >= 0")
    c_p = mellin_abs_b1_l1(p, 0.0)
    cfg = cfg or QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11)
    if side == "positive":
        def f(b: float) -> float:
            return phi(b) * (1.0 - (3.0 - 2.0 * b) ** (-(p + 1.0)))

        return c_p * integrate(f, 0.0, 1.0, cfg)
    if side == "negative":
        def f(x: float) -> float:
            return phi(x) * ((1.0 - 2.0 * x) ** (-(p + 1.0)) - (3.0 - 2.0 * x) ** (-(p + 1.0)))

        return c_p * integrate(f, -math.inf, 0.0, cfg)
    raise ValueError("side must be 'positive' or 'negative'")


def _check_c(c: float) -> None:
    if not 0.0 < c <= 1.0:
        raise ValueError("c must be in (0, 1]")


# ---------------------------------------------------------------------------
# AnalyticDensity: pdf + quadrature CDF + bulk evaluation for KS tests.

@dataclass
class AnalyticDensity:
    """A closed-form law handle: support, pointwise pdf, CDF by quadrature.

    ``window`` is a finite interval holding all but < 1e-10 of the mass (or
    exactly all of it); bulk CDF evaluation interpolates cell-quadrature
    values on a grid over the window unless an exact CDF is supplied, in
    which case the exact form is used (and tested against quadrature).
    """

    name: str
    support: tuple[float, float]
    pdf_scalar: object
    window: tuple[float, float]
    quad: QuadratureConfig = field(default_factory=lambda: DEFAULT_QUAD)
    cdf_exact: object | None = None
    grid_nodes: int = 2049
    _interp: object | None = field(default=None, repr=False, init=False)
    _mass_below_window: float = field(default=0.0, repr=False, init=False)

    def pdf(self, x: float) -> float:
        if x <= self.support[0] or x >= self.support[1]:
            return 0.0
        return float(self.pdf_scalar(x))

    def pdf_values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.zeros(xs.shape)
        mask = (xs > self.support[0]) & (xs < self.support[1])
        out[mask] = [self.pdf_scalar(float(v)) for v in xs[mask]]
        return out

    def mass(self) -> float:
        return integrate(self.pdf, self.support[0], self.support[1], self.quad)

    def cdf(self, x: float) -> float:
        """Cumulative value by adaptive quadrature of the pdf."""
        lo = self.support[0]
        if x <= lo:
            return 0.0
        if x >= self.support[1]:
            return self.mass()
        return integrate(self.pdf, lo, x, self.quad)

    def _grid(self) -> np.ndarray:
        lo, hi = self.window
        base = np.linspace(lo, hi, self.grid_nodes)
        extra = [np.asarray([lo, hi])]
        for s in self.quad.singularity_splits:
            if lo < s < hi:
                offs = (hi - lo) * 0.5 ** np.arange(8, 46)
                extra.append(np.clip(s + offs, lo, hi))
                extra.append(np.clip(s - offs, lo, hi))
                extra.append(np.asarray([s]))
        grid = np.unique(np.concatenate([base, *extra]))
        return grid

    def _build_interp(self):
        grid = self._grid()
        masses = np.empty(len(grid) - 1)
        for i in range(len(grid) - 1):
            masses[i] = integrate(self.pdf, grid[i], grid[i + 1], self.quad)
        left = 0.0
        if self.window[0] > self.support[0]:
            left = integrate(self.pdf, self.support[0], self.window[0], self.quad)
        self._mass_below_window = left
        cum = left + np.concatenate(([0.0], np.cumsum(masses)))
        cum = np.minimum(cum, 1.0)
        self._interp = PchipInterpolator(grid, cum, extrapolate=False)

    def cdf_values(self, xs) -> np.ndarray:
        """Vectorized CDF for sorted or unsorted sample arrays."""
        xs = np.asarray(xs, dtype=float)
        if self.cdf_exact is not None:
            return np.asarray([self.cdf_exact(float(v)) for v in xs])
        if self._interp is None:
            self._build_interp()
        lo, hi = self.window
        out = np.empty(xs.shape)
        below = xs <= lo
        above = xs >= hi
        mid = ~(below | above)
        out[below] = self._mass_below_window if lo > self.support[0] else 0.0
        out[above] = float(self._interp(hi))
        out[mid] = self._interp(xs[mid])
        return out


@lru_cache(maxsize=None)
def u_law() -> AnalyticDensity:
    return AnalyticDensity(
        name="u",
        support=(-0.5, 1.0),
        pdf_scalar=u_density,
        window=(-0.5, 1.0),
        quad=QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11, singularity_splits=(0.0,)),
    )


@lru_cache(maxsize=None)
def k_law() -> AnalyticDensity:
    return AnalyticDensity(
        name="k",
        support=(-math.inf, 1.0),
        pdf_scalar=k_density,
        window=(-64.0, 1.0),
        quad=QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11, singularity_splits=(0.0,)),
        cdf_exact=k_cdf_exact,
    )


@lru_cache(maxsize=None)
def l_law() -> AnalyticDensity:
    return AnalyticDensity(
        name="l",
        support=(0.0, 1.0),
        pdf_scalar=l_density,
        window=(0.0, 1.0),
        quad=QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11, singularity_splits=(0.5,)),
        cdf_exact=l_cdf_exact,
    )


@lru_cache(maxsize=None)
def alpha_law() -> AnalyticDensity:
    return AnalyticDensity(
        name="alpha",
        support=(-math.inf, math.inf),
        pdf_scalar=alpha_pdf,
        window=(-3.8, 7.0),
        quad=QuadratureConfig(abs_tol=1e-10, rel_tol=1e-9, singularity_splits=(0.0,)),
        grid_nodes=1025,
    )


@lru_cache(maxsize=None)
def r_gamma_law() -> AnalyticDensity:
    return AnalyticDensity(
        name="r_gamma",
        support=(0.0, math.inf),
        pdf_scalar=r_gamma_pdf,
        window=(0.0, 7.0),
        quad=QuadratureConfig(abs_tol=1e-10, rel_tol=1e-9),
        grid_nodes=1025,
    )


@lru_cache(maxsize=None)
def alpha_c_law(c: float) -> AnalyticDensity:
    _check_c(c)
    return AnalyticDensity(
        name=f"alpha_c[{c:g}]",
        support=(-math.inf, math.inf),
        pdf_scalar=lambda x: alpha_c_pdf(x, c),
        window=(-1.0 - 7.0 * c, 7.0),
        quad=QuadratureConfig(abs_tol=1e-10, rel_tol=1e-9, singularity_splits=(0.0,)),
        grid_nodes=1025,
    )


@dataclass(frozen=True)
class AcFamily:
    c: float
    p_pos: float
    z_density: AnalyticDensity
    a_density: AnalyticDensity


@lru_cache(maxsize=None)
def ac_family(c: float) -> AcFamily:
    """Positive mass, factor law Z_C and assembled law of A_c = Lambda*U - c(1-U).

    p_pos = 1 - c log(1 + 1/c); Z_C has density C z / (p_pos (1 + C z)) on
    (0, 1); the assembled density of A_c is the mixture of V*Z_C (positive
    part, mass p_pos) and -c*V (negative part, mass 1 - p_pos).
    """
    _check_c(c)
    big_c = 1.0 / c
    p_pos = 1.0 - c * math.log1p(big_c)

    def z_pdf(z: float) -> float:
        if not 0.0 < z < 1.0:
            return 0.0
        return big_c * z / (p_pos * (1.0 + big_c * z))

    def z_cdf(z: float) -> float:
        if z <= 0.0:
            return 0.0
        if z >= 1.0:
            return 1.0
        return (z - math.log1p(big_c * z) / big_c) / p_pos

    def a_cdf(x: float) -> float:
        if x <= -c:
            return 0.0
        if x >= 1.0:
            return 1.0
        if x <= 0.0:
            return (x + c) * math.log1p(big_c)
        return (
            (1.0 - p_pos)
            + x * math.log1p(big_c)
            - ((1.0 + big_c * x) * math.log1p(big_c * x) - big_c * x) / big_c
        )

    z_density = AnalyticDensity(
        name=f"ac_z[{c:g}]",
        support=(0.0, 1.0),
        pdf_scalar=z_pdf,
        window=(0.0, 1.0),
        quad=QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11),
        cdf_exact=z_cdf,
    )
    a_density = AnalyticDensity(
        name=f"ac_a[{c:g}]",
        support=(-c, 1.0),
        pdf_scalar=lambda x: u_density_c(x, c),
        window=(-c, 1.0),
        quad=QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11, singularity_splits=(0.0,)),
        cdf_exact=a_cdf,
    )
    return AcFamily(c=c, p_pos=p_pos, z_density=z_density, a_density=a_density)


def density_by_name(name: str, c: float = 0.5) -> AnalyticDensity:
    """Registry used by the CLI density exporter (1D laws only)."""
    table = {
        "u": u_law,
        "k": k_law,
        "l": l_law,
        "alpha": alpha_law,
        "r_gamma": r_gamma_law,
        "alpha_c": lambda: alpha_c_law(c),
        "ac_a": lambda: ac_family(c).a_density,
        "ac_z": lambda: ac_family(c).z_density,
    }
    if name not in table:
        raise KeyError(f"unknown density {name!r}; choose from {sorted(table)}")
    return table[name]()


# ---------------------------------------------------------------------------
# Exact reference samplers.

def sample_reference(kind: str, stream: RandomStream, s: float = 1.0):
    """One exact draw of a reference law; see REFERENCE_KINDS.

    Multi-coordinate kinds return tuples ordered as in the identity they
    realize; ``fixed_time_factorization`` takes the fixed time ``s``.
    """
    if kind == "lemma_exp_pair":
        return (stream.exponential(), stream.exponential())
    if kind == "exact_T1":
        n = stream.normal()
        while n == 0.0:
            n = stream.normal()
        return 1.0 / (n * n)
    if kind == "cor2_rhs":
        u = 1.0 - stream.uniform()
        lam = stream.uniform()
        r1 = _maxwell_scalar(stream)
        return (0.5 * (1.0 / u - 1.0), lam, r1)
    if kind == "exact_joint_descB":
        r1 = _maxwell_scalar(stream)
        u = 1.0 - stream.uniform()
        lam = stream.uniform()
        return (r1 * u, lam - 0.5 * (1.0 / u - 1.0))
    if kind == "fixed_time_factorization":
        if s <= 0.0:
            raise ValueError("s must be > 0")
        r1 = _maxwell_scalar(stream)
        u = stream.uniform()
        root_s = math.sqrt(s)
        return (root_s * r1 * (1.0 - u), root_s * r1 * u)
    if kind in ("thm1_rhs", "cor1_hitting_rhs", "cor1_bessel_rhs"):
        r1 = _maxwell_scalar(stream)
        u = stream.uniform()
        lam = stream.uniform()
        coin = stream.uniform()
        abs_b = r1 * (1.0 - u)
        l1 = r1 * u
        if kind == "thm1_rhs":
            b1 = abs_b if coin < 0.5 else -abs_b
            return (0.5 * b1, l1, lam)
        if kind == "cor1_hitting_rhs":
            return (lam * l1 - 0.5 * abs_b, l1, lam)
        return (lam * l1 + 0.5 * abs_b, l1, lam)
    raise ValueError(f"unknown reference kind {kind!r}")


def _maxwell_scalar(stream: RandomStream) -> float:
    a = stream.normal()
    b = stream.normal()
    c = stream.normal()
    return math.sqrt(a * a + b * b + c * c)


def sample_reference_batch(
    kind: str, master_seed: int, stream_base: int, n: int, s: float = 1.0
) -> np.ndarray:
    """Vectorized exact reference draws; shape (n,) or (n, k).

    Normal and uniform draws come from separate lanes of block streams
    rooted at ``stream_base``, so batches are reproducible and mergeable
    regardless of worker layout.
    """
    if kind == "lemma_exp_pair":
        u = kernel.fill_uniforms(master_seed, stream_base, 2 * n).reshape(2, n)
        return np.column_stack([-np.log1p(-u[0]), -np.log1p(-u[1])])
    if kind == "exact_T1":
        z = kernel.fill_normals(master_seed, stream_base, n)
        with np.errstate(divide="ignore"):
            return 1.0 / (z * z)
    if kind == "cor2_rhs":
        un = kernel.fill_uniforms(master_seed, stream_base, 2 * n).reshape(2, n)
        r1 = _maxwell_batch(master_seed, stream_base, n)
        u = 1.0 - un[0]
        return np.column_stack([0.5 * (1.0 / u - 1.0), un[1], r1])
    if kind == "exact_joint_descB":
        un = kernel.fill_uniforms(master_seed, stream_base, 2 * n).reshape(2, n)
        r1 = _maxwell_batch(master_seed, stream_base, n)
        u = 1.0 - un[0]
        return np.column_stack([r1 * u, un[1] - 0.5 * (1.0 / u - 1.0)])
    if kind == "fixed_time_factorization":
        if s <= 0.0:
            raise ValueError("s must be > 0")
        u = kernel.fill_uniforms(master_seed, stream_base, n)
        r1 = _maxwell_batch(master_seed, stream_base, n)
        root_s = math.sqrt(s)
        return np.column_stack([root_s * r1 * (1.0 - u), root_s * r1 * u])
    if kind in ("thm1_rhs", "cor1_hitting_rhs", "cor1_bessel_rhs"):
        un = kernel.fill_uniforms(master_seed, stream_base, 3 * n).reshape(3, n)
        r1 = _maxwell_batch(master_seed, stream_base, n)
        u, lam, coin = un
        abs_b = r1 * (1.0 - u)
        l1 = r1 * u
        if kind == "thm1_rhs":
            b1 = np.where(coin < 0.5, abs_b, -abs_b)
            return np.column_stack([0.5 * b1, l1, lam])
        if kind == "cor1_hitting_rhs":
            return np.column_stack([lam * l1 - 0.5 * abs_b, l1, lam])
        return np.column_stack([lam * l1 + 0.5 * abs_b, l1, lam])
    raise ValueError(f"unknown reference kind {kind!r}")


def _maxwell_batch(master_seed: int, stream_base: int, n: int) -> np.ndarray:
    z = kernel.fill_normals(master_seed, stream_base, 3 * n).reshape(3, n)
    return np.sqrt(z[0] ** 2 + z[1] ** 2 + z[2] ** 2)
