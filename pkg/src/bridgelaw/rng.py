"""Deterministic, splittable random streams.

Every random draw in this package comes from a xoshiro256++ generator whose
256-bit state is derived from a ``(master_seed, stream_index, lane)`` triple
through a splitmix64 hash chain.  Two streams with distinct triples never
share state, and re-deriving a stream replays the identical draw sequence,
which is what makes worker-count-independent sampling and the two-pass path
replay in the kernels possible.

Lanes partition the draw namespace of one ``(master_seed, stream_index)``
pair so that different consumers (path increments, per-path auxiliary draws,
bulk reference fills, excursion signs, user streams) can never collide:

======  =======================================================
lane    consumer
======  =======================================================
0       path-increment draws inside the simulation kernels
1       per-path auxiliary draws (uniform time, sign, eval noise)
2       bulk normal fills for exact reference samplers
3       bulk uniform fills for exact reference samplers
4       excursion-sign draws for reflected views
7       default lane of user-facing ``RandomStream`` objects
======  =======================================================

Standard normals use a 128-layer ziggurat whose tables are built here once
and shared verbatim with the compiled kernel, so the compiled and
pure-Python backends produce bit-identical streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

LANE_PATH = 0
LANE_AUX = 1
LANE_NORMALS = 2
LANE_UNIFORMS = 3
LANE_SIGNS = 4
LANE_USER = 7

# 128-layer ziggurat constants for the standard normal (Marsaglia & Tsang).
ZIG_R = 3.442619855899
ZIG_V = 9.91256303526217e-3
ZIG_LAYERS = 128

U53_INV = 2.0 ** -53


def mix64(v: int) -> int:
    """splitmix64 finalizer: avalanching 64-bit hash."""
    v &= _MASK
    v ^= v >> 30
    v = (v * 0xBF58476D1CE4E5B9) & _MASK
    v ^= v >> 27
    v = (v * 0x94D049BB133111EB) & _MASK
    v ^= v >> 31
    return v


def derive_seed(master_seed: int, stream_index: int, lane: int) -> int:
    """Fold the identifying triple into one 64-bit stream seed."""
    z = mix64((master_seed + _GOLDEN) & _MASK)
    z = mix64(z ^ ((stream_index + 0xBF58476D1CE4E5B9) & _MASK))
    z = mix64(z ^ ((lane + 0x94D049BB133111EB) & _MASK))
    return z


def expand_state(seed: int) -> tuple[int, int, int, int]:
    """Expand a 64-bit seed into a nonzero 256-bit xoshiro state."""
    z = seed & _MASK
    out = []
    for _ in range(4):
        z = (z + _GOLDEN) & _MASK
        out.append(mix64(z))
    if out[0] | out[1] | out[2] | out[3] == 0:
        out[0] = 1
    return tuple(out)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def _build_ziggurat() -> tuple[list[float], list[float]]:
    """Layer boundaries x[0..128] (decreasing) and f[i] = exp(-x[i]^2/2)."""
    n = ZIG_LAYERS
    x = [0.0] * (n + 1)
    f_r = math.exp(-0.5 * ZIG_R * ZIG_R)
    x[0] = ZIG_V / f_r  # pseudo-width of the base strip (rectangle + tail)
    x[1] = ZIG_R
    for i in range(2, n):
        x[i] = math.sqrt(-2.0 * math.log(ZIG_V / x[i - 1] + math.exp(-0.5 * x[i - 1] * x[i - 1])))
    x[n] = 0.0
    f = [math.exp(-0.5 * xi * xi) for xi in x]
    return x, f


ZIG_X, ZIG_F = _build_ziggurat()


@dataclass
class RandomStream:
    """A reproducible scalar random stream.

    Draws are a pure function of ``(master_seed, stream_index, lane,
    counter)`` where ``counter`` is the number of 64-bit words consumed so
    far.  The pure-Python simulation kernel is built on this class; the
    compiled kernel reimplements the identical protocol in C.
    """

    master_seed: int
    stream_index: int
    lane: int = LANE_USER
    counter: int = field(default=0, init=False)
    _s: list[int] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self._s = list(expand_state(derive_seed(self.master_seed, self.stream_index, self.lane)))

    def clone(self, lane: int | None = None) -> "RandomStream":
        """Fresh stream for the same identity (optionally on another lane)."""
        return RandomStream(self.master_seed, self.stream_index, self.lane if lane is None else lane)

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[0] + s[3]) & _MASK, 23) + s[0]) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        self.counter += 1
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * U53_INV

    def normal(self) -> float:
        """Standard normal via the shared 128-layer ziggurat."""
        while True:
            r = self.next_u64()
            i = r & 127
            sign = -1.0 if (r >> 7) & 1 else 1.0
            u = (r >> 11) * U53_INV
            x = u * ZIG_X[i]
            if x < ZIG_X[i + 1]:
                return sign * x
            if i == 0:
                # Exact tail sampling beyond ZIG_R.
                while True:
                    xt = -math.log(1.0 - self.uniform()) / ZIG_R
                    yt = -math.log(1.0 - self.uniform())
                    if yt + yt > xt * xt:
                        return sign * (ZIG_R + xt)
            else:
                y = ZIG_F[i] + self.uniform() * (ZIG_F[i + 1] - ZIG_F[i])
                if y < math.exp(-0.5 * x * x):
                    return sign * x

    def exponential(self) -> float:
        """Standard exponential draw."""
        return -math.log(1.0 - self.uniform())


def make_stream(master_seed: int, stream_index: int) -> RandomStream:
    """Public constructor for a user-facing stream."""
    return RandomStream(master_seed, stream_index, LANE_USER)
