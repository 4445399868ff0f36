"""Pure-Python twin of the compiled path-simulation kernel.

This module and ``_kernel.pyx`` implement the same draw protocol on top of
the streams defined in :mod:`bridgelaw.rng`; given identical arguments they
produce bit-identical outputs (enforced by tests).  The compiled module is
preferred at import time, this one is the fallback and the executable
specification of the algorithm.

Path stepping
-------------
A path is advanced by Gaussian increments of variance ``dt * 4**k`` where
``k`` is a per-step scale index.  Near the barrier (and near the running
maximum) ``k = 0``, so the base resolution ``dt`` governs everything that
decides hits and maximum updates.  Far below the barrier the step is
geometrically coarsened: increments stay exactly Gaussian at every scale, so
the skeleton law is exact and only the local resolution changes, in
proportion to the distance at which nothing can be hit.  ``d0 <= 0``
disables the coarsening and yields a uniform grid.

With ``bridge`` enabled, the within-step maximum is sampled from its exact
conditional law given the step endpoints, which both detects level crossings
with probability ``exp(-2 (a-x0)(a-x1) / h)`` and removes the O(sqrt(dt))
bias of the discrete running maximum.  Bridge-detected hits are placed at
the step midpoint; direct overshoots at the linear interpolation of the
crossing.

Sampling a path functional at an interior time replays the increment stream
from the start (two-pass, storage-free) and fills in the value between grid
points from the exact Brownian-bridge conditional.
"""

from __future__ import annotations

import math

from .rng import (
    LANE_AUX,
    LANE_PATH,
    RandomStream,
)

BACKEND = "python"

KMAX = 26
THETA = 20.0
_POW4 = [float(4**k) for k in range(KMAX + 1)]

STATUS_OK = 0
STATUS_EXHAUSTED = 1
STATUS_NO_CROSSING = 2

MODE_THIT = 0
MODE_TRIPLET = 1

_INF = float("inf")


def fill_uniforms(master_seed, stream_index, lane, out):
    rng = RandomStream(master_seed, stream_index, lane)
    for i in range(len(out)):
        out[i] = rng.uniform()


def fill_normals(master_seed, stream_index, lane, out):
    rng = RandomStream(master_seed, stream_index, lane)
    for i in range(len(out)):
        out[i] = rng.normal()


def _scale_index(k, w, m, level, d0):
    if d0 <= 0.0:
        return 0
    d_gate = level - w
    dm = (m - w) + d0
    if dm < d_gate:
        d_gate = dm
    while k > 0 and d_gate < d0 * float(1 << k):
        k -= 1
    while k < KMAX and d_gate >= d0 * float(2 << k):
        k += 1
    return k


def _pass1(rng, dt, d0, level, bridge, max_steps, snap_level):
    """Run one path until the running maximum reaches ``level``.

    Returns (status, t_hit, snap_t, n_steps).
    """
    w = 0.0
    m = 0.0
    t_sum = 0.0
    t_comp = 0.0
    k = 0
    snap_t = -1.0
    want_snap = snap_level > 0.0
    steps = 0
    while steps < max_steps:
        steps += 1
        k = _scale_index(k, w, m, level, d0)
        h = dt * _POW4[k]
        s = math.sqrt(h)
        z = rng.normal()
        x0 = w
        x1 = w + s * z
        if bridge:
            if (m - x0) * (m - x1) < THETA * h:
                v = 1.0 - rng.uniform()
                diff = x1 - x0
                mstep = 0.5 * (x0 + x1 + math.sqrt(diff * diff - 2.0 * h * math.log(v)))
                if mstep > m:
                    m = mstep
        else:
            if x1 > m:
                m = x1
        if want_snap and snap_t < 0.0 and m >= snap_level:
            if x1 >= snap_level:
                snap_t = t_sum + h * ((snap_level - x0) / (x1 - x0))
            else:
                snap_t = t_sum + 0.5 * h
        if m >= level:
            if x1 >= level:
                t_hit = t_sum + h * ((level - x0) / (x1 - x0))
            else:
                t_hit = t_sum + 0.5 * h
            if want_snap and (snap_t < 0.0 or snap_t > t_hit):
                snap_t = t_hit
            return STATUS_OK, t_hit, snap_t, steps
        w = x1
        y = h - t_comp
        tt = t_sum + y
        t_comp = (tt - t_sum) - y
        t_sum = tt
    return STATUS_EXHAUSTED, math.nan, math.nan, steps


def _pass2_eval(rng, aux, dt, d0, level, bridge, s_star):
    """Replay the increment stream and evaluate (w, m) at time ``s_star``.

    The running maximum passed to the caller is the maximum through the
    start of the straddling step combined with the bridge-sampled value at
    ``s_star`` (clamped to the barrier).  Draws in ``rng`` must replay the
    sequence consumed by :func:`_pass1`.
    """
    w = 0.0
    m = 0.0
    t_sum = 0.0
    t_comp = 0.0
    k = 0
    while True:
        k = _scale_index(k, w, m, level, d0)
        h = dt * _POW4[k]
        s = math.sqrt(h)
        z = rng.normal()
        x0 = w
        x1 = w + s * z
        m_before = m
        hit = False
        if bridge:
            if (m - x0) * (m - x1) < THETA * h:
                v = 1.0 - rng.uniform()
                diff = x1 - x0
                mstep = 0.5 * (x0 + x1 + math.sqrt(diff * diff - 2.0 * h * math.log(v)))
                if mstep > m:
                    m = mstep
        else:
            if x1 > m:
                m = x1
        if m >= level:
            hit = True
        t0 = t_sum
        y = h - t_comp
        tt = t_sum + y
        t_comp = (tt - t_sum) - y
        t_sum = tt
        if hit:
            # s_star always precedes the hit: final-partial-step draws clamp
            # to the hit point where the path sits at the barrier.
            return level, level
        if t_sum > s_star:
            tau0 = s_star - t0
            if tau0 < 0.0:
                tau0 = 0.0
            mean = x0 + (x1 - x0) * (tau0 / h)
            var = tau0 * (h - tau0) / h
            w_s = mean + math.sqrt(var) * aux.normal()
            if w_s > level:
                w_s = level
            # running max through s_star: include the peak of the partial
            # bridge (t0 -> s_star), sampled from its exact conditional law
            v2 = 1.0 - aux.uniform()
            d2 = w_s - x0
            peak = 0.5 * (x0 + w_s + math.sqrt(d2 * d2 - 2.0 * tau0 * math.log(v2)))
            if peak > level:
                peak = level
            m_s = m_before if m_before > peak else peak
            return w_s, m_s
        w = x1


def run_path_batch(
    master_seed,
    stream_base,
    lo,
    hi,
    dt,
    d0,
    level,
    bridge,
    max_steps,
    mode,
    snap_level,
    out_t,
    out_w,
    out_m,
    out_u,
    out_sign,
    out_snap,
    out_status,
):
    """Simulate paths ``lo..hi-1`` of a batch; fill per-path outputs."""
    for i in range(lo, hi):
        rng = RandomStream(master_seed, stream_base + i, LANE_PATH)
        status, t_hit, snap_t, _ = _pass1(rng, dt, d0, level, bridge, max_steps, snap_level)
        out_status[i] = status
        out_snap[i] = snap_t
        out_t[i] = t_hit
        if status != STATUS_OK:
            out_w[i] = math.nan
            out_m[i] = math.nan
            out_u[i] = math.nan
            out_sign[i] = 0
            continue
        if mode == MODE_THIT:
            out_w[i] = math.nan
            out_m[i] = math.nan
            out_u[i] = math.nan
            out_sign[i] = 0
            continue
        aux = RandomStream(master_seed, stream_base + i, LANE_AUX)
        u = aux.uniform()
        sign = 1 if aux.uniform() < 0.5 else -1
        replay = RandomStream(master_seed, stream_base + i, LANE_PATH)
        w_s, m_s = _pass2_eval(replay, aux, dt, d0, level, bridge, u * t_hit)
        out_w[i] = w_s
        out_m[i] = m_s
        out_u[i] = u
        out_sign[i] = sign


def run_hp_batch(
    master_seed,
    stream_base,
    lo,
    hi,
    dt,
    d0,
    level,
    bridge,
    max_steps,
    out_i1,
    out_i2,
    out_i3,
    out_j1,
    out_j2,
    out_j3,
    out_k1,
    out_k2,
    out_k3,
    out_t,
    out_status,
):
    """Trapezoid path integrals of M^p, B*M^(p-1) and (M-B)*M^(p-1), p=1..3."""
    for idx in range(lo, hi):
        rng = RandomStream(master_seed, stream_base + idx, LANE_PATH)
        w = 0.0
        m = 0.0
        t_sum = 0.0
        t_comp = 0.0
        k = 0
        i1 = i2 = i3 = 0.0
        j1 = j2 = j3 = 0.0
        k1 = k2 = k3 = 0.0
        steps = 0
        status = STATUS_EXHAUSTED
        t_hit = math.nan
        while steps < max_steps:
            steps += 1
            k = _scale_index(k, w, m, level, d0)
            h = dt * _POW4[k]
            s = math.sqrt(h)
            z = rng.normal()
            x0 = w
            m0 = m
            x1 = w + s * z
            if bridge:
                if (m - x0) * (m - x1) < THETA * h:
                    v = 1.0 - rng.uniform()
                    diff = x1 - x0
                    mstep = 0.5 * (x0 + x1 + math.sqrt(diff * diff - 2.0 * h * math.log(v)))
                    if mstep > m:
                        m = mstep
            else:
                if x1 > m:
                    m = x1
            if m >= level:
                if x1 >= level:
                    t_hit = t_sum + h * ((level - x0) / (x1 - x0))
                else:
                    t_hit = t_sum + 0.5 * h
                hp = t_hit - t_sum
                lv1 = level
                lv2 = level * level
                lv3 = lv2 * level
                i1 += 0.5 * hp * (m0 + lv1)
                i2 += 0.5 * hp * (m0 * m0 + lv2)
                i3 += 0.5 * hp * (m0 * m0 * m0 + lv3)
                j1 += 0.5 * hp * (x0 + lv1)
                j2 += 0.5 * hp * (x0 * m0 + lv2)
                j3 += 0.5 * hp * (x0 * m0 * m0 + lv3)
                k1 += 0.5 * hp * (m0 - x0)
                k2 += 0.5 * hp * ((m0 - x0) * m0)
                k3 += 0.5 * hp * ((m0 - x0) * m0 * m0)
                status = STATUS_OK
                break
            m1 = m
            i1 += 0.5 * h * (m0 + m1)
            i2 += 0.5 * h * (m0 * m0 + m1 * m1)
            i3 += 0.5 * h * (m0 * m0 * m0 + m1 * m1 * m1)
            j1 += 0.5 * h * (x0 + x1)
            j2 += 0.5 * h * (x0 * m0 + x1 * m1)
            j3 += 0.5 * h * (x0 * m0 * m0 + x1 * m1 * m1)
            k1 += 0.5 * h * ((m0 - x0) + (m1 - x1))
            k2 += 0.5 * h * ((m0 - x0) * m0 + (m1 - x1) * m1)
            k3 += 0.5 * h * ((m0 - x0) * m0 * m0 + (m1 - x1) * m1 * m1)
            w = x1
            y = h - t_comp
            tt = t_sum + y
            t_comp = (tt - t_sum) - y
            t_sum = tt
        out_status[idx] = status
        out_t[idx] = t_hit
        if status == STATUS_OK:
            out_i1[idx] = i1
            out_i2[idx] = i2
            out_i3[idx] = i3
            out_j1[idx] = j1
            out_j2[idx] = j2
            out_j3[idx] = j3
            out_k1[idx] = k1
            out_k2[idx] = k2
            out_k3[idx] = k3
        else:
            out_i1[idx] = out_i2[idx] = out_i3[idx] = math.nan
            out_j1[idx] = out_j2[idx] = out_j3[idx] = math.nan
            out_k1[idx] = out_k2[idx] = out_k3[idx] = math.nan


def run_slice_batch(
    master_seed,
    stream_base,
    lo,
    hi,
    dt,
    d0,
    bridge,
    t_end,
    out_w,
    out_m,
):
    """Value and running maximum of each path at the fixed time ``t_end``."""
    for i in range(lo, hi):
        rng = RandomStream(master_seed, stream_base + i, LANE_PATH)
        w = 0.0
        m = 0.0
        t_sum = 0.0
        t_comp = 0.0
        k = 0
        while True:
            rem = t_end - t_sum
            if rem <= 0.0:
                break
            k = _scale_index(k, w, m, _INF, d0)
            h = dt * _POW4[k]
            if h > rem:
                h = rem
            s = math.sqrt(h)
            z = rng.normal()
            x0 = w
            x1 = w + s * z
            if bridge:
                if (m - x0) * (m - x1) < THETA * h:
                    v = 1.0 - rng.uniform()
                    diff = x1 - x0
                    mstep = 0.5 * (x0 + x1 + math.sqrt(diff * diff - 2.0 * h * math.log(v)))
                    if mstep > m:
                        m = mstep
            else:
                if x1 > m:
                    m = x1
            w = x1
            y = h - t_comp
            tt = t_sum + y
            t_comp = (tt - t_sum) - y
            t_sum = tt
        out_w[i] = w
        out_m[i] = m


def path_state_init(master_seed, stream_index):
    """Mutable state for chunked materialized simulation."""
    rng = RandomStream(master_seed, stream_index, LANE_PATH)
    # [w, m, t_sum, t_comp]
    return {"rng": rng, "f": [0.0, 0.0, 0.0, 0.0], "steps": 0}


def fill_path_chunk(state, dt, level, bridge, out_w, out_m, out_t):
    """Advance a materialized uniform-grid path by up to ``len(out_w)`` steps.

    The stored maximum is the plain grid running maximum; with ``bridge``
    enabled, within-step level crossings are additionally detected with the
    exact crossing probability and terminate the path at the step midpoint.
    Returns ``(n_filled, hit, t_hit)``.
    """
    rng = state["rng"]
    w, m, t_sum, t_comp = state["f"]
    n = len(out_w)
    s = math.sqrt(dt)
    filled = 0
    hit = False
    t_hit = math.nan
    for i in range(n):
        z = rng.normal()
        x0 = w
        x1 = w + s * z
        if x1 > m:
            m = x1
        crossed = False
        if x1 >= level:
            t_hit = t_sum + dt * ((level - x0) / (x1 - x0))
            crossed = True
        elif bridge and (level - x0) * (level - x1) < THETA * dt:
            v = 1.0 - rng.uniform()
            if v < math.exp(-2.0 * (level - x0) * (level - x1) / dt):
                t_hit = t_sum + 0.5 * dt
                crossed = True
        if crossed:
            hit = True
            break
        y = dt - t_comp
        tt = t_sum + y
        t_comp = (tt - t_sum) - y
        t_sum = tt
        out_w[i] = x1
        out_m[i] = m
        out_t[i] = t_sum
        w = x1
        filled += 1
    state["f"][0] = w
    state["f"][1] = m
    state["f"][2] = t_sum
    state["f"][3] = t_comp
    state["steps"] += filled
    return filled, hit, t_hit


def run_bes3_batch(
    master_seed,
    stream_base,
    lo,
    hi,
    dt,
    bridge,
    horizon,
    out_gamma,
    out_r,
    out_u,
    out_status,
):
    """Three-dimensional Bessel paths: last passage at 1 within ``horizon``.

    Truncation: returns after ``horizon`` are missed, so the recorded last
    passage is biased low with probability ~ sqrt(2/(pi*horizon)).
    Cross-validation use only.
    """
    for idx in range(lo, hi):
        rng = RandomStream(master_seed, stream_base + idx, LANE_PATH)
        a = b = c = 0.0
        r = 0.0
        t = 0.0
        s = math.sqrt(dt)
        gamma = -1.0
        n_steps = int(horizon / dt + 0.5)
        for _ in range(n_steps):
            za = rng.normal()
            zb = rng.normal()
            zc = rng.normal()
            a1 = a + s * za
            b1 = b + s * zb
            c1 = c + s * zc
            r1 = math.sqrt(a1 * a1 + b1 * b1 + c1 * c1)
            if (r - 1.0) * (r1 - 1.0) <= 0.0 and r1 != r:
                gamma = t + dt * ((1.0 - r) / (r1 - r))
            elif bridge and r > 1.0 and r1 > 1.0 and (r - 1.0) * (r1 - 1.0) < THETA * dt:
                v = 1.0 - rng.uniform()
                if v < math.exp(-2.0 * (r - 1.0) * (r1 - 1.0) / dt):
                    gamma = t + 0.5 * dt
            a, b, c, r = a1, b1, c1, r1
            t += dt
        if gamma <= 0.0:
            out_status[idx] = STATUS_NO_CROSSING
            out_gamma[idx] = math.nan
            out_r[idx] = math.nan
            out_u[idx] = math.nan
            continue
        aux = RandomStream(master_seed, stream_base + idx, LANE_AUX)
        u = aux.uniform()
        s_star = u * gamma
        replay = RandomStream(master_seed, stream_base + idx, LANE_PATH)
        a = b = c = 0.0
        t = 0.0
        r = 0.0
        while True:
            za = replay.normal()
            zb = replay.normal()
            zc = replay.normal()
            a1 = a + s * za
            b1 = b + s * zb
            c1 = c + s * zc
            r1 = math.sqrt(a1 * a1 + b1 * b1 + c1 * c1)
            if bridge and r > 1.0 and r1 > 1.0 and (r - 1.0) * (r1 - 1.0) < THETA * dt:
                replay.uniform()
            if t + dt > s_star:
                tau0 = s_star - t
                frac = tau0 / dt
                var = tau0 * (dt - tau0) / dt
                sd = math.sqrt(var)
                ea = a + (a1 - a) * frac + sd * aux.normal()
                eb = b + (b1 - b) * frac + sd * aux.normal()
                ec = c + (c1 - c) * frac + sd * aux.normal()
                out_r[idx] = math.sqrt(ea * ea + eb * eb + ec * ec)
                break
            a, b, c, r = a1, b1, c1, r1
            t += dt
        out_gamma[idx] = gamma
        out_u[idx] = u
        out_status[idx] = STATUS_OK
