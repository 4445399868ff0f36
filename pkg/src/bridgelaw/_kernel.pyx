# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled path-simulation kernel.

Bit-identical mirror of :mod:`bridgelaw._kernel_py`; see that module for the
algorithm documentation.  Keep the two in sync: the step logic, draw order
and floating-point expression shapes must match exactly.
"""

from libc.stdint cimport uint64_t, int64_t
from libc.math cimport sqrt, log, exp, NAN, INFINITY

cimport cython

BACKEND = "compiled"

DEF N_LAYERS = 128
DEF KMAXC = 26

cdef double THETA = 20.0
cdef double U53 = 2.0 ** -53
cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15

cdef double ZIG_XC[N_LAYERS + 1]
cdef double ZIG_FC[N_LAYERS + 1]
cdef double ZIG_RC = 0.0
cdef double POW4[KMAXC + 1]


def _init_tables():
    # Shared tables: built once in rng.py so both backends use identical
    # doubles.
    global ZIG_RC
    from . import rng as _rng_mod

    cdef int i
    for i in range(N_LAYERS + 1):
        ZIG_XC[i] = _rng_mod.ZIG_X[i]
        ZIG_FC[i] = _rng_mod.ZIG_F[i]
    ZIG_RC = _rng_mod.ZIG_R
    for i in range(KMAXC + 1):
        POW4[i] = float(4 ** i)


_init_tables()

KMAX = KMAXC
STATUS_OK = 0
STATUS_EXHAUSTED = 1
STATUS_NO_CROSSING = 2
MODE_THIT = 0
MODE_TRIPLET = 1

cdef int LANE_PATH_C = 0
cdef int LANE_AUX_C = 1


cdef struct Rng:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _mix64(uint64_t v) nogil:
    v ^= v >> 30
    v = v * <uint64_t>0xBF58476D1CE4E5B9
    v ^= v >> 27
    v = v * <uint64_t>0x94D049BB133111EB
    v ^= v >> 31
    return v


cdef inline void _seed(Rng* r, uint64_t master, uint64_t stream, uint64_t lane) nogil:
    cdef uint64_t z = _mix64(master + GOLDEN)
    z = _mix64(z ^ (stream + <uint64_t>0xBF58476D1CE4E5B9))
    z = _mix64(z ^ (lane + <uint64_t>0x94D049BB133111EB))
    z = z + GOLDEN
    r.s0 = _mix64(z)
    z = z + GOLDEN
    r.s1 = _mix64(z)
    z = z + GOLDEN
    r.s2 = _mix64(z)
    z = z + GOLDEN
    r.s3 = _mix64(z)
    if (r.s0 | r.s1 | r.s2 | r.s3) == 0:
        r.s0 = 1


cdef inline uint64_t _next(Rng* r) nogil:
    cdef uint64_t result = _rotl(r.s0 + r.s3, 23) + r.s0
    cdef uint64_t t = r.s1 << 17
    r.s2 ^= r.s0
    r.s3 ^= r.s1
    r.s1 ^= r.s2
    r.s0 ^= r.s3
    r.s2 ^= t
    r.s3 = _rotl(r.s3, 45)
    return result


cdef inline double _unif(Rng* r) nogil:
    return <double>(_next(r) >> 11) * U53


cdef inline double _normal(Rng* r) nogil:
    cdef uint64_t rr
    cdef int i
    cdef double sign, u, x, y, xt, yt
    while True:
        rr = _next(r)
        i = <int>(rr & 127)
        sign = -1.0 if ((rr >> 7) & 1) else 1.0
        u = <double>(rr >> 11) * U53
        x = u * ZIG_XC[i]
        if x < ZIG_XC[i + 1]:
            return sign * x
        if i == 0:
            while True:
                xt = -log(1.0 - _unif(r)) / ZIG_RC
                yt = -log(1.0 - _unif(r))
                if yt + yt > xt * xt:
                    return sign * (ZIG_RC + xt)
        else:
            y = ZIG_FC[i] + _unif(r) * (ZIG_FC[i + 1] - ZIG_FC[i])
            if y < exp(-0.5 * x * x):
                return sign * x


def fill_uniforms(uint64_t master_seed, uint64_t stream_index, uint64_t lane, double[::1] out):
    cdef Rng rng
    cdef Py_ssize_t i, n = out.shape[0]
    _seed(&rng, master_seed, stream_index, lane)
    with nogil:
        for i in range(n):
            out[i] = _unif(&rng)


def fill_normals(uint64_t master_seed, uint64_t stream_index, uint64_t lane, double[::1] out):
    cdef Rng rng
    cdef Py_ssize_t i, n = out.shape[0]
    _seed(&rng, master_seed, stream_index, lane)
    with nogil:
        for i in range(n):
            out[i] = _normal(&rng)


cdef inline int _scale_index(int k, double w, double m, double level, double d0) nogil:
    cdef double d_gate, dm
    if d0 <= 0.0:
        return 0
    d_gate = level - w
    dm = (m - w) + d0
    if dm < d_gate:
        d_gate = dm
    while k > 0 and d_gate < d0 * <double>(<int64_t>1 << k):
        k -= 1
    while k < KMAXC and d_gate >= d0 * <double>(<int64_t>2 << k):
        k += 1
    return k


cdef int _pass1(Rng* rng, double dt, double d0, double level, bint bridge,
                int64_t max_steps, double snap_level,
                double* t_hit_out, double* snap_out) nogil:
    cdef double w = 0.0, m = 0.0, t_sum = 0.0, t_comp = 0.0
    cdef double h, s, z, x0, x1, v, diff, mstep, t_hit, y, tt
    cdef double snap_t = -1.0
    cdef bint want_snap = snap_level > 0.0
    cdef int k = 0
    cdef int64_t steps = 0
    while steps < max_steps:
        steps += 1
        k = _scale_index(k, w, m, level, d0)
        h = dt * POW4[k]
        s = sqrt(h)
        z = _normal(rng)
        x0 = w
        x1 = w + s * z
        if bridge:
            if (m - x0) * (m - x1) < THETA * h:
                v = 1.0 - _unif(rng)
                diff = x1 - x0
                mstep = 0.5 * (x0 + x1 + sqrt(diff * diff - 2.0 * h * log(v)))
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
            t_hit_out[0] = t_hit
            snap_out[0] = snap_t
            return 0
        w = x1
        y = h - t_comp
        tt = t_sum + y
        t_comp = (tt - t_sum) - y
        t_sum = tt
    t_hit_out[0] = NAN
    snap_out[0] = NAN
    return 1


cdef void _pass2_eval(Rng* rng, Rng* aux, double dt, double d0, double level,
                      bint bridge, double s_star,
                      double* w_out, double* m_out) nogil:
    cdef double w = 0.0, m = 0.0, t_sum = 0.0, t_comp = 0.0
    cdef double h, s, z, x0, x1, v, diff, mstep, y, tt, t0
    cdef double m_before, tau0, mean, var, w_s, m_s
    cdef int k = 0
    cdef bint hit
    while True:
        k = _scale_index(k, w, m, level, d0)
        h = dt * POW4[k]
        s = sqrt(h)
        z = _normal(rng)
        x0 = w
        x1 = w + s * z
        m_before = m
        hit = False
        if bridge:
            if (m - x0) * (m - x1) < THETA * h:
                v = 1.0 - _unif(rng)
                diff = x1 - x0
                mstep = 0.5 * (x0 + x1 + sqrt(diff * diff - 2.0 * h * log(v)))
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
            w_out[0] = level
            m_out[0] = level
            return
        if t_sum > s_star:
            tau0 = s_star - t0
            if tau0 < 0.0:
                tau0 = 0.0
            mean = x0 + (x1 - x0) * (tau0 / h)
            var = tau0 * (h - tau0) / h
            w_s = mean + sqrt(var) * _normal(aux)
            if w_s > level:
                w_s = level
            # running max through s_star: include the peak of the partial
            # bridge (t0 -> s_star), sampled from its exact conditional law
            v = 1.0 - _unif(aux)
            diff = w_s - x0
            mstep = 0.5 * (x0 + w_s + sqrt(diff * diff - 2.0 * tau0 * log(v)))
            if mstep > level:
                mstep = level
            m_s = m_before if m_before > mstep else mstep
            w_out[0] = w_s
            m_out[0] = m_s
            return
        w = x1


def run_path_batch(uint64_t master_seed, uint64_t stream_base,
                   Py_ssize_t lo, Py_ssize_t hi,
                   double dt, double d0, double level, bint bridge,
                   int64_t max_steps, int mode, double snap_level,
                   double[::1] out_t, double[::1] out_w, double[::1] out_m,
                   double[::1] out_u, double[::1] out_sign, double[::1] out_snap,
                   signed char[::1] out_status):
    cdef Rng rng, aux, replay
    cdef Py_ssize_t i
    cdef int status
    cdef double t_hit, snap_t, u, su, w_s, m_s
    with nogil:
        for i in range(lo, hi):
            _seed(&rng, master_seed, stream_base + <uint64_t>i, LANE_PATH_C)
            status = _pass1(&rng, dt, d0, level, bridge, max_steps, snap_level,
                            &t_hit, &snap_t)
            out_status[i] = <signed char>status
            out_snap[i] = snap_t
            out_t[i] = t_hit
            if status != 0 or mode == 0:
                out_w[i] = NAN
                out_m[i] = NAN
                out_u[i] = NAN
                out_sign[i] = 0.0
                continue
            _seed(&aux, master_seed, stream_base + <uint64_t>i, LANE_AUX_C)
            u = _unif(&aux)
            su = _unif(&aux)
            _seed(&replay, master_seed, stream_base + <uint64_t>i, LANE_PATH_C)
            _pass2_eval(&replay, &aux, dt, d0, level, bridge, u * t_hit, &w_s, &m_s)
            out_w[i] = w_s
            out_m[i] = m_s
            out_u[i] = u
            out_sign[i] = 1.0 if su < 0.5 else -1.0


def run_hp_batch(uint64_t master_seed, uint64_t stream_base,
                 Py_ssize_t lo, Py_ssize_t hi,
                 double dt, double d0, double level, bint bridge, int64_t max_steps,
                 double[::1] out_i1, double[::1] out_i2, double[::1] out_i3,
                 double[::1] out_j1, double[::1] out_j2, double[::1] out_j3,
                 double[::1] out_k1, double[::1] out_k2, double[::1] out_k3,
                 double[::1] out_t, signed char[::1] out_status):
    cdef Rng rng
    cdef Py_ssize_t idx
    cdef double w, m, t_sum, t_comp, h, s, z, x0, x1, m0, m1, v, diff, mstep
    cdef double t_hit, hp, lv1, lv2, lv3, y, tt
    cdef double i1, i2, i3, j1, j2, j3, k1, k2, k3
    cdef int k, status
    cdef int64_t steps
    with nogil:
        for idx in range(lo, hi):
            _seed(&rng, master_seed, stream_base + <uint64_t>idx, LANE_PATH_C)
            w = 0.0
            m = 0.0
            t_sum = 0.0
            t_comp = 0.0
            k = 0
            i1 = i2 = i3 = 0.0
            j1 = j2 = j3 = 0.0
            k1 = k2 = k3 = 0.0
            steps = 0
            status = 1
            t_hit = NAN
            while steps < max_steps:
                steps += 1
                k = _scale_index(k, w, m, level, d0)
                h = dt * POW4[k]
                s = sqrt(h)
                z = _normal(&rng)
                x0 = w
                m0 = m
                x1 = w + s * z
                if bridge:
                    if (m - x0) * (m - x1) < THETA * h:
                        v = 1.0 - _unif(&rng)
                        diff = x1 - x0
                        mstep = 0.5 * (x0 + x1 + sqrt(diff * diff - 2.0 * h * log(v)))
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
                    status = 0
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
            out_status[idx] = <signed char>status
            out_t[idx] = t_hit
            if status == 0:
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
                out_i1[idx] = NAN
                out_i2[idx] = NAN
                out_i3[idx] = NAN
                out_j1[idx] = NAN
                out_j2[idx] = NAN
                out_j3[idx] = NAN
                out_k1[idx] = NAN
                out_k2[idx] = NAN
                out_k3[idx] = NAN


def run_slice_batch(uint64_t master_seed, uint64_t stream_base,
                    Py_ssize_t lo, Py_ssize_t hi,
                    double dt, double d0, bint bridge, double t_end,
                    double[::1] out_w, double[::1] out_m):
    cdef Rng rng
    cdef Py_ssize_t i
    cdef double w, m, t_sum, t_comp, rem, h, s, z, x0, x1, v, diff, mstep, y, tt
    cdef int k
    with nogil:
        for i in range(lo, hi):
            _seed(&rng, master_seed, stream_base + <uint64_t>i, LANE_PATH_C)
            w = 0.0
            m = 0.0
            t_sum = 0.0
            t_comp = 0.0
            k = 0
            while True:
                rem = t_end - t_sum
                if rem <= 0.0:
                    break
                k = _scale_index(k, w, m, INFINITY, d0)
                h = dt * POW4[k]
                if h > rem:
                    h = rem
                s = sqrt(h)
                z = _normal(&rng)
                x0 = w
                x1 = w + s * z
                if bridge:
                    if (m - x0) * (m - x1) < THETA * h:
                        v = 1.0 - _unif(&rng)
                        diff = x1 - x0
                        mstep = 0.5 * (x0 + x1 + sqrt(diff * diff - 2.0 * h * log(v)))
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
    import numpy as np

    cdef Rng rng
    _seed(&rng, <uint64_t>master_seed, <uint64_t>stream_index, LANE_PATH_C)
    su = np.array([rng.s0, rng.s1, rng.s2, rng.s3, 0], dtype=np.uint64)
    sf = np.zeros(4, dtype=np.float64)
    return (su, sf)


def fill_path_chunk(state, double dt, double level, bint bridge,
                    double[::1] out_w, double[::1] out_m, double[::1] out_t):
    cdef uint64_t[::1] su = state[0]
    cdef double[::1] sf = state[1]
    cdef Rng rng
    cdef double w = sf[0], m = sf[1], t_sum = sf[2], t_comp = sf[3]
    cdef Py_ssize_t n = out_w.shape[0]
    cdef Py_ssize_t i, filled = 0
    cdef double s = sqrt(dt)
    cdef double z, x0, x1, v, t_hit = NAN, y, tt
    cdef bint hit = False, crossed
    rng.s0 = su[0]
    rng.s1 = su[1]
    rng.s2 = su[2]
    rng.s3 = su[3]
    with nogil:
        for i in range(n):
            z = _normal(&rng)
            x0 = w
            x1 = w + s * z
            if x1 > m:
                m = x1
            crossed = False
            if x1 >= level:
                t_hit = t_sum + dt * ((level - x0) / (x1 - x0))
                crossed = True
            elif bridge and (level - x0) * (level - x1) < THETA * dt:
                v = 1.0 - _unif(&rng)
                if v < exp(-2.0 * (level - x0) * (level - x1) / dt):
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
    sf[0] = w
    sf[1] = m
    sf[2] = t_sum
    sf[3] = t_comp
    su[0] = rng.s0
    su[1] = rng.s1
    su[2] = rng.s2
    su[3] = rng.s3
    su[4] = su[4] + <uint64_t>filled
    return filled, bool(hit), t_hit


def run_bes3_batch(uint64_t master_seed, uint64_t stream_base,
                   Py_ssize_t lo, Py_ssize_t hi,
                   double dt, bint bridge, double horizon,
                   double[::1] out_gamma, double[::1] out_r, double[::1] out_u,
                   signed char[::1] out_status):
    cdef Rng rng, aux, replay
    cdef Py_ssize_t idx
    cdef double a, b, c, r, t, s, gamma, za, zb, zc, a1, b1, c1, r1, v
    cdef double u, s_star, tau0, frac, var, sd, ea, eb, ec
    cdef int64_t n_steps, j
    s = sqrt(dt)
    with nogil:
        for idx in range(lo, hi):
            _seed(&rng, master_seed, stream_base + <uint64_t>idx, LANE_PATH_C)
            a = b = c = 0.0
            r = 0.0
            t = 0.0
            gamma = -1.0
            n_steps = <int64_t>(horizon / dt + 0.5)
            for j in range(n_steps):
                za = _normal(&rng)
                zb = _normal(&rng)
                zc = _normal(&rng)
                a1 = a + s * za
                b1 = b + s * zb
                c1 = c + s * zc
                r1 = sqrt(a1 * a1 + b1 * b1 + c1 * c1)
                if (r - 1.0) * (r1 - 1.0) <= 0.0 and r1 != r:
                    gamma = t + dt * ((1.0 - r) / (r1 - r))
                elif bridge and r > 1.0 and r1 > 1.0 and (r - 1.0) * (r1 - 1.0) < THETA * dt:
                    v = 1.0 - _unif(&rng)
                    if v < exp(-2.0 * (r - 1.0) * (r1 - 1.0) / dt):
                        gamma = t + 0.5 * dt
                a = a1
                b = b1
                c = c1
                r = r1
                t += dt
            if gamma <= 0.0:
                out_status[idx] = 2
                out_gamma[idx] = NAN
                out_r[idx] = NAN
                out_u[idx] = NAN
                continue
            _seed(&aux, master_seed, stream_base + <uint64_t>idx, LANE_AUX_C)
            u = _unif(&aux)
            s_star = u * gamma
            _seed(&replay, master_seed, stream_base + <uint64_t>idx, LANE_PATH_C)
            a = b = c = 0.0
            t = 0.0
            r = 0.0
            while True:
                za = _normal(&replay)
                zb = _normal(&replay)
                zc = _normal(&replay)
                a1 = a + s * za
                b1 = b + s * zb
                c1 = c + s * zc
                r1 = sqrt(a1 * a1 + b1 * b1 + c1 * c1)
                if bridge and r > 1.0 and r1 > 1.0 and (r - 1.0) * (r1 - 1.0) < THETA * dt:
                    _unif(&replay)
                if t + dt > s_star:
                    tau0 = s_star - t
                    frac = tau0 / dt
                    var = tau0 * (dt - tau0) / dt
                    sd = sqrt(var)
                    ea = a + (a1 - a) * frac + sd * _normal(&aux)
                    eb = b + (b1 - b) * frac + sd * _normal(&aux)
                    ec = c + (c1 - c) * frac + sd * _normal(&aux)
                    out_r[idx] = sqrt(ea * ea + eb * eb + ec * ec)
                    break
                a = a1
                b = b1
                c = c1
                r = r1
                t += dt
            out_gamma[idx] = gamma
            out_u[idx] = u
            out_status[idx] = 0
