"""Compiled inner loops: alternating axis ascent and the 4x4x2 frame search."""
import math

import numpy as np
from numba import njit

# 1 - r^2 below this sends the trigonometric solution to Jacobi: the
# closed form loses accuracy like eps / sqrt(1 - r^2) near double roots.
CLOSED_FORM_CUTOFF = 1e-10
_ALIGN_EPS = 1e-300
GAIN_RTOL = 1e-14


@njit(cache=True, nogil=True)
def jacobi_eigvalsh(a):
    """Cyclic Jacobi eigenvalues (ascending) of a symmetric 3x3 array."""
    m = a.copy()
    for _ in range(60):
        off = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
        scale = m[0, 0] ** 2 + m[1, 1] ** 2 + m[2, 2] ** 2 + off
        if off <= 1e-34 * scale or off == 0.0:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = m[p, q]
            if apq == 0.0:
                continue
            theta = (m[q, q] - m[p, p]) / (2.0 * apq)
            t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            for k in range(3):
                mkp = m[k, p]
                mkq = m[k, q]
                m[k, p] = c * mkp - s * mkq
                m[k, q] = s * mkp + c * mkq
            for k in range(3):
                mpk = m[p, k]
                mqk = m[q, k]
                m[p, k] = c * mpk - s * mqk
                m[q, k] = s * mpk + c * mqk
    ev = np.array([m[0, 0], m[1, 1], m[2, 2]])
    ev.sort()
    return ev


@njit(cache=True, nogil=True)
def sym3_eigvalsh(a):
    """Ascending eigenvalues of a real symmetric 3x3 matrix.

    Trigonometric solution of the characteristic cubic, with a Jacobi
    fallback when two roots (nearly) coincide.
    """
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    q = (a[0, 0] + a[1, 1] + a[2, 2]) / 3.0
    d0 = a[0, 0] - q
    d1 = a[1, 1] - q
    d2 = a[2, 2] - q
    p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1
    scale = abs(a[0, 0]) + abs(a[1, 1]) + abs(a[2, 2]) + math.sqrt(p1)
    if p2 <= (1e-14 * scale) ** 2:
        return np.array([q, q, q])
    p = math.sqrt(p2 / 6.0)
    b00 = d0 / p
    b11 = d1 / p
    b22 = d2 / p
    b01 = a[0, 1] / p
    b02 = a[0, 2] / p
    b12 = a[1, 2] / p
    r = 0.5 * (b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02))
    if 1.0 - r * r < CLOSED_FORM_CUTOFF:
        return jacobi_eigvalsh(a)
    phi = math.acos(r) / 3.0
    hi = q + 2.0 * p * math.cos(phi)
    lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return np.array([lo, 3.0 * q - hi - lo, hi])


@njit(cache=True, nogil=True)
def _frame(th, p1, p2, cp, cm):
    st = math.sin(th)
    ct = math.cos(th)
    s1 = math.sin(p1)
    c1 = math.cos(p1)
    s2 = math.sin(p2)
    c2 = math.cos(p2)
    cp[0] = st * c1
    cp[1] = st * s1
    cp[2] = ct
    cm[0] = ct * c1 * c2 - s1 * s2
    cm[1] = ct * s1 * c2 + c1 * s2
    cm[2] = -st * c2


@njit(cache=True, nogil=True)
def _top2_sum(T, cvec):
    # sum of the two largest eigenvalues of (T.c)^T (T.c) = trace - smallest
    tc = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            s = 0.0
            for k in range(3):
                s += T[i, j, k] * cvec[k]
            tc[i, j] = s
    u = np.zeros((3, 3))
    for a in range(3):
        for b in range(a, 3):
            s = 0.0
            for i in range(3):
                s += tc[i, a] * tc[i, b]
            u[a, b] = s
            u[b, a] = s
    ev = sym3_eigvalsh(u)
    return u[0, 0] + u[1, 1] + u[2, 2] - ev[0]


@njit(cache=True, nogil=True)
def b442_objective(T, th, p1, p2):
    """lambda_1^+ + lambda_2^+ + lambda_1^- + lambda_2^- for frame angles."""
    cp = np.empty(3)
    cm = np.empty(3)
    _frame(th, p1, p2, cp, cm)
    return _top2_sum(T, cp) + _top2_sum(T, cm)


@njit(cache=True, nogil=True)
def b442_grid(T, thetas, phis1, phis2):
    out = np.empty((thetas.size, phis1.size, phis2.size))
    for i in range(thetas.size):
        for j in range(phis1.size):
            for k in range(phis2.size):
                out[i, j, k] = b442_objective(T, thetas[i], phis1[j], phis2[k])
    return out


@njit(cache=True, nogil=True)
def _explore(T, x, fx, h, out):
    # coordinate-wise +h / -h trial moves; returns the improved value
    out[:] = x
    for d in range(3):
        thr = fx + GAIN_RTOL * max(1.0, abs(fx))
        keep = out[d]
        out[d] = keep + h
        f = b442_objective(T, out[0], out[1], out[2])
        if f > thr:
            fx = f
            continue
        out[d] = keep - h
        f = b442_objective(T, out[0], out[1], out[2])
        if f > thr:
            fx = f
            continue
        out[d] = keep
    return fx


@njit(cache=True, nogil=True)
def b442_pattern(T, starts, step0, step_min, max_iter):
    """Hooke-Jeeves pattern search from each start.

    Exploratory coordinate moves of size h, followed by pattern moves
    along the last successful displacement; h halves from ``step0`` until
    it drops below ``step_min``.
    """
    K = starts.shape[0]
    xs = starts.copy()
    fs = np.empty(K)
    conv = np.zeros(K, dtype=np.bool_)
    x1 = np.empty(3)
    xp = np.empty(3)
    x2 = np.empty(3)
    for s in range(K):
        base = xs[s].copy()
        fb = b442_objective(T, base[0], base[1], base[2])
        h = step0
        it = 0
        while h >= step_min and it < max_iter:
            it += 1
            f1 = _explore(T, base, fb, h, x1)
            if f1 <= fb:
                h *= 0.5
                continue
            while it < max_iter:
                it += 1
                for c in range(3):
                    xp[c] = 2.0 * x1[c] - base[c]
                base[:] = x1
                fb = f1
                fp = b442_objective(T, xp[0], xp[1], xp[2])
                f2 = _explore(T, xp, fp, h, x2)
                if f2 > fb + GAIN_RTOL * max(1.0, abs(fb)):
                    x1[:] = x2
                    f1 = f2
                else:
                    break
        xs[s] = base
        fs[s] = fb
        conv[s] = h < step_min
    return xs, fs, conv


@njit(cache=True, nogil=True)
def _coefficient(T, W, ax, slot, g):
    # gradient of sum_abc W[a,b,c] T(A_a, B_b, C_c) w.r.t. the axis in `slot`
    party = slot // 2
    which = slot % 2
    g[0] = 0.0
    g[1] = 0.0
    g[2] = 0.0
    for a in range(2):
        for b in range(2):
            for c in range(2):
                w = W[a, b, c]
                if w == 0.0:
                    continue
                if party == 0:
                    if a != which:
                        continue
                    u = ax[2 + b]
                    v = ax[4 + c]
                    for i in range(3):
                        s = 0.0
                        for j in range(3):
                            for k in range(3):
                                s += T[i, j, k] * u[j] * v[k]
                        g[i] += w * s
                elif party == 1:
                    if b != which:
                        continue
                    u = ax[a]
                    v = ax[4 + c]
                    for j in range(3):
                        s = 0.0
                        for i in range(3):
                            for k in range(3):
                                s += T[i, j, k] * u[i] * v[k]
                        g[j] += w * s
                else:
                    if c != which:
                        continue
                    u = ax[a]
                    v = ax[2 + b]
                    for k in range(3):
                        s = 0.0
                        for i in range(3):
                            for j in range(3):
                                s += T[i, j, k] * u[i] * v[j]
                        g[k] += w * s


@njit(cache=True, nogil=True)
def trilinear_value(T, W, ax):
    total = 0.0
    for a in range(2):
        for b in range(2):
            for c in range(2):
                w = W[a, b, c]
                if w == 0.0:
                    continue
                s = 0.0
                for i in range(3):
                    for j in range(3):
                        for k in range(3):
                            s += T[i, j, k] * ax[a, i] * ax[2 + b, j] * ax[4 + c, k]
                total += w * s
    return total


@njit(cache=True, nogil=True)
def _extrapolate(T, W, ax, before, val, trial, max_doublings):
    # try ax + k (ax - before), k = 1, 2, 4, ...; keep the best improvement
    best = val
    best_k = 0.0
    k = 1.0
    for _ in range(max_doublings):
        for slot in range(6):
            n = 0.0
            for c in range(3):
                v = ax[slot, c] + k * (ax[slot, c] - before[slot, c])
                trial[slot, c] = v
                n += v * v
            n = math.sqrt(n)
            for c in range(3):
                trial[slot, c] /= n
        f = trilinear_value(T, W, trial)
        if f > best:
            best = f
            best_k = k
        else:
            break
        k *= 2.0
    if best_k > 0.0:
        for slot in range(6):
            n = 0.0
            for c in range(3):
                v = ax[slot, c] + best_k * (ax[slot, c] - before[slot, c])
                ax[slot, c] = v
                n += v * v
            n = math.sqrt(n)
            for c in range(3):
                ax[slot, c] /= n
    return best


@njit(cache=True, nogil=True)
def ascent(T, W, init, tol, max_sweeps, max_doublings=12):
    """Alternating alignment ascent for a 2-2-2 setting Bell functional.

    ``init`` holds R starting configurations of six axes ordered
    (A1, A2, B1, B2, C1, C2).  Every sweep replaces each axis by the unit
    vector along its coefficient, which maximises the functional in that
    axis exactly.  After each sweep a step along the sweep displacement is
    tried and kept only if it improves the value, which speeds up the slow
    zig-zag near flat maxima without breaking monotonicity.
    """
    R = init.shape[0]
    axes = init.copy()
    values = np.empty(R)
    sweeps = np.zeros(R, dtype=np.int64)
    conv = np.zeros(R, dtype=np.bool_)
    g = np.empty(3)
    before = np.empty((6, 3))
    trial = np.empty((6, 3))
    for r in range(R):
        ax = axes[r]
        prev = trilinear_value(T, W, ax)
        for sweep in range(max_sweeps):
            before[:, :] = ax
            for slot in range(6):
                _coefficient(T, W, ax, slot, g)
                n = math.sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
                if n > _ALIGN_EPS:
                    ax[slot, 0] = g[0] / n
                    ax[slot, 1] = g[1] / n
                    ax[slot, 2] = g[2] / n
            val = trilinear_value(T, W, ax)
            if max_doublings > 0 and sweep > 0:
                val = _extrapolate(T, W, ax, before, val, trial, max_doublings)
            sweeps[r] = sweep + 1
            if val - prev < tol:
                conv[r] = True
                break
            prev = val
        values[r] = trilinear_value(T, W, ax)
    return values, axes, sweeps, conv
