"""Vectorised numpy versions of the compiled kernels (same signatures)."""
import numpy as np

_ALIGN_EPS = 1e-300
GAIN_RTOL = 1e-14


def sym3_eigvalsh(a):
    return np.linalg.eigvalsh(np.asarray(a, dtype=float))


def frames(th, p1, p2):
    """C+ and C- for arrays of frame angles, each of shape (..., 3)."""
    th, p1, p2 = np.broadcast_arrays(np.asarray(th, float), np.asarray(p1, float), np.asarray(p2, float))
    st, ct = np.sin(th), np.cos(th)
    s1, c1 = np.sin(p1), np.cos(p1)
    s2, c2 = np.sin(p2), np.cos(p2)
    cp = np.stack([st * c1, st * s1, ct], axis=-1)
    cm = np.stack([ct * c1 * c2 - s1 * s2, ct * s1 * c2 + c1 * s2, -st * c2], axis=-1)
    return cp, cm


def _top2_sum(T, c):
    tc = np.einsum("ijk,...k->...ij", T, c)
    u = np.einsum("...ia,...ib->...ab", tc, tc)
    ev = np.linalg.eigvalsh(u)
    return np.trace(u, axis1=-2, axis2=-1) - ev[..., 0]


def b442_objective(T, th, p1, p2):
    cp, cm = frames(th, p1, p2)
    out = _top2_sum(T, cp) + _top2_sum(T, cm)
    return out if out.ndim else float(out)


def b442_grid(T, thetas, phis1, phis2):
    th, p1, p2 = np.meshgrid(thetas, phis1, phis2, indexing="ij")
    return b442_objective(T, th, p1, p2)


def _explore(T, x, fx, h):
    out = x.copy()
    for d in range(3):
        thr = fx + GAIN_RTOL * max(1.0, abs(fx))
        keep = out[d]
        for trial in (keep + h, keep - h):
            out[d] = trial
            f = b442_objective(T, *out)
            if f > thr:
                fx = f
                break
        else:
            out[d] = keep
    return out, fx


def b442_pattern(T, starts, step0, step_min, max_iter):
    starts = np.array(starts, dtype=float)
    xs = starts.copy()
    fs = np.empty(len(xs))
    conv = np.zeros(len(xs), dtype=bool)
    for s, x0 in enumerate(starts):
        base = x0.copy()
        fb = b442_objective(T, *base)
        h = float(step0)
        it = 0
        while h >= step_min and it < max_iter:
            it += 1
            x1, f1 = _explore(T, base, fb, h)
            if f1 <= fb:
                h *= 0.5
                continue
            while it < max_iter:
                it += 1
                xp = 2.0 * x1 - base
                base, fb = x1, f1
                x2, f2 = _explore(T, xp, b442_objective(T, *xp), h)
                if f2 > fb + GAIN_RTOL * max(1.0, abs(fb)):
                    x1, f1 = x2, f2
                else:
                    break
        xs[s] = base
        fs[s] = fb
        conv[s] = h < step_min
    return xs, fs, conv


def _contract(T, W, axes):
    A = axes[:, 0:2]
    B = axes[:, 2:4]
    C = axes[:, 4:6]
    return np.einsum("ijk,abc,rai,rbj,rck->r", T, W, A, B, C, optimize=True)


def trilinear_value(T, W, ax):
    return float(_contract(T, W, np.asarray(ax)[None])[0])


_SPECS = {
    0: "ijk,abc,rbj,rck->rai",
    1: "ijk,abc,rai,rck->rbj",
    2: "ijk,abc,rai,rbj->rck",
}


def _coefficient(T, W, axes, slot):
    party, which = divmod(slot, 2)
    others = [axes[:, 2 * p : 2 * p + 2] for p in range(3) if p != party]
    g = np.einsum(_SPECS[party], T, W, *others, optimize=True)
    return g[:, which]


def _normalize(ax):
    return ax / np.linalg.norm(ax, axis=-1, keepdims=True)


def _extrapolate(T, W, ax, before, val, max_doublings):
    best = val.copy()
    best_k = np.zeros(len(ax))
    live = np.ones(len(ax), dtype=bool)
    k = 1.0
    for _ in range(max_doublings):
        if not live.any():
            break
        f = _contract(T, W, _normalize(ax + k * (ax - before)))
        gain = live & (f > best)
        best[gain] = f[gain]
        best_k[gain] = k
        live &= gain
        k *= 2.0
    moved = best_k > 0
    if moved.any():
        kk = best_k[moved, None, None]
        ax[moved] = _normalize(ax[moved] + kk * (ax[moved] - before[moved]))
    return best


def ascent(T, W, init, tol, max_sweeps, max_doublings=12):
    axes = np.array(init, dtype=float, copy=True)
    R = axes.shape[0]
    prev = _contract(T, W, axes)
    sweeps = np.zeros(R, dtype=np.int64)
    conv = np.zeros(R, dtype=bool)
    active = np.ones(R, dtype=bool)
    for sweep in range(max_sweeps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sub = axes[idx]
        before = sub.copy()
        for slot in range(6):
            g = _coefficient(T, W, sub, slot)
            n = np.linalg.norm(g, axis=1)
            ok = n > _ALIGN_EPS
            sub[ok, slot] = g[ok] / n[ok, None]
        val = _contract(T, W, sub)
        if max_doublings > 0 and sweep > 0:
            val = _extrapolate(T, W, sub, before, val, max_doublings)
        axes[idx] = sub
        sweeps[idx] = sweep + 1
        done = val - prev[idx] < tol
        conv[idx[done]] = True
        active[idx[done]] = False
        prev[idx] = val
    return _contract(T, W, axes), axes, sweeps, conv
