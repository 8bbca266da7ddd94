"""Independent reference computations shared by the Bell tests."""
import numpy as np
from scipy.optimize import minimize

from decaybell.bell import MERMIN_W, SVETLICHNY_W


def random_axes(rng, n, k):
    v = rng.standard_normal((n, k, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def trilinear_batch(t, W, ax):
    """Mermin/Svetlichny values for axes of shape (n, 6, 3) in A1 A2 B1 B2 C1 C2 order."""
    g = np.einsum("ijk,nck->ncij", t, ax[:, 4:6])
    g = np.einsum("ncij,nbj->nbci", g, ax[:, 2:4])
    g = np.einsum("nbci,nai->nabc", g, ax[:, 0:2])
    return np.einsum("nabc,abc->n", g, W)


def b442_batch(t, ax):
    """4x4x2 values for axes of shape (n, 10, 3): A1..A4, B1..B4, C1, C2."""
    A, B, C = ax[:, 0:4], ax[:, 4:8], ax[:, 8:10]
    first = (np.einsum("ni,nj->nij", A[:, 0], B[:, 0] + B[:, 1])
             + np.einsum("ni,nj->nij", A[:, 1], B[:, 0] - B[:, 1]))
    second = (np.einsum("ni,nj->nij", A[:, 2], B[:, 2] + B[:, 3])
              + np.einsum("ni,nj->nij", A[:, 3], B[:, 2] - B[:, 3]))
    tp = np.einsum("ijk,nk->nij", t, C[:, 0] + C[:, 1])
    tm = np.einsum("ijk,nk->nij", t, C[:, 0] - C[:, 1])
    return np.einsum("nij,nij->n", first, tp) + np.einsum("nij,nij->n", second, tm)


def sampled_max(t, kinds, rng, n=100_000, chunk=25_000):
    """Best value per kind over ``n`` uniformly random axis sets.

    The first six axes of each ten-axis sample double as the Mermin and
    Svetlichny settings.
    """
    best = dict.fromkeys(kinds, -np.inf)
    for start in range(0, n, chunk):
        ax = random_axes(rng, min(chunk, n - start), 10)
        for kind in kinds:
            if kind == "b442":
                vals = b442_batch(t, ax)
            else:
                vals = trilinear_batch(t, MERMIN_W if kind == "mermin" else SVETLICHNY_W, ax[:, :6])
            best[kind] = max(best[kind], float(vals.max()))
    return best


def refined_b442(t, rng, samples=20_000, keep=6):
    """Random sampling of all ten axes followed by BFGS on the raw vectors."""
    ax = random_axes(rng, samples, 10)
    vals = b442_batch(t, ax)
    best = -np.inf
    for i in np.argsort(-vals)[:keep]:
        def f(x):
            a = x.reshape(1, 10, 3)
            a = a / np.linalg.norm(a, axis=-1, keepdims=True)
            return -b442_batch(t, a)[0]
        res = minimize(f, ax[i].ravel(), method="BFGS", options={"gtol": 1e-10})
        best = max(best, -res.fun)
    return best
