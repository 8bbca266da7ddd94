"""Mermin, Svetlichny and tight 4x4x2 observables: evaluation and optimisation.

All observables only see the 3x3x3 block ``T_ijk`` of the correlation
tensor.  Mermin and Svetlichny are written as ``sum_abc W[a,b,c] T(A_a, B_b,
C_c)`` with a 2x2x2 sign table ``W``; the 4x4x2 observable has its own
contraction and a semi-analytic optimiser over the orientation of the
orthonormal pair (C+, C-).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import _kernels
from .errors import AxisCountMismatch, DegenerateFrame
from .states import CorrelationTensor, permute_qubits

UNIT_TOL = 1e-12
FRAME_EPS = 1e-12

MERMIN_BOUND = 4.0
SVETLICHNY_BOUND = 4.0 * math.sqrt(2.0)
B442_BOUND = 8.0


class ObservableKind(str, enum.Enum):
    MERMIN = "mermin"
    SVETLICHNY = "svetlichny"
    B442 = "b442"
    B442SYM = "b442sym"


_COUNTS = {
    ObservableKind.MERMIN: (2, 2, 2),
    ObservableKind.SVETLICHNY: (2, 2, 2),
    ObservableKind.B442: (4, 4, 2),
}

# W[a, b, c] multiplies T(A_{a+1}, B_{b+1}, C_{c+1})
MERMIN_W = np.zeros((2, 2, 2))
MERMIN_W[0, 0, 1] = MERMIN_W[0, 1, 0] = MERMIN_W[1, 0, 0] = 1.0
MERMIN_W[1, 1, 1] = -1.0

SVETLICHNY_W = np.array(
    [[[1.0 if a + b + c <= 1 else -1.0 for c in range(2)] for b in range(2)] for a in range(2)]
)

_WEIGHTS = {ObservableKind.MERMIN: MERMIN_W, ObservableKind.SVETLICHNY: SVETLICHNY_W}

# slot order (A-role, B-role, C-role) for the three 4x4x2 assignments
B442_PERMUTATIONS = {"442": "ABC", "424": "ACB", "244": "CBA"}


def _block(T) -> np.ndarray:
    if isinstance(T, CorrelationTensor):
        return np.ascontiguousarray(T.block)
    arr = np.asarray(T, dtype=float)
    if arr.shape == (4, 4, 4):
        return np.ascontiguousarray(arr[1:, 1:, 1:])
    if arr.shape == (3, 3, 3):
        return np.ascontiguousarray(arr)
    raise ValueError(f"expected a CorrelationTensor or a 4x4x4 / 3x3x3 array, got shape {arr.shape}")


def _unit_rows(vs, name: str) -> np.ndarray:
    arr = np.array(vs, dtype=float).reshape(-1, 3)
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError(f"{name} axes must be unit vectors (norms {norms})")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AxisSet:
    """Measurement axes per party, each a (k, 3) array of unit vectors."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in "ABC":
            object.__setattr__(self, name, _unit_rows(getattr(self, name), name))

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.A), len(self.B), len(self.C))

    def to_json_dict(self) -> dict:
        return {p: getattr(self, p).tolist() for p in "ABC"}

    @classmethod
    def from_json_dict(cls, data: dict) -> "AxisSet":
        return cls(data["A"], data["B"], data["C"])

    @classmethod
    def from_flat(cls, ax: np.ndarray) -> "AxisSet":
        """Build from the kernel layout (A1, A2, B1, B2, C1, C2)."""
        ax = np.asarray(ax, dtype=float)
        ax = ax / np.linalg.norm(ax, axis=1, keepdims=True)
        return cls(ax[0:2], ax[2:4], ax[4:6])

    def flat(self) -> np.ndarray:
        return np.concatenate([self.A, self.B, self.C])


@dataclass(frozen=True)
class OptResult:
    kind: ObservableKind
    value: float
    axes: AxisSet
    restarts_used: int
    converged: bool
    internal_angles: tuple[float, float, float] | None = None
    permutation: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "value": self.value,
            "axes": self.axes.to_json_dict(),
            "restarts_used": self.restarts_used,
            "converged": self.converged,
        }
        if self.internal_angles is not None:
            out["internal_angles"] = list(self.internal_angles)
        if self.permutation is not None:
            out["permutation"] = self.permutation
        return out


def _kind(kind) -> ObservableKind:
    return kind if isinstance(kind, ObservableKind) else ObservableKind(str(kind).lower())


def evaluate(T, axes: AxisSet, kind) -> float:
    """Expectation value of the observable for fixed axes."""
    kind = _kind(kind)
    if kind not in _COUNTS:
        raise AxisCountMismatch(f"{kind.value} is an optimiser-level construct; evaluate B442 on a permuted tensor")
    if axes.counts != _COUNTS[kind]:
        raise AxisCountMismatch(f"{kind.value} needs {_COUNTS[kind]} axes per party, got {axes.counts}")
    t = _block(T)
    if kind is ObservableKind.B442:
        A, B, C = axes.A, axes.B, axes.C
        first = np.outer(A[0], B[0] + B[1]) + np.outer(A[1], B[0] - B[1])
        second = np.outer(A[2], B[2] + B[3]) + np.outer(A[3], B[2] - B[3])
        coef = first[:, :, None] * (C[0] + C[1]) + second[:, :, None] * (C[0] - C[1])
        return float(np.sum(coef * t))
    return float(np.einsum("ijk,abc,ai,bj,ck->", t, _WEIGHTS[kind], axes.A, axes.B, axes.C))


# ---------------------------------------------------------------- Mermin / Svetlichny


def _sphere_points(u: np.ndarray) -> np.ndarray:
    z = 2.0 * u[..., 0] - 1.0
    phi = 2.0 * math.pi * u[..., 1]
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def initial_axes(restarts: int, seed: int = 0) -> np.ndarray:
    """Deterministic starting configurations, shape (restarts, 6, 3).

    B and C axes come from a scrambled Halton sequence mapped to the
    sphere; A axes are placeholders because the first update of every
    sweep realigns them.
    """
    u = qmc.Halton(d=8, scramble=True, seed=seed).random(restarts).reshape(restarts, 4, 2)
    out = np.zeros((restarts, 6, 3))
    out[:, 0:2, 2] = 1.0
    out[:, 2:6] = _sphere_points(u)
    return out


def _optimize_222(T, kind, restarts, tol, seed, max_sweeps, screen_sweeps=60, polish=4) -> OptResult:
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    t = _block(T)
    W = _WEIGHTS[kind]
    kern = _kernels.get()
    init = initial_axes(restarts, seed)
    # short run for every start, then full convergence for the leaders only
    values, axes, sweeps, conv = kern.ascent(t, W, init, float(tol), int(min(screen_sweeps, max_sweeps)))
    lead = np.argsort(-values, kind="stable")[:polish]
    lead = lead[~conv[lead]]
    if lead.size:
        v2, a2, s2, c2 = kern.ascent(t, W, axes[lead], float(tol), int(max_sweeps))
        values[lead], axes[lead], conv[lead] = v2, a2, c2
        sweeps[lead] += s2
    best = int(np.argmax(values))  # first maximum wins
    axset = AxisSet.from_flat(axes[best])
    return OptResult(
        kind=kind,
        value=evaluate(t, axset, kind),
        axes=axset,
        restarts_used=restarts,
        converged=bool(conv[best]),
        diagnostics={"sweeps": int(sweeps[best]), "backend": _kernels.backend_name()},
    )


def optimize_mermin(T, restarts: int = 64, tol: float = 1e-12, seed: int = 0,
                    max_sweeps: int = 20000) -> OptResult:
    """Maximise the Mermin value by alternating exact axis alignment."""
    return _optimize_222(T, ObservableKind.MERMIN, restarts, tol, seed, max_sweeps)


def optimize_svetlichny(T, restarts: int = 64, tol: float = 1e-12, seed: int = 0,
                        max_sweeps: int = 20000) -> OptResult:
    """Maximise the Svetlichny value by alternating exact axis alignment."""
    return _optimize_222(T, ObservableKind.SVETLICHNY, restarts, tol, seed, max_sweeps)


def alignment_ascent_path(T, kind, init: np.ndarray, sweeps: int = 50) -> np.ndarray:
    """Objective after every single-axis update of a plain ascent run.

    Used to check monotonicity; returns ``1 + 6 * sweeps`` values.
    """
    kind = _kind(kind)
    t = _block(T)
    W = _WEIGHTS[kind]
    ax = np.array(init, dtype=float).reshape(6, 3)
    K = _kernels._numpy
    path = [K.trilinear_value(t, W, ax)]
    for _ in range(sweeps):
        for slot in range(6):
            g = K._coefficient(t, W, ax[None], slot)[0]
            n = np.linalg.norm(g)
            if n > 0:
                ax[slot] = g / n
            path.append(K.trilinear_value(t, W, ax))
    return np.array(path)


# ---------------------------------------------------------------- tight 4x4x2


def frame_vectors(theta: float, phi1: float, phi2: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair (C+, C-) for polar angle theta and azimuths phi1, phi2."""
    cp, cm = _kernels._numpy.frames(theta, phi1, phi2)
    return cp, cm


def canonical_angles(theta: float, phi1: float, phi2: float) -> tuple[float, float, float]:
    """Map any angle triple to theta in [0, pi], phi in [0, 2 pi) with the same frame."""
    two_pi = 2.0 * math.pi
    theta = theta % two_pi
    if theta > math.pi:
        theta, phi1, phi2 = two_pi - theta, phi1 + math.pi, phi2 + math.pi
    return float(theta), _wrap(phi1), _wrap(phi2)


def _wrap(x: float) -> float:
    x = x % (2.0 * math.pi)
    # tiny negatives round up to exactly 2 pi
    return 0.0 if x == 2.0 * math.pi else float(x)


def _u_matrices(t, theta, phi1, phi2):
    cp, cm = frame_vectors(theta, phi1, phi2)
    tp = np.einsum("ijk,k->ij", t, cp)
    tm = np.einsum("ijk,k->ij", t, cm)
    return (cp, tp, tp.T @ tp), (cm, tm, tm.T @ tm)


def b442_lambda_sum(T, theta: float, phi1: float, phi2: float) -> float:
    """lambda_1^+ + lambda_2^+ + lambda_1^- + lambda_2^- via LAPACK."""
    t = _block(T)
    total = 0.0
    for _, _, u in _u_matrices(t, theta, phi1, phi2):
        ev = np.linalg.eigvalsh(u)
        total += ev[1] + ev[2]
    return float(max(total, 0.0))


def b442_frame_value(T, theta: float, phi1: float, phi2: float) -> float:
    """Optimal 4x4x2 value for a fixed (C+, C-) frame."""
    return 4.0 * math.sqrt(b442_lambda_sum(T, theta, phi1, phi2))


def _aligned(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < FRAME_EPS:
        # zero-weight term: any unit vector realises the same value
        return np.array([0.0, 0.0, 1.0])
    return v / n


def reconstruct_b442_axes(T, angles) -> AxisSet:
    """Explicit ten axes that realise the optimal value for a given frame.

    Raises DegenerateFrame when both T+ and T- vanish (no direction is
    preferred and the C weights are undefined).
    """
    t = _block(T)
    (cp, tp, up), (cm, tm, um) = _u_matrices(t, *angles)
    A, B, lam = [], [], []
    for tc, u in ((tp, up), (tm, um)):
        w, V = np.linalg.eigh(u)
        l1, l2 = max(w[2], 0.0), max(w[1], 0.0)
        d1, d2 = V[:, 2], V[:, 1]
        A += [_aligned(tc @ d1), _aligned(tc @ d2)]
        s = math.hypot(math.sqrt(l1), math.sqrt(l2))
        if s < FRAME_EPS:
            c_, s_ = 1.0, 0.0
        else:
            c_, s_ = math.sqrt(l1) / s, math.sqrt(l2) / s
        B += [c_ * d1 + s_ * d2, c_ * d1 - s_ * d2]
        lam.append(l1 + l2)
    X, Y = math.sqrt(lam[0]), math.sqrt(lam[1])
    r = math.hypot(X, Y)
    if r < FRAME_EPS:
        raise DegenerateFrame("T+ and T- both vanish for this frame")
    cg, sg = X / r, Y / r
    C = [cg * cp + sg * cm, cg * cp - sg * cm]
    return AxisSet(A, B, C)


def _grid_candidates(F: np.ndarray, count: int) -> list[tuple[int, int, int]]:
    """Indices of the best local maxima of the grid (periodic in both phis)."""
    n0 = F.shape[0]
    padded = np.pad(F, ((1, 1), (0, 0), (0, 0)), mode="constant", constant_values=-np.inf)
    is_max = np.ones(F.shape, dtype=bool)
    for d0 in (-1, 0, 1):
        sl = padded[1 + d0 : 1 + d0 + n0]
        for d1 in (-1, 0, 1):
            for d2 in (-1, 0, 1):
                if d0 == d1 == d2 == 0:
                    continue
                is_max &= F >= np.roll(np.roll(sl, -d1, axis=1), -d2, axis=2)
    order = np.argsort(-F, axis=None, kind="stable")
    flat_max = is_max.ravel()
    picks = [i for i in order if flat_max[i]][:count]
    if len(picks) < count:
        chosen = set(picks)
        picks += [i for i in order if i not in chosen][: count - len(picks)]
    return [tuple(int(v) for v in np.unravel_index(i, F.shape)) for i in picks]


def optimize_b442(T, grid: int = 24, starts: int = 8, step0: float = 0.1,
                  step_min: float = 1e-7, max_iter: int = 200000) -> OptResult:
    """Maximise the tight 4x4x2 value over the (C+, C-) frame.

    A ``grid``^3 scan of (theta, phi1, phi2) seeds a Hooke-Jeeves pattern search
    from the ``starts`` best grid local maxima.
    """
    t = _block(T)
    kern = _kernels.get()
    thetas = (np.arange(grid) + 0.5) * math.pi / grid
    phis = np.arange(grid) * 2.0 * math.pi / grid
    F = kern.b442_grid(t, thetas, phis, phis)
    cells = _grid_candidates(F, starts)
    x0 = np.array([[thetas[i], phis[j], phis[k]] for i, j, k in cells])
    xs, _, conv = kern.b442_pattern(t, x0, float(step0), float(step_min), int(max_iter))

    best_f, best_idx, best_angles = -1.0, 0, None
    for s, x in enumerate(xs):
        ang = canonical_angles(*x)
        f = b442_lambda_sum(t, *ang)
        if f > best_f:
            best_f, best_idx, best_angles = f, s, ang
    value = 4.0 * math.sqrt(best_f)
    try:
        axes = reconstruct_b442_axes(t, best_angles)
    except DegenerateFrame:
        z = np.array([0.0, 0.0, 1.0])
        axes = AxisSet([z] * 4, [z] * 4, [z] * 2)
    return OptResult(
        kind=ObservableKind.B442,
        value=value,
        axes=axes,
        restarts_used=len(xs),
        converged=bool(conv[best_idx]),
        internal_angles=best_angles,
        diagnostics={"grid_best": float(4.0 * math.sqrt(max(F.max(), 0.0))), "backend": _kernels.backend_name()},
    )


def optimize_b442_sym(T, **kwargs) -> OptResult:
    """Best tight 4x4x2 value over the three choices of the two-setting party.

    The returned axes refer to the permuted tensor named by ``permutation``
    (slot order of the A, B and C roles); ties keep the first of 442, 424, 244.
    """
    if not isinstance(T, CorrelationTensor):
        arr = np.asarray(T, dtype=float)
        if arr.shape == (3, 3, 3):
            full = np.zeros((4, 4, 4))
            full[1:, 1:, 1:] = arr
            arr = full
        T = CorrelationTensor(arr)
    best = None
    per_role = {}
    for label, perm in B442_PERMUTATIONS.items():
        res = optimize_b442(permute_qubits(T, perm), **kwargs)
        per_role[label] = res.value
        if best is None or res.value > best[1].value:
            best = (label, res)
    label, res = best
    diag = dict(res.diagnostics)
    diag["per_role"] = per_role
    return OptResult(
        kind=ObservableKind.B442SYM,
        value=res.value,
        axes=res.axes,
        restarts_used=res.restarts_used,
        converged=res.converged,
        internal_angles=res.internal_angles,
        permutation=B442_PERMUTATIONS[label],
        diagnostics=diag,
    )


OPTIMIZERS = {
    ObservableKind.MERMIN: optimize_mermin,
    ObservableKind.SVETLICHNY: optimize_svetlichny,
    ObservableKind.B442: optimize_b442,
    ObservableKind.B442SYM: optimize_b442_sym,
}
