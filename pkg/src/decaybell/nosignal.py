"""Exact no-signalling boxes: PR boxes, the 4x4x2 algebraic-bound box, checks.

Tables are numpy object arrays of :class:`fractions.Fraction` so that every
identity is verified without tolerance.  Boxes derived from quantum states
(or mixed with irrational weights) hold floats and are compared with
``FLOAT_TOL``.

Layouts
-------
bipartite   ``P[a, b, x, y]``           shape (2, 2, 2, 2)
tripartite  ``P[a, b, c, i, j, z]``     shape (2, 2, 2, 4, 4, 2)

with ``i = 2u + u'`` and ``j = 2v + v'`` so that Alice's settings
A_1..A_4 map to A_00, A_01, A_10, A_11 (Bob likewise).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .states import PAULI, SpinState, density_matrix

FLOAT_TOL = 1e-12

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)

VARIANTS: dict[str, Callable[[int, int, int], int]] = {
    "uvz": lambda u, v, z: u * v * z,
    "uz": lambda u, v, z: u * z,
    "vz": lambda u, v, z: v * z,
}


@dataclass(frozen=True)
class Box:
    """Conditional probability table over ``n`` parties.

    The first ``n`` axes are outcomes, the last ``n`` the settings.
    """

    table: np.ndarray
    parties: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.parties)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self.table.flat)

    def __getitem__(self, key):
        return self.table[key]

    def settings_shape(self) -> tuple[int, ...]:
        return self.table.shape[self.n :]

    def normalization_errors(self) -> list[tuple[int, ...]]:
        """Settings whose outcome distribution does not sum to one."""
        sums = self.table.sum(axis=tuple(range(self.n)))
        bad = []
        for idx in np.ndindex(sums.shape):
            s = sums[idx]
            ok = s == 1 if self.exact else abs(float(s) - 1.0) <= FLOAT_TOL
            if not ok:
                bad.append(idx)
        return bad

    def in_unit_interval(self) -> bool:
        return all(0 <= v <= 1 for v in self.table.flat)


def bipartite(table) -> Box:
    t = np.asarray(table, dtype=object)
    if t.shape != (2, 2, 2, 2):
        raise ValueError(f"bipartite table must have shape (2,2,2,2), got {t.shape}")
    return Box(t, ("A", "B"))


def tripartite(table) -> Box:
    t = np.asarray(table, dtype=object)
    if t.shape != (2, 2, 2, 4, 4, 2):
        raise ValueError(f"tripartite table must have shape (2,2,2,4,4,2), got {t.shape}")
    return Box(t, ("A", "B", "C"))


def _empty(shape) -> np.ndarray:
    t = np.empty(shape, dtype=object)
    t.fill(Fraction(0))
    return t


# ---------------------------------------------------------------- bipartite


def pr_box(s: int) -> Box:
    """PR box (s=0) or anti-PR box (s=1): 1/2 when a xor b xor s = xy."""
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    t = _empty((2, 2, 2, 2))
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if a ^ b ^ s == x * y:
            t[a, b, x, y] = _HALF
    return bipartite(t)


def random_box() -> Box:
    t = _empty((2, 2, 2, 2))
    t.fill(_QUARTER)
    return bipartite(t)


def mixture(boxes: Sequence[Box], weights: Sequence) -> Box:
    """Convex combination; exact when every weight is rational."""
    if len(boxes) != len(weights) or not boxes:
        raise ValueError("need one weight per box")
    table = sum(w * b.table for w, b in zip(weights, boxes))
    return Box(table, boxes[0].parties)


def quantum_box(s: int) -> Box:
    """(1 - 1/sqrt 2) P* + (1/sqrt 2) P^s, with float entries."""
    w = 1.0 / math.sqrt(2.0)
    return mixture([random_box(), pr_box(s)], [1.0 - w, w])


def chsh_value(box: Box):
    """sum (-1)^(a xor b) (-1)^(xy) P(a, b | x, y)."""
    total = 0
    for a, b, x, y in itertools.product(range(2), repeat=4):
        sign = (-1) ** (a ^ b) * (-1) ** (x * y)
        total = total + sign * box.table[a, b, x, y]
    return total


# ---------------------------------------------------------------- tripartite


def tripartite_box(variant: str = "uvz") -> Box:
    """1/4 when a xor b xor c xor g(u, v, z) = u'v', else 0.

    ``variant`` selects g: ``"uvz"`` (default), ``"uz"`` or ``"vz"``.
    """
    g = VARIANTS[variant]
    t = _empty((2, 2, 2, 4, 4, 2))
    for a, b, c, u, up, v, vp, z in itertools.product(range(2), repeat=8):
        if a ^ b ^ c ^ g(u, v, z) == up * vp:
            t[a, b, c, 2 * u + up, 2 * v + vp, z] = _QUARTER
    return tripartite(t)


def uniform_tripartite_box() -> Box:
    t = _empty((2, 2, 2, 4, 4, 2))
    t.fill(Fraction(1, 8))
    return tripartite(t)


def b442_sign(a, b, c, u, up, v, vp, z) -> int:
    if u != v:
        return 0
    return (-1) ** (a ^ b ^ c) * (-1) ** (up * vp) * (-1) ** (u * v * z)


def b442_box_value(box: Box):
    """sum delta_uv (-1)^(a xor b xor c) (-1)^(u'v') (-1)^(uvz) P."""
    total = 0
    for a, b, c, u, up, v, vp, z in itertools.product(range(2), repeat=8):
        if u != v:
            continue
        total = total + b442_sign(a, b, c, u, up, v, vp, z) * box.table[a, b, c, 2 * u + up, 2 * v + vp, z]
    return total


def relation_to_pr_mismatches(variant: str = "uvz") -> list[tuple[int, ...]]:
    """Entries where P~ differs from (1/2) P^(c xor g)(a, b | u', v')."""
    g = VARIANTS[variant]
    box = tripartite_box(variant)
    pr = {s: pr_box(s) for s in (0, 1)}
    bad = []
    for a, b, c, u, up, v, vp, z in itertools.product(range(2), repeat=8):
        lhs = box.table[a, b, c, 2 * u + up, 2 * v + vp, z]
        rhs = _HALF * pr[c ^ g(u, v, z)].table[a, b, up, vp]
        if lhs != rhs:
            bad.append((a, b, c, u, up, v, vp, z))
    return bad


# ---------------------------------------------------------------- no-signalling


@dataclass(frozen=True)
class Violation:
    """The joint marginal of ``marginal`` changes with ``setting_party``'s input."""

    setting_party: str
    marginal: str
    outcomes: tuple[int, ...]
    other_settings: tuple[int, ...]
    settings: tuple[int, int]
    values: tuple


def verify_no_signalling(box: Box) -> list[Violation]:
    """All failed no-signalling equalities (empty list: the box is no-signalling).

    For every party X, the distribution of the other parties' outcomes
    (X's outcome summed out) must not depend on X's setting.  Rational
    boxes are compared exactly, float boxes to ``FLOAT_TOL``.
    """
    n = box.n
    exact = box.exact
    out = []
    for p in range(n):
        marg = box.table.sum(axis=p)  # outcomes of the others, then all n settings
        set_axis = (n - 1) + p
        others = "".join(q for k, q in enumerate(box.parties) if k != p)
        n_set = marg.shape[set_axis]
        ref = np.take(marg, 0, axis=set_axis)
        for s in range(1, n_set):
            cur = np.take(marg, s, axis=set_axis)
            for idx in np.ndindex(ref.shape):
                x, y = ref[idx], cur[idx]
                same = x == y if exact else abs(float(x) - float(y)) <= FLOAT_TOL
                if not same:
                    out.append(Violation(box.parties[p], others, idx[: n - 1], idx[n - 1 :], (0, s), (x, y)))
    return out


# ---------------------------------------------------------------- deterministic strategies


def deterministic_bipartite(fa: Sequence[int], fb: Sequence[int]) -> Box:
    """Box with a = fa[x], b = fb[y]."""
    t = _empty((2, 2, 2, 2))
    for x, y in itertools.product(range(2), repeat=2):
        t[fa[x], fb[y], x, y] = Fraction(1)
    return bipartite(t)


def deterministic_tripartite(fa: Sequence[int], fb: Sequence[int], fc: Sequence[int]) -> Box:
    t = _empty((2, 2, 2, 4, 4, 2))
    for i, j, z in itertools.product(range(4), range(4), range(2)):
        t[fa[i], fb[j], fc[z], i, j, z] = Fraction(1)
    return tripartite(t)


def chsh_deterministic_values() -> list[int]:
    """Exact CHSH value of all 16 local deterministic strategies."""
    vals = []
    for fa in itertools.product(range(2), repeat=2):
        for fb in itertools.product(range(2), repeat=2):
            # same sum as chsh_value on deterministic_bipartite(fa, fb)
            vals.append(sum((-1) ** (fa[x] ^ fb[y]) * (-1) ** (x * y) for x in range(2) for y in range(2)))
    return vals


def b442_deterministic_values() -> list[int]:
    """Exact 4x4x2 value of all 2^10 local deterministic strategies."""
    vals = []
    for fa in itertools.product(range(2), repeat=4):
        for fb in itertools.product(range(2), repeat=4):
            for fc in itertools.product(range(2), repeat=2):
                total = 0
                for u, up, vp, z in itertools.product(range(2), repeat=4):
                    # delta_uv: only v = u contributes
                    total += b442_sign(fa[2 * u + up], fb[2 * u + vp], fc[z], u, up, u, vp, z)
                vals.append(total)
    return vals


# ---------------------------------------------------------------- quantum boxes


def _projector(n, outcome: int) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return 0.5 * (PAULI[0] + (-1) ** outcome * np.einsum("i,ijk->jk", n, PAULI[1:]))


def box_from_state(state: SpinState, A_axes, B_axes, C_axes) -> Box:
    """Born-rule box for spin measurements along the given axes.

    Outcome 0 means +1 along the axis.  The setting axes have the lengths
    of the axis lists, so 4/4/2 axes give the layout of b442_box_value.
    """
    A_axes, B_axes, C_axes = (np.asarray(v, dtype=float).reshape(-1, 3) for v in (A_axes, B_axes, C_axes))
    rho = density_matrix(state).reshape(2, 2, 2, 2, 2, 2)
    table = np.empty((2, 2, 2, len(A_axes), len(B_axes), len(C_axes)), dtype=object)
    proj = [[[_projector(n, o) for o in (0, 1)] for n in axes] for axes in (A_axes, B_axes, C_axes)]
    for i, j, k in itertools.product(range(len(A_axes)), range(len(B_axes)), range(len(C_axes))):
        for a, b, c in itertools.product(range(2), repeat=3):
            p = np.einsum("abcdef,da,eb,fc->", rho, proj[0][i][a], proj[1][j][b], proj[2][k][c])
            table[a, b, c, i, j, k] = float(p.real)
    return Box(table, ("A", "B", "C"))


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def box_identity_checks() -> list[Check]:
    """Every exact identity of the box construction, with the values found."""
    checks = []

    def add(name, passed, detail):
        checks.append(Check(name, bool(passed), detail))

    for s in (0, 1):
        v = chsh_value(pr_box(s))
        add(f"CHSH(P^{s}) = {(-1) ** s * 4}", v == (-1) ** s * 4, f"value {v}")
        add(f"P^{s} no-signalling", not verify_no_signalling(pr_box(s)), "marginals exact")
        add(f"P^{s} normalised", not pr_box(s).normalization_errors(), "per-setting sums exact")
    add("CHSH(P*) = 0", chsh_value(random_box()) == 0, f"value {chsh_value(random_box())}")
    for r in (0, 1):
        mix = mixture([pr_box(0 ^ r), pr_box(1 ^ r)], [_HALF, _HALF])
        add(f"P* = (P^{r} + P^{1 - r})/2", np.array_equal(mix.table, random_box().table), "entrywise exact")
    for s in (0, 1):
        v = float(chsh_value(quantum_box(s)))
        target = (-1) ** s * 2 * math.sqrt(2)
        add(f"CHSH(P_Q^{s}) = {'-' if s else ''}2 sqrt 2", abs(v - target) <= FLOAT_TOL, f"value {v!r}")
    det = chsh_deterministic_values()
    add("max CHSH over 16 deterministic strategies = 2", max(det) == 2, f"max {max(det)}")
    for variant in VARIANTS:
        box = tripartite_box(variant)
        v = b442_box_value(box)
        add(f"B442(P~, {variant}) = 16", v == 16, f"value {v}")
        add(f"P~ ({variant}) no-signalling", not verify_no_signalling(box), "marginals exact")
        add(f"P~ ({variant}) normalised", not box.normalization_errors(), "per-setting sums exact")
        bad = relation_to_pr_mismatches(variant)
        add(f"P~ ({variant}) = P^(c xor g)/2", not bad, f"{len(bad)} mismatched entries")
    add("B442(uniform box) = 0", b442_box_value(uniform_tripartite_box()) == 0, "value 0")
    det = b442_deterministic_values()
    add("max B442 over 1024 deterministic strategies = 4", max(det) == 4, f"max {max(det)}, min {min(det)}")
    return checks
