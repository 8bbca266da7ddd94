"""Concurrences, three-tangle and the concurrence-triangle measure F3.

All functions take a pure :class:`~decaybell.states.SpinState`.  The
pure-state structure is used to keep every quantity free of square-root
amplification of round-off:

* two-qubit (Wootters) concurrences come from the singular values of the
  2x2 matrix ``M^T (sy x sy) M`` where ``rho_pair = M M^dag``;
* one-to-other concurrences use ``1 - Tr rho_i^2 = 2 det rho_i`` with the
  determinant written as a sum of squared 2x2 minors.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NumericalConsistencyError
from .states import PARTIES, PAULI, SpinState

TANGLE_CONSISTENCY = 1e-7
_NEG_EIG_CLAMP = 1e-12

_SYSY = np.kron(PAULI[2], PAULI[2]).real

_PAIR_TRANSPOSE = {"AB": (0, 1, 2), "AC": (0, 2, 1), "BC": (1, 2, 0)}
_SINGLE_TRANSPOSE = {"A": (0, 1, 2), "B": (1, 0, 2), "C": (2, 0, 1)}


def _pair_key(pair) -> str:
    key = "".join(sorted(pair))
    if key not in _PAIR_TRANSPOSE:
        raise ValueError(f"pair must be two of A, B, C; got {pair!r}")
    return key


def concurrence_pair(state: SpinState, pair: str) -> float:
    """Wootters concurrence of the two-qubit reduced state on ``pair``."""
    M = np.transpose(state.tensor(), _PAIR_TRANSPOSE[_pair_key(pair)]).reshape(4, 2)
    eta = np.linalg.svd(M.T @ _SYSY @ M, compute_uv=False)
    return float(min(1.0, max(0.0, eta[0] - eta[1])))


def wootters_concurrence(rho: np.ndarray) -> float:
    """Concurrence of an arbitrary (possibly mixed) two-qubit density matrix.

    Uses the eigenvalues of ``rho @ rho_tilde``; negative real parts down
    to -1e-12 are clamped to zero.  For rank-deficient ``rho`` the result
    carries an error of order sqrt(machine epsilon).
    """
    rho = np.asarray(rho, dtype=complex)
    rho_tilde = _SYSY @ rho.conj() @ _SYSY
    ev = np.linalg.eigvals(rho @ rho_tilde).real
    if ev.min() < -_NEG_EIG_CLAMP:
        raise NumericalConsistencyError(f"rho*rho_tilde has eigenvalue {ev.min():.3g} < 0")
    eta = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    return float(max(0.0, eta[0] - eta[1] - eta[2] - eta[3]))


def concurrence_one_other(state: SpinState, single: str) -> float:
    """Concurrence between qubit ``single`` and the remaining pair."""
    if single not in _SINGLE_TRANSPOSE:
        raise ValueError(f"single must be one of A, B, C; got {single!r}")
    M = np.transpose(state.tensor(), _SINGLE_TRANSPOSE[single]).reshape(2, 4)
    # det(M M^dag) by Cauchy-Binet
    minors = np.outer(M[0], M[1]) - np.outer(M[1], M[0])
    det = 0.5 * float(np.sum(np.abs(minors) ** 2))
    return float(min(1.0, 2.0 * math.sqrt(max(det, 0.0))))


def _raw_tangles(state: SpinState) -> dict[str, float]:
    pairs = {p: concurrence_pair(state, p) for p in _PAIR_TRANSPOSE}
    out = {}
    for i in PARTIES:
        others = [p for p in pairs if i in p]
        out[i] = concurrence_one_other(state, i) ** 2 - sum(pairs[p] ** 2 for p in others)
    return out


def three_tangle(state: SpinState) -> float:
    """Residual tangle from the monogamy relation of qubit A.

    The B and C partitions are computed as well; a spread larger than
    ``TANGLE_CONSISTENCY`` raises NumericalConsistencyError.
    """
    raw = _raw_tangles(state)
    spread = max(raw.values()) - min(raw.values())
    if spread > TANGLE_CONSISTENCY:
        raise NumericalConsistencyError(f"three-tangle differs across partitions by {spread:.3g}")
    return float(min(1.0, max(0.0, raw["A"])))


def triangle_measure(ca: float, cb: float, cc: float) -> float:
    """Normalised Heron area of the triangle with the given side lengths."""
    prod = (ca + cb + cc) * (-ca + cb + cc) * (ca - cb + cc) * (ca + cb - cc)
    # Q (Q-a)(Q-b)(Q-c) = prod / 16
    return float(min(1.0, (4 / math.sqrt(3)) * math.sqrt(max(prod, 0.0)) / 4))


def f3(state: SpinState) -> float:
    """Genuine tripartite entanglement measure from the concurrence triangle."""
    return triangle_measure(*(concurrence_one_other(state, p) for p in PARTIES))


@dataclass(frozen=True)
class EntanglementReport:
    C_AB: float
    C_AC: float
    C_BC: float
    C_A_BC: float
    C_B_AC: float
    C_C_AB: float
    tau: float
    F3: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


REPORT_FIELDS = tuple(EntanglementReport.__dataclass_fields__)


def report(state: SpinState) -> EntanglementReport:
    ones = [concurrence_one_other(state, p) for p in PARTIES]
    return EntanglementReport(
        C_AB=concurrence_pair(state, "AB"),
        C_AC=concurrence_pair(state, "AC"),
        C_BC=concurrence_pair(state, "BC"),
        C_A_BC=ones[0],
        C_B_AC=ones[1],
        C_C_AB=ones[2],
        tau=three_tangle(state),
        F3=triangle_measure(*ones),
    )
