"""Three-qubit helicity states of X -> ABC and their Pauli correlation tensors.

Amplitudes are stored as a length-8 complex vector over ``|lambda_A lambda_B
lambda_C>`` with ``+`` before ``-`` on every qubit, i.e. ::

    index = 4*[lambda_A = -] + 2*[lambda_B = -] + [lambda_C = -]

The helicity ``+`` is identified with the computational ``|0>`` (the
``+1`` eigenvector of sigma_z).  Common positive prefactors of the matrix
elements (phase-space factors, momenta) are dropped since the state is
normalised anyway.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import AllAmplitudesVanish, EmptyKeepSet
from .kinematics import DecayAngles, require_physical

VANISH_THRESHOLD = 1e-14

PARTIES = ("A", "B", "C")
BASIS_LABELS = tuple("".join(p) for p in product("+-", repeat=3))

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def basis_index(label: str) -> int:
    """Position of a helicity label such as ``"-+-"`` in the amplitude vector."""
    if len(label) != 3 or set(label) - {"+", "-"}:
        raise ValueError(f"bad helicity label {label!r}")
    return 4 * (label[0] == "-") + 2 * (label[1] == "-") + (label[2] == "-")


@dataclass(frozen=True)
class SpinDirection:
    """Polarisation axis ``n = (sin t cos p, sin t sin p, cos t)`` of the parent."""

    theta: float
    phi: float

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, n: Sequence[float]) -> "SpinDirection":
        n = np.asarray(n, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError("spin direction must be non-zero")
        x, y, z = n / norm
        theta = math.atan2(math.hypot(x, y), z)
        phi = math.atan2(y, x) % (2 * math.pi) if math.hypot(x, y) > 1e-15 else 0.0
        return cls(theta, phi)


def spin_direction_from_rotation(axis: str, omega: float) -> SpinDirection:
    """Rotate ``e_z`` by ``omega`` about the x or y axis.

    About y the result is ``(sin w, 0, cos w)``; about x it is
    ``(0, -sin w, cos w)``.
    """
    if axis == "y":
        n = (math.sin(omega), 0.0, math.cos(omega))
    elif axis == "x":
        n = (0.0, -math.sin(omega), math.cos(omega))
    else:
        raise ValueError(f"rotation axis must be 'x' or 'y', got {axis!r}")
    return SpinDirection.from_vector(n)


def _unit_complex(re: float, im: float, name: str) -> complex:
    z = complex(re, im)
    if abs(z) == 0:
        raise ValueError(f"coupling {name} must be non-zero")
    return z / abs(z)


@dataclass(frozen=True)
class ScalarCouplings:
    c_S: float
    c_A: float
    d_S: float
    d_A: float

    def __post_init__(self):
        _unit_complex(self.c_S, self.c_A, "c")
        _unit_complex(self.d_S, self.d_A, "d")

    @property
    def c(self) -> complex:
        return _unit_complex(self.c_S, self.c_A, "c")

    @property
    def d(self) -> complex:
        return _unit_complex(self.d_S, self.d_A, "d")


@dataclass(frozen=True)
class VectorCouplings:
    c_L: float
    c_R: float
    d_L: float
    d_R: float

    def __post_init__(self):
        if self.c_L == 0 and self.c_R == 0:
            raise ValueError("(c_L, c_R) must not both vanish")
        if self.d_L == 0 and self.d_R == 0:
            raise ValueError("(d_L, d_R) must not both vanish")

    def normalized(self) -> tuple[float, float, float, float]:
        nc = math.hypot(self.c_L, self.c_R)
        nd = math.hypot(self.d_L, self.d_R)
        return self.c_L / nc, self.c_R / nc, self.d_L / nd, self.d_R / nd


@dataclass(frozen=True)
class TensorCouplings:
    c_M: float
    c_E: float
    d_M: float
    d_E: float

    def __post_init__(self):
        _unit_complex(self.c_M, self.c_E, "c")
        _unit_complex(self.d_M, self.d_E, "d")

    @property
    def c(self) -> complex:
        return _unit_complex(self.c_M, self.c_E, "c")

    @property
    def d(self) -> complex:
        return _unit_complex(self.d_M, self.d_E, "d")


COUPLING_TYPES = {
    "scalar": ScalarCouplings,
    "vector": VectorCouplings,
    "tensor": TensorCouplings,
}


@dataclass(frozen=True, eq=False)
class SpinState:
    """Normalised pure three-qubit state with a provenance tag."""

    amplitudes: np.ndarray
    interaction: str = "custom"
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(8)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, interaction: str = "custom", inputs: dict | None = None,
                        normalize: bool = True) -> "SpinState":
        """Build a state, normalising the amplitudes unless ``normalize`` is False.

        Raises AllAmplitudesVanish if the norm is below ``VANISH_THRESHOLD``.
        """
        amps = np.asarray(amplitudes, dtype=complex).reshape(8)
        norm = float(np.linalg.norm(amps))
        if norm < VANISH_THRESHOLD:
            raise AllAmplitudesVanish(f"amplitude norm {norm:.3g} below {VANISH_THRESHOLD:g}")
        if normalize:
            amps = amps / norm
        return cls(amps, interaction, dict(inputs or {}))

    def tensor(self) -> np.ndarray:
        """Amplitudes as a (2, 2, 2) array indexed by (A, B, C)."""
        return self.amplitudes.reshape(2, 2, 2)

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[basis_index(label)])

    def to_json_dict(self) -> dict:
        return {
            "interaction": self.interaction,
            "inputs": self.inputs,
            "basis": list(BASIS_LABELS),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SpinState":
        amps = [complex(re, im) for re, im in data["amplitudes"]]
        return cls(np.array(amps), data.get("interaction", "custom"), data.get("inputs", {}))


def _filled(entries: dict[str, complex]) -> np.ndarray:
    amps = np.zeros(8, dtype=complex)
    for label, value in entries.items():
        amps[basis_index(label)] = value
    return amps


def scalar_state(c: ScalarCouplings, n: SpinDirection) -> SpinState:
    """Scalar four-fermion interaction; independent of the decay angles."""
    cc, dd = c.c, c.d
    e = cmath.exp(1j * n.phi)
    s, co = math.sin(n.theta / 2), math.cos(n.theta / 2)
    r = 1 / math.sqrt(2)
    amps = _filled({
        "---": -cc * dd * r * e * s,
        "-++": cc * dd.conjugate() * r * e * s,
        "+--": -cc.conjugate() * dd * r * co,
        "+++": cc.conjugate() * dd.conjugate() * r * co,
    })
    inputs = {"couplings": [c.c_S, c.c_A, c.d_S, c.d_A], "spin": [n.theta, n.phi]}
    return SpinState.from_amplitudes(amps, "scalar", inputs)


def vector_amplitudes(c: VectorCouplings, angles: DecayAngles, n: SpinDirection) -> np.ndarray:
    """Un-normalised amplitudes of the chiral vector interaction."""
    cL, cR, dL, dR = c.normalized()
    e = cmath.exp(1j * n.phi)
    st, ct = math.sin(n.theta / 2), math.cos(n.theta / 2)
    sb, cb = math.sin(angles.theta_B / 2), math.cos(angles.theta_B / 2)
    sc, cc = math.sin(angles.theta_C / 2), math.cos(angles.theta_C / 2)
    return _filled({
        "-+-": cL * dL * sc * (ct * cb + e * st * sb),
        "--+": -cL * dR * sb * (ct * cc - e * st * sc),
        "++-": cR * dL * sb * (ct * sc + e * st * cc),
        "+-+": cR * dR * sc * (ct * sb - e * st * cb),
    })


def vector_state(c: VectorCouplings, angles: DecayAngles, n: SpinDirection) -> SpinState:
    require_physical(angles)
    inputs = {"couplings": [c.c_L, c.c_R, c.d_L, c.d_R],
              "angles": [angles.theta_B, angles.theta_C], "spin": [n.theta, n.phi]}
    return SpinState.from_amplitudes(vector_amplitudes(c, angles, n), "vector", inputs)


def tensor_amplitudes(c: TensorCouplings, angles: DecayAngles, n: SpinDirection) -> np.ndarray:
    """Un-normalised amplitudes of the tensor interaction (only +++ and ---)."""
    cc, dd = c.c, c.d
    e = cmath.exp(1j * n.phi)
    st, ct = math.sin(n.theta / 2), math.cos(n.theta / 2)
    sb, sc = math.sin(angles.theta_B / 2), math.sin(angles.theta_C / 2)
    sdiff = math.sin((angles.theta_B - angles.theta_C) / 2)
    return _filled({
        "+++": cc.conjugate() * dd.conjugate() * (2 * e * st * sb * sc - ct * sdiff),
        "---": cc * dd * (e * st * sdiff + 2 * ct * sb * sc),
    })


def tensor_state(c: TensorCouplings, angles: DecayAngles, n: SpinDirection) -> SpinState:
    require_physical(angles)
    inputs = {"couplings": [c.c_M, c.c_E, c.d_M, c.d_E],
              "angles": [angles.theta_B, angles.theta_C], "spin": [n.theta, n.phi]}
    return SpinState.from_amplitudes(tensor_amplitudes(c, angles, n), "tensor", inputs)


def decay_state(interaction: str, couplings: Sequence[float], angles: DecayAngles,
                n: SpinDirection) -> SpinState:
    """Dispatch on the interaction name ``scalar``, ``vector`` or ``tensor``."""
    try:
        cls = COUPLING_TYPES[interaction]
    except KeyError:
        raise ValueError(f"unknown interaction {interaction!r}") from None
    c = cls(*couplings)
    if interaction == "scalar":
        return scalar_state(c, n)
    if interaction == "vector":
        return vector_state(c, angles, n)
    return tensor_state(c, angles, n)


def ghz_state() -> SpinState:
    return SpinState.from_amplitudes(_filled({"+++": 1, "---": 1}), "ghz")


def w_state() -> SpinState:
    return SpinState.from_amplitudes(_filled({"-++": 1, "+-+": 1, "++-": 1}), "w")


def product_state(*qubits) -> SpinState:
    """Product of three single-qubit states, each a label ``"+"``/``"-"`` or a 2-vector."""
    if len(qubits) != 3:
        raise ValueError("need exactly three qubit factors")
    vecs = []
    for q in qubits:
        if isinstance(q, str):
            vecs.append(np.array([1, 0] if q == "+" else [0, 1], dtype=complex))
        else:
            vecs.append(np.asarray(q, dtype=complex))
    amps = np.einsum("a,b,c->abc", *vecs).reshape(8)
    return SpinState.from_amplitudes(amps, "product")


def random_state(rng: np.random.Generator) -> SpinState:
    """Haar-random pure state from i.i.d. standard complex Gaussian amplitudes."""
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    return SpinState.from_amplitudes(amps, "random")


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def apply_local_unitaries(state: SpinState, UA, UB, UC) -> SpinState:
    psi = np.einsum("ia,jb,kc,abc->ijk", UA, UB, UC, state.tensor())
    return SpinState(psi.reshape(8), state.interaction, state.inputs)


def rotation_from_unitary(U) -> np.ndarray:
    """SO(3) matrix ``R_ij = Tr(sigma_i U sigma_j U^dag) / 2`` acting on Pauli indices."""
    U = np.asarray(U, dtype=complex)
    s = PAULI[1:]
    R = np.einsum("iab,bc,jcd,da->ij", s, U, s, U.conj().T) / 2
    return R.real


def density_matrix(state: SpinState) -> np.ndarray:
    psi = state.amplitudes
    return np.outer(psi, psi.conj())


def _keep_indices(keep: Iterable[str]) -> list[int]:
    idx = sorted({PARTIES.index(p) for p in keep})
    if not idx:
        raise EmptyKeepSet("keep must name at least one of A, B, C")
    return idx


def reduce(rho: np.ndarray, keep: Iterable[str]) -> np.ndarray:
    """Partial trace of an 8x8 density matrix onto the qubits in ``keep``.

    Kept qubits stay in A, B, C order, e.g. ``keep="CA"`` gives rho_AC.
    """
    kept = _keep_indices(keep)
    r = np.asarray(rho).reshape(2, 2, 2, 2, 2, 2)
    letters_in = "abc"
    letters_out = "def"
    ket = [letters_in[i] for i in range(3)]
    bra = [letters_out[i] if i in kept else letters_in[i] for i in range(3)]
    out = "".join(letters_in[i] for i in kept) + "".join(letters_out[i] for i in kept)
    red = np.einsum("".join(ket) + "".join(bra) + "->" + out, r)
    dim = 2 ** len(kept)
    return red.reshape(dim, dim)


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Real 4x4x4 array ``T[mu, nu, rho] = <sigma_mu x sigma_nu x sigma_rho>``."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float).reshape(4, 4, 4)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def block(self) -> np.ndarray:
        """The 3x3x3 three-body correlation used by every Bell observable."""
        return self.entries[1:, 1:, 1:]

    def to_json_dict(self) -> dict:
        return {"shape": [4, 4, 4], "entries": [float(x) for x in self.entries.ravel()]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "CorrelationTensor":
        return cls(np.array(data["entries"], dtype=float))


def correlation_tensor(state: SpinState) -> CorrelationTensor:
    psi = state.tensor()
    T = np.einsum("abc,mad,nbe,rcf,def->mnr", psi.conj(), PAULI, PAULI, PAULI, psi, optimize=True)
    return CorrelationTensor(T.real)


def permute_qubits(T: CorrelationTensor, perm: Sequence[str]) -> CorrelationTensor:
    """Reassign qubit roles: slot k of the result holds party ``perm[k]``.

    ``permute_qubits(T, "ACB")`` swaps B and C, ``"CBA"`` swaps A and C.
    """
    perm = tuple(perm)
    if sorted(perm) != list(PARTIES):
        raise ValueError(f"{perm!r} is not a permutation of A, B, C")
    axes = [PARTIES.index(p) for p in perm]
    return CorrelationTensor(np.transpose(T.entries, axes))


def inverse_permutation(perm: Sequence[str]) -> tuple[str, ...]:
    perm = tuple(perm)
    inv = [""] * 3
    for slot, party in enumerate(perm):
        inv[PARTIES.index(party)] = PARTIES[slot]
    return tuple(inv)


def rotate_tensor(T: CorrelationTensor, RA, RB, RC) -> CorrelationTensor:
    """Apply one SO(3) rotation per party to the Pauli indices of T."""
    full = [np.eye(4) for _ in range(3)]
    for f, R in zip(full, (RA, RB, RC)):
        f[1:, 1:] = R
    return CorrelationTensor(np.einsum("ia,jb,kc,abc->ijk", *full, T.entries))
