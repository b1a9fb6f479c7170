"""Constructors and parametrizations of density operators.

Covers pure states, the qubit Bloch form, tensor-product Pauli-string bases,
seeded Ginibre random states, an opt-in physicality projection, and the JSON
state format used by CLI configs and outputs.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .operators import (
    PSD_ATOL,
    SUPPORT_ATOL,
    DensityOperator,
    as_matrix,
    require_hermitian,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

# Fixed axis order used everywhere a qubit estimate is assembled.
AXES = ("X", "Y", "Z")
PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
PAULI_BY_CHAR = {"I": IDENTITY_2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

# |r| may exceed 1 by this much and still be accepted as physical; keeps
# round-trips through floating point from being rejected spuriously.
_BLOCH_NORM_SLACK = 1e-12


def hermitian_from_bloch(r) -> np.ndarray:
    """Unit-trace Hermitian matrix (1/2)(I + r . sigma) for any real 3-vector r.

    No physicality requirement: linear-inversion estimates routinely leave
    the Bloch ball, and this constructor is how they are materialized.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {r.shape}")
    return 0.5 * (IDENTITY_2 + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z)


def density_from_bloch(r) -> DensityOperator:
    """Qubit density operator from a Bloch vector with |r| <= 1."""
    r = np.asarray(r, dtype=float)
    norm = float(np.linalg.norm(r))
    if norm > 1.0 + _BLOCH_NORM_SLACK:
        raise ValueError(
            f"Bloch vector norm {norm:.6f} > 1; use hermitian_from_bloch for estimates"
        )
    return DensityOperator(hermitian_from_bloch(r))


def bloch_from_density(rho) -> np.ndarray:
    """Pauli expectation vector [Tr[A X], Tr[A Y], Tr[A Z]] of a qubit operator."""
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise ValueError(f"Bloch coordinates are defined for d=2 only, got shape {m.shape}")
    return np.array([float(np.real(np.trace(m @ PAULIS[axis]))) for axis in AXES])


def pure_state(amplitudes) -> DensityOperator:
    """Rank-1 density operator |phi><phi| from a complex amplitude vector.

    Vectors whose norm deviates from 1 by more than 1e-10 are renormalized
    with a warning; the zero vector is rejected.
    """
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("cannot build a pure state from the zero vector")
    if abs(norm - 1.0) > 1e-10:
        warnings.warn(f"amplitude vector norm {norm:.6g} != 1; renormalizing", stacklevel=2)
    v = v / norm
    return DensityOperator(np.outer(v, v.conj()))


def random_density(d: int, rank: int, seed) -> DensityOperator:
    """Seeded Ginibre-induced random density operator of dimension d and given rank.

    Draws G of shape (d, rank) with i.i.d. complex standard normal entries
    from the given seed (or caller-owned Generator) and returns
    G G^dag / Tr[G G^dag]. Deterministic per seed.
    """
    if not 1 <= rank <= d:
        raise ValueError(f"rank must satisfy 1 <= rank <= d, got rank={rank}, d={d}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.real(np.trace(m)))


@dataclass(frozen=True)
class PauliStringBasis:
    """The d^2 - 1 nontrivial Pauli strings on b qubits, in lexicographic order.

    Strings are ordered by their labels over the alphabet I < X < Y < Z with
    the all-identity string excluded, so serialized experiments reproduce
    byte-for-byte.
    """

    qubit_count: int
    labels: tuple[str, ...]
    operators: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return 2**self.qubit_count


def pauli_string_matrix(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis named by a string over I, X, Y, Z."""
    if not label or any(c not in PAULI_BY_CHAR for c in label):
        raise ValueError(f"Pauli string must be a nonempty word over IXYZ, got {label!r}")
    op = np.array([[1.0 + 0.0j]])
    for c in label:
        op = np.kron(op, PAULI_BY_CHAR[c])
    return op


def pauli_string_basis(b: int) -> PauliStringBasis:
    """Build the ordered Pauli-string basis for b qubits (b <= 5, d <= 32)."""
    if not 1 <= b <= 5:
        raise ValueError(f"qubit count must be in 1..5, got {b}")
    labels = []
    ops = []
    for chars in itertools.product("IXYZ", repeat=b):
        label = "".join(chars)
        if label == "I" * b:
            continue
        op = pauli_string_matrix(label)
        op.flags.writeable = False
        labels.append(label)
        ops.append(op)
    return PauliStringBasis(b, tuple(labels), tuple(ops))


def project_to_physical(a) -> DensityOperator:
    """Project a unit-trace Hermitian matrix to the physical state set.

    Clamps negative eigenvalues to zero and renormalizes the trace. Opt-in:
    nothing in the estimation pipeline calls this by default.
    """
    m = require_hermitian(a)
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    total = float(np.sum(vals))
    if total <= 0.0:
        raise ValueError("matrix has no positive spectral weight to project onto")
    out = (vecs * (vals / total)) @ vecs.conj().T
    return DensityOperator(0.5 * (out + out.conj().T))


def state_to_json(state) -> dict:
    """Serialize a state-like object to the matrix JSON form."""
    m = as_matrix(state)
    return {"matrix": {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}}


def state_from_json(obj: dict) -> DensityOperator:
    """Parse the state JSON format: {"bloch": ...}, {"ket": ...}, or {"matrix": ...}.

    The parsed operator is validated against the density-operator invariants
    (Hermitian, PSD, unit trace); violations raise ValueError.
    """
    if not isinstance(obj, dict):
        raise ValueError(f"state must be a JSON object, got {type(obj).__name__}")
    keys = {"bloch", "ket", "matrix"} & set(obj)
    if len(keys) != 1:
        raise ValueError("state object must contain exactly one of 'bloch', 'ket', 'matrix'")
    if "bloch" in obj:
        r = np.asarray(obj["bloch"], dtype=float)
        if r.shape != (3,):
            raise ValueError("'bloch' must be a 3-vector [x, y, z]")
        return density_from_bloch(r)
    if "ket" in obj:
        pairs = np.asarray(obj["ket"], dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError("'ket' must be a list of [re, im] pairs")
        return pure_state(pairs[:, 0] + 1j * pairs[:, 1])
    spec = obj["matrix"]
    if not isinstance(spec, dict) or "re" not in spec or "im" not in spec:
        raise ValueError("'matrix' must contain 're' and 'im' arrays")
    re = np.asarray(spec["re"], dtype=float)
    im = np.asarray(spec["im"], dtype=float)
    if re.shape != im.shape:
        raise ValueError("'re' and 'im' shapes differ")
    return DensityOperator(re + 1j * im)
