"""Dense complex Hermitian matrix algebra and quantum-information metrics.

Everything downstream (state constructors, tomography, decision rules,
experiment harness) funnels through the functions in this module, so the
tolerances declared here are the single source of truth for what counts as
Hermitian, positive semidefinite, or unit trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

# Numerical tolerances, well above double-precision noise at the target
# dimensions (d <= 1024).
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
SUPPORT_ATOL = 1e-10
RECONSTRUCTION_ATOL = 1e-9
SQRT_ATOL = 1e-8

# Largest dimension tensor_power is allowed to materialize.
TENSOR_DIM_CAP = 1024


def as_matrix(a) -> np.ndarray:
    """Coerce a state-like object (array, DensityOperator, estimate) to a complex matrix."""
    m = getattr(a, "matrix", a)
    return np.asarray(m, dtype=complex)


def require_hermitian(a, atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """Return ``a`` as a complex matrix, rejecting non-square or non-Hermitian input."""
    m = as_matrix(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian: max |A - A^dag| = {dev:.3e} > {atol:.0e}")
    return m


def _require_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


class Spectrum(NamedTuple):
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending."""

    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # unitary; column j pairs with eigenvalues[j]


def eig_hermitian(a) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix.

    Deterministic for fixed input; eigenvalues are returned in descending
    order with matching eigenvector columns.
    """
    m = require_hermitian(a)
    vals, vecs = np.linalg.eigh(m)
    return Spectrum(vals[::-1].copy(), vecs[:, ::-1].copy())


def trace_norm(a) -> float:
    """Trace norm ||A||_1 of a Hermitian matrix: sum of absolute eigenvalues."""
    m = require_hermitian(a)
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def trace_distance(rho, sigma) -> float:
    """Trace distance (1/2)||rho - sigma||_1 between equal-dimension states."""
    r, s = as_matrix(rho), as_matrix(sigma)
    _require_same_dim(r, s)
    return 0.5 * trace_norm(r - s)


def psd_sqrt(a) -> np.ndarray:
    """Positive-semidefinite square root of a PSD Hermitian matrix.

    Eigenvalues in [-PSD_ATOL, 0) are clamped to zero; anything more
    negative is rejected rather than silently fixed.
    """
    m = require_hermitian(a)
    vals, vecs = np.linalg.eigh(m)
    if vals[0] < -PSD_ATOL:
        raise ValueError(f"matrix is not PSD: min eigenvalue {vals[0]:.3e} < -{PSD_ATOL:.0e}")
    root = np.sqrt(np.clip(vals, 0.0, None))
    out = (vecs * root) @ vecs.conj().T
    return 0.5 * (out + out.conj().T)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2, clipped to [0, 1]."""
    r, s = as_matrix(rho), as_matrix(sigma)
    _require_same_dim(r, s)
    root = psd_sqrt(r)
    inner = root @ s @ root
    vals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    total = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))
    return min(max(total * total, 0.0), 1.0)


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy D(rho||sigma) = Tr[rho ln rho - rho ln sigma] in nats.

    Returns +inf when the support of rho is not contained in the support of
    sigma (eigenvalues at or below SUPPORT_ATOL count as kernel); 0 ln 0 is
    treated as 0.
    """
    r, s = require_hermitian(rho), require_hermitian(sigma)
    _require_same_dim(r, s)
    rvals = np.linalg.eigvalsh(r)
    svals, svecs = np.linalg.eigh(s)
    # weight of rho on the kernel of sigma
    kernel = svals <= SUPPORT_ATOL
    if np.any(kernel):
        proj = svecs[:, kernel]
        leak = float(np.real(np.einsum("ij,jk,ki->", proj.conj().T, r, proj)))
        if leak > SUPPORT_ATOL:
            return math.inf
    pos_r = rvals[rvals > SUPPORT_ATOL]
    entropy_term = float(np.sum(pos_r * np.log(pos_r)))
    # Tr[rho ln sigma] restricted to the support of sigma
    keep = ~kernel
    weights = np.real(np.einsum("ij,jk,ki->i", svecs[:, keep].conj().T, r, svecs[:, keep]))
    cross_term = float(np.sum(weights * np.log(svals[keep])))
    return max(entropy_term - cross_term, 0.0)


def sandwiched_renyi_half(rho, sigma) -> float:
    """Order-1/2 sandwiched Renyi divergence: -ln F(rho, sigma); +inf when F = 0."""
    f = fidelity(rho, sigma)
    if f <= 0.0:
        return math.inf
    return max(-math.log(f), 0.0)


@dataclass(frozen=True)
class DensityOperator:
    """A validated density operator: Hermitian, PSD, unit trace.

    The numerical rank (eigenvalues above SUPPORT_ATOL) is computed once at
    construction. Instances are immutable and safe to share across threads.
    """

    matrix: np.ndarray
    rank: int = field(init=False)

    def __post_init__(self):
        m = require_hermitian(self.matrix)
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr!r} is not 1 within {TRACE_ATOL:.0e}")
        vals = np.linalg.eigvalsh(m)
        if vals[0] < -PSD_ATOL:
            raise ValueError(f"not PSD: min eigenvalue {vals[0]:.3e} < -{PSD_ATOL:.0e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rank", int(np.sum(vals > SUPPORT_ATOL)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.matrix.shape[0], self.matrix.tobytes()))


def tensor_power(rho, m: int, dim_cap: int = TENSOR_DIM_CAP) -> DensityOperator:
    """m-fold tensor power of a density operator.

    The resulting dimension d**m must stay within ``dim_cap``; otherwise
    the call is rejected with the cap that would be required.
    """
    base = as_matrix(rho)
    if m < 1:
        raise ValueError("m must be a positive integer")
    d = base.shape[0]
    needed = d**m
    if needed > dim_cap:
        raise ValueError(
            f"tensor power dimension {needed} exceeds cap {dim_cap}; "
            f"raise dim_cap to at least {needed} to allow this call"
        )
    out = np.array([[1.0 + 0.0j]])
    for _ in range(m):
        out = np.kron(out, base)
    return DensityOperator(out)


def helstrom_bound(rho0, rho1, m: int, dim_cap: int = TENSOR_DIM_CAP) -> float:
    """Minimum achievable alpha + beta for discriminating rho0^(x)m vs rho1^(x)m.

    Evaluates (1/2)(1 - (1/2)||rho0^(x)m - rho1^(x)m||_1), in [0, 1/2].
    """
    a = tensor_power(rho0, m, dim_cap).matrix
    b = tensor_power(rho1, m, dim_cap).matrix
    val = 0.5 * (1.0 - 0.5 * trace_norm(a - b))
    return min(max(val, 0.0), 0.5)
