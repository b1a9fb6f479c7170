"""POVMs, Born-rule outcome distributions, and seeded measurement sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import PSD_ATOL, as_matrix
from .states import AXES, pauli_string_matrix

# Tolerance for a POVM's effects summing to the identity.
COMPLETENESS_ATOL = 1e-9


@dataclass(frozen=True)
class Povm:
    """A positive operator valued measure with one label per effect.

    Labels carry the physical value of each outcome: Pauli eigenbasis
    measurements use +1/-1 so that the labeled empirical mean estimates
    Tr[P rho] directly.
    """

    povm_id: str
    effects: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.effects) != len(self.labels):
            raise ValueError("one label per effect required")
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        total = np.zeros_like(effects[0])
        for e in effects:
            vals = np.linalg.eigvalsh(0.5 * (e + e.conj().T))
            if vals[0] < -PSD_ATOL:
                raise ValueError(f"effect has negative eigenvalue {vals[0]:.3e}")
            total = total + e
        if np.max(np.abs(total - np.eye(total.shape[0]))) > COMPLETENESS_ATOL:
            raise ValueError("effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


@dataclass(frozen=True)
class OutcomeRecord:
    """Counts of each labeled outcome from repeated measurement of one POVM."""

    povm_id: str
    labels: tuple
    counts: tuple
    shots: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if sum(counts) != self.shots:
            raise ValueError(f"counts sum {sum(counts)} != shots {self.shots}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", tuple(self.labels))

    def to_json(self) -> dict:
        return {
            "povm_id": self.povm_id,
            "labels": list(self.labels),
            "counts": list(self.counts),
            "shots": self.shots,
        }


def born_probabilities(povm: Povm, rho) -> np.ndarray:
    """Outcome distribution Pr[i] = Tr[E_i rho] under the Born rule."""
    m = as_matrix(rho)
    if m.shape[0] != povm.dim:
        raise ValueError(f"dimension mismatch: POVM is {povm.dim}, state is {m.shape[0]}")
    probs = np.array([float(np.real(np.einsum("ij,ji->", e, m))) for e in povm.effects])
    probs = np.clip(probs, 0.0, 1.0)
    if abs(float(np.sum(probs)) - 1.0) > COMPLETENESS_ATOL:
        raise ValueError(f"outcome probabilities sum to {np.sum(probs)!r}, not 1")
    return probs


def pauli_string_povm(label: str) -> Povm:
    """Two-outcome measurement of one Pauli string, labels +1 / -1.

    The effects are (I +/- P)/2 for the string operator P, so the labeled
    mean of a record is an unbiased estimate of Tr[P rho].
    """
    p = pauli_string_matrix(label)
    d = p.shape[0]
    plus = 0.5 * (np.eye(d, dtype=complex) + p)
    minus = 0.5 * (np.eye(d, dtype=complex) - p)
    return Povm(f"pauli-{label}", (plus, minus), (1, -1))


def pauli_eigenbasis_povm(axis: str) -> Povm:
    """Projective measurement in the eigenbasis of one Pauli operator.

    Labels are the Pauli eigenvalues +1 and -1, so the labeled mean of the
    record is an unbiased estimate of Tr[sigma_axis rho].
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return pauli_string_povm(axis)


def projector_povm(state) -> Povm:
    """Two-outcome POVM {P, I - P} onto a pure state's projector; labels 1 / 0."""
    m = as_matrix(state)
    d = m.shape[0]
    return Povm("projector", (m, np.eye(d, dtype=complex) - m), (1, 0))


def sorted_outcome_order(probs: np.ndarray) -> np.ndarray:
    """Outcome indices sorted by descending probability, stable on ties."""
    return np.argsort(-probs, kind="stable")


def counts_from_uniforms(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map uniform draws to outcome counts by inverse CDF over descending probabilities.

    This is the single sampling kernel: `sample` and the vectorized
    experiment harness both reduce to it, so their outcome statistics agree
    bit for bit given the same uniforms.
    """
    order = sorted_outcome_order(probs)
    cum = np.cumsum(probs[order])
    idx = np.searchsorted(cum, u, side="right")
    np.clip(idx, 0, len(cum) - 1, out=idx)
    sorted_counts = np.bincount(idx, minlength=len(cum))
    counts = np.empty(len(cum), dtype=np.int64)
    counts[order] = sorted_counts
    return counts


def sample(povm: Povm, rho, shots: int, stream: np.random.Generator) -> OutcomeRecord:
    """Draw ``shots`` i.i.d. outcomes of ``povm`` on ``rho`` from a caller-owned stream.

    Deterministic given the stream state and shot count. The stream is
    single-owner: do not share one Generator between concurrent tasks.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = born_probabilities(povm, rho)
    counts = counts_from_uniforms(probs, stream.random(shots))
    return OutcomeRecord(povm.povm_id, povm.labels, tuple(int(c) for c in counts), shots)
