"""Tomography estimators, concentration envelopes, and threshold solvers.

An estimator turns measurement records into a unit-trace Hermitian matrix;
a ConcentrationBound certifies Pr[||tau - tau_hat||_1 >= t] <= g(m) exp(-m C t^2)
for that estimator; the threshold solvers invert the envelope to calibrate
decision rules at a requested type I level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .measurement import OutcomeRecord
from .operators import PSD_ATOL, TRACE_ATOL
from .states import PauliStringBasis, pauli_string_basis

SCHEME_PAULI_QUBIT = "pauli-qubit"
SCHEME_PAULI_STRING = "pauli-string"
SCHEME_INDEP_TWO_DESIGN = "indep-two-design"
SCHEME_ENTANGLED = "entangled"


@dataclass(frozen=True)
class ConcentrationBound:
    """Certified envelope Pr[||tau - tau_hat||_1 >= t] <= g(m) exp(-m * rate * t^2).

    The prefactor is g(m) = prefactor_base * (m + 1)**prefactor_power, which
    covers both the constant prefactors of the independent-measurement
    schemes and the polynomial prefactor of the entangled scheme. All
    arithmetic runs in log space so large prefactors do not overflow.

    ``valid_t_max`` records the deviation range on which the source
    guarantee was stated; thresholds beyond it are reported with a warning
    but never clamped here.
    """

    label: str
    rate: float  # C, per unit m * t^2
    prefactor_base: float
    prefactor_power: float = 0.0
    valid_t_max: float = math.inf
    dim: int | None = None
    rank: int | None = None

    def __post_init__(self):
        if self.rate <= 0 or self.prefactor_base <= 0:
            raise ValueError("rate and prefactor must be positive")

    def log_prefactor(self, m: int) -> float:
        return math.log(self.prefactor_base) + self.prefactor_power * math.log(m + 1)

    def prefactor(self, m: int) -> float:
        if self.prefactor_power == 0.0:
            return self.prefactor_base
        return math.exp(self.log_prefactor(m))

    def evaluate(self, m: int, t: float) -> float:
        """Envelope value g(m) exp(-m * rate * t^2); may exceed 1 (vacuous regime)."""
        if self.prefactor_power == 0.0:
            return self.prefactor_base * math.exp(-m * self.rate * t * t)
        return math.exp(self.log_prefactor(m) - m * self.rate * t * t)


def bound_pauli_qubit() -> ConcentrationBound:
    """Envelope of the qubit Pauli-axis estimator: 6 exp(-m t^2 / 54)."""
    return ConcentrationBound(SCHEME_PAULI_QUBIT, 1.0 / 54.0, 6.0, dim=2)


def bound_pauli_string(b: int) -> ConcentrationBound:
    """Envelope of the b-qubit Pauli-string estimator.

    g = 2(d^2 - 1), C = 1 / (2 (d^2 - 1)^3) with d = 2^b; reduces to the
    qubit constants at b = 1.
    """
    if b < 1:
        raise ValueError("qubit count must be >= 1")
    d = 2**b
    k = d * d - 1
    return ConcentrationBound(SCHEME_PAULI_STRING, 1.0 / (2.0 * k**3), 2.0 * k, dim=d)


def bound_indep_two_design(d: int, r: int) -> ConcentrationBound:
    """Envelope of rank-aware independent 2-design tomography: d exp(-m t^2 / (86 r^2 d)).

    Pass r = d for the rank-free weakened form with C = 1 / (86 d^3). Valid
    for deviations t in (0, 1).
    """
    if not 1 <= r <= d:
        raise ValueError(f"rank must satisfy 1 <= r <= d, got r={r}, d={d}")
    return ConcentrationBound(
        SCHEME_INDEP_TWO_DESIGN, 1.0 / (86.0 * r * r * d), float(d), valid_t_max=1.0, dim=d, rank=r
    )


def bound_entangled(d: int, r: int) -> ConcentrationBound:
    """Trace-norm envelope of entangled-measurement tomography.

    g(m) = (m + 1)**(3 r d), C = 1/2. Pass r = d for the rank-free weakened
    prefactor (m + 1)**(3 d^2). Derived from the fidelity-form guarantee
    Pr[F <= 1 - delta] <= (m+1)**(3rd) exp(-2 m delta) via delta = t^2 / 4,
    so the t-range of validity is (0, 2).
    """
    if not 1 <= r <= d:
        raise ValueError(f"rank must satisfy 1 <= r <= d, got r={r}, d={d}")
    return ConcentrationBound(
        SCHEME_ENTANGLED, 0.5, 1.0, prefactor_power=3.0 * r * d, valid_t_max=2.0, dim=d, rank=r
    )


def entangled_fidelity_tail(d: int, r: int, m: int, delta: float) -> float:
    """Fidelity-form guarantee Pr[F(tau, tau_hat) <= 1 - delta] <= (m+1)^(3rd) exp(-2 m delta)."""
    if not 1 <= r <= d:
        raise ValueError(f"rank must satisfy 1 <= r <= d, got r={r}, d={d}")
    return math.exp(3.0 * r * d * math.log(m + 1) - 2.0 * m * delta)


def threshold_one_sample(bound: ConcentrationBound, m: int, alpha: float) -> float:
    """Acceptance radius c_m with bound.evaluate(m, c_m) = alpha.

    Closed form c_m = sqrt(ln(g(m)/alpha) / (C m)); returns 0 when
    alpha >= g(m) (the envelope is already below alpha at t = 0).
    """
    _check_alpha(alpha)
    if m < 1:
        raise ValueError("m must be >= 1")
    excess = bound.log_prefactor(m) - math.log(alpha)
    if excess <= 0.0:
        return 0.0
    c = math.sqrt(excess / (bound.rate * m))
    _warn_outside_validity(bound, c)
    return c


def threshold_two_sample(bound: ConcentrationBound, m: int, n: int, alpha: float) -> float:
    """Two-sample acceptance radius c_k with (g(n)+g(m)) exp(-k C c_k^2 / 4) = alpha.

    k = min(m, n). Closed form c_k = sqrt(4 ln((g(n)+g(m))/alpha) / (C k)).
    """
    _check_alpha(alpha)
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    k = min(m, n)
    log_g_sum = np.logaddexp(bound.log_prefactor(m), bound.log_prefactor(n))
    excess = float(log_g_sum) - math.log(alpha)
    if excess <= 0.0:
        return 0.0
    c = math.sqrt(4.0 * excess / (bound.rate * k))
    _warn_outside_validity(bound, c)
    return c


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def _warn_outside_validity(bound: ConcentrationBound, c: float) -> None:
    if c > bound.valid_t_max:
        warnings.warn(
            f"threshold {c:.4f} exceeds the validity range (0, {bound.valid_t_max:g}) "
            f"of the {bound.label} envelope; increase m or alpha",
            stacklevel=3,
        )


@dataclass(frozen=True)
class TomographyEstimate:
    """Linear-inversion reconstruction: unit trace, Hermitian, possibly non-PSD."""

    matrix: np.ndarray
    scheme: str
    shots_used: int
    physical: bool

    def __post_init__(self):
        tr = float(np.real(np.trace(self.matrix)))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"estimate trace {tr!r} is not 1")
        m = np.asarray(self.matrix, dtype=complex).copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        return {
            "matrix": {
                "re": np.real(self.matrix).tolist(),
                "im": np.imag(self.matrix).tolist(),
            },
            "scheme": self.scheme,
            "shots_used": self.shots_used,
            "physical": self.physical,
        }


def _labeled_mean(record: OutcomeRecord) -> float:
    if set(record.labels) != {1, -1}:
        raise ValueError(f"record {record.povm_id} must carry labels +1/-1")
    plus = record.counts[record.labels.index(1)]
    minus = record.counts[record.labels.index(-1)]
    return (plus - minus) / record.shots


def pauli_string_estimate(
    records, qubit_count: int, basis: PauliStringBasis | None = None
) -> TomographyEstimate:
    """Linear-inversion estimate (I + sum_i c_i P_i) / d from per-string records.

    Expects one +1/-1 record per nontrivial Pauli string, in basis order,
    all with equal shots. The estimate is unbiased per component but is not
    projected onto the physical set.
    """
    basis = basis if basis is not None else pauli_string_basis(qubit_count)
    records = list(records)
    expected = len(basis.operators)
    if len(records) != expected:
        raise ValueError(f"need {expected} records for {qubit_count} qubits, got {len(records)}")
    shots = records[0].shots
    if any(rec.shots != shots for rec in records):
        raise ValueError("all records must have equal shot counts")
    d = basis.dim
    acc = np.eye(d, dtype=complex)
    coeffs = []
    for rec, op in zip(records, basis.operators):
        c = _labeled_mean(rec)
        coeffs.append(c)
        acc = acc + c * op
    matrix = acc / d
    physical = bool(np.linalg.eigvalsh(matrix)[0] >= -PSD_ATOL)
    return TomographyEstimate(matrix, SCHEME_PAULI_STRING, shots * expected, physical)


def qubit_pauli_estimate(records) -> TomographyEstimate:
    """Qubit Bloch estimate (1/2)(I + r_hat . sigma) from X, Y, Z records.

    The three records must arrive in X, Y, Z order with equal shots m/3.
    Delegates to the Pauli-string path at b = 1 so the two produce
    bit-identical matrices on identical records.
    """
    est = pauli_string_estimate(records, 1)
    return replace(est, scheme=SCHEME_PAULI_QUBIT)
