"""Decision rules for universal hypothesis testing with certified error envelopes.

Three tests: the exact pure-state test (accept only if every draw lands on
the nominal projector), the tomography-based one-sample test (accept iff
||sigma_hat - rho||_1 <= c_m), and the two-sample test (accept iff
||sigma_hat - rho_hat||_1 <= c_k with k = min(m, n)). Thresholds come from
the tomography module's envelope inversion, so type I error is controlled
at the requested level by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measurement import OutcomeRecord
from .operators import SUPPORT_ATOL, DensityOperator, fidelity, trace_norm
from .states import PauliStringBasis, pauli_string_basis
from .tomography import (
    ConcentrationBound,
    TomographyEstimate,
    threshold_one_sample,
    threshold_two_sample,
)

KIND_PURE_ONE_SAMPLE = "pure-one-sample"
KIND_ONE_SAMPLE = "one-sample"
KIND_TWO_SAMPLE = "two-sample"

H0 = "H0"
H1 = "H1"


@dataclass(frozen=True)
class TestConfig:
    """A fully calibrated test: kind, scheme envelope, shot counts, level, threshold.

    The threshold is always the envelope solver's output for (scheme, m, n,
    alpha); supplying anything else is rejected, so a verdict can never
    carry a miscalibrated radius.
    """

    __test__ = False  # domain type, not a pytest collection target

    kind: str
    m: int
    alpha: float
    nominal: DensityOperator | None = None
    bound: ConcentrationBound | None = None
    n: int | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in (KIND_PURE_ONE_SAMPLE, KIND_ONE_SAMPLE, KIND_TWO_SAMPLE):
            raise ValueError(f"unknown test kind {self.kind!r}")
        if self.kind == KIND_TWO_SAMPLE:
            if self.n is None:
                raise ValueError("two-sample tests need n")
            if self.nominal is not None:
                raise ValueError("two-sample tests take no nominal state")
        elif self.nominal is None:
            raise ValueError(f"{self.kind} tests need a nominal state")
        expected = self._solve_threshold()
        if self.threshold is None:
            object.__setattr__(self, "threshold", expected)
        elif self.threshold != expected:
            raise ValueError(
                f"threshold {self.threshold!r} does not match the solver output {expected!r}"
            )

    def _solve_threshold(self) -> float:
        if self.kind == KIND_PURE_ONE_SAMPLE:
            return 0.0
        if self.bound is None:
            raise ValueError(f"{self.kind} tests need a concentration bound")
        if self.kind == KIND_ONE_SAMPLE:
            return threshold_one_sample(self.bound, self.m, self.alpha)
        return threshold_two_sample(self.bound, self.m, self.n, self.alpha)

    @property
    def scheme(self) -> str:
        return "pure" if self.bound is None else self.bound.label


@dataclass(frozen=True)
class TestVerdict:
    """Outcome of one test: declared hypothesis plus the statistic it came from.

    Invariant: decision == H0 exactly when statistic <= threshold (ties
    accept, matching the closed decision region).
    """

    __test__ = False  # domain type, not a pytest collection target

    decision: str
    statistic: float
    threshold: float
    scheme: str
    m: int
    n: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        accept = self.statistic <= self.threshold
        if (self.decision == H0) != accept:
            raise ValueError("decision contradicts statistic/threshold comparison")

    def to_json(self) -> dict:
        return {
            "decision": self.decision,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "scheme": self.scheme,
            "m": self.m,
            "n": self.n,
            "alpha": self.alpha,
        }


def _decide(statistic: float, threshold: float) -> str:
    return H0 if statistic <= threshold else H1


def pure_state_test(nominal: DensityOperator, record: OutcomeRecord) -> TestVerdict:
    """Exact test for a pure nominal state from projector-POVM draws.

    Accepts H0 iff every one of the m draws landed on the nominal projector
    (label 1), so the type I error is exactly zero. The statistic is the
    number of off-projector outcomes and the threshold is 0.
    """
    if nominal.rank != 1:
        raise ValueError(f"nominal state must be pure (rank 1), got rank {nominal.rank}")
    if set(record.labels) != {0, 1}:
        raise ValueError("record must come from the projector POVM with labels 1/0")
    off = record.counts[record.labels.index(0)]
    return TestVerdict(_decide(float(off), 0.0), float(off), 0.0, "pure", record.shots)


def pure_state_beta_exact(nominal: DensityOperator, true_state, m: int) -> float:
    """Exact type II error of the pure-state test: F(nominal, true)^m."""
    if nominal.rank != 1:
        raise ValueError("nominal state must be pure")
    return fidelity(nominal, true_state) ** m


def one_sample_test(
    nominal: DensityOperator, estimate: TomographyEstimate, config: TestConfig
) -> TestVerdict:
    """Tomography-based one-sample test: accept iff ||sigma_hat - rho||_1 <= c_m."""
    if config.kind != KIND_ONE_SAMPLE:
        raise ValueError(f"config kind {config.kind!r} is not one-sample")
    if config.bound is not None and estimate.scheme != config.bound.label:
        raise ValueError(
            f"estimate scheme {estimate.scheme!r} does not match config {config.bound.label!r}"
        )
    if estimate.dim != nominal.dim:
        raise ValueError("dimension mismatch between estimate and nominal")
    stat = trace_norm(estimate.matrix - nominal.matrix)
    return TestVerdict(
        _decide(stat, config.threshold), stat, config.threshold,
        estimate.scheme, config.m, alpha=config.alpha,
    )


def two_sample_test(
    estimate_sigma: TomographyEstimate, estimate_rho: TomographyEstimate, config: TestConfig
) -> TestVerdict:
    """Two-sample test on two independent estimates: accept iff their distance <= c_k."""
    if config.kind != KIND_TWO_SAMPLE:
        raise ValueError(f"config kind {config.kind!r} is not two-sample")
    if estimate_sigma.scheme != estimate_rho.scheme:
        raise ValueError("both estimates must come from the same scheme")
    if config.bound is not None and estimate_sigma.scheme != config.bound.label:
        raise ValueError(
            f"estimate scheme {estimate_sigma.scheme!r} does not match config "
            f"{config.bound.label!r}"
        )
    if estimate_sigma.dim != estimate_rho.dim:
        raise ValueError("dimension mismatch between the two estimates")
    stat = trace_norm(estimate_sigma.matrix - estimate_rho.matrix)
    return TestVerdict(
        _decide(stat, config.threshold), stat, config.threshold,
        estimate_sigma.scheme, config.m, n=config.n, alpha=config.alpha,
    )


def type2_envelope_one_sample(
    bound: ConcentrationBound, m: int, alpha: float, separation: float
) -> float:
    """Certified upper bound on beta when the true state sits at the given trace-norm distance.

    g(m) exp(-m C (separation - c_m)^2), clamped to [0, 1]; vacuous (= 1)
    whenever separation <= c_m. Diagnostic only: the decision rule never
    sees the true state.
    """
    c = threshold_one_sample(bound, m, alpha)
    if separation <= c:
        return 1.0
    gap = separation - c
    return min(math.exp(bound.log_prefactor(m) - m * bound.rate * gap * gap), 1.0)


def type2_envelope_two_sample(
    bound: ConcentrationBound, m: int, n: int, alpha: float, separation: float
) -> float:
    """Two-sample beta envelope (g(n)+g(m)) exp(-k C (separation^2 - 2 c_k) / 4), clamped to [0, 1]."""
    c = threshold_two_sample(bound, m, n, alpha)
    k = min(m, n)
    log_g_sum = float(np.logaddexp(bound.log_prefactor(m), bound.log_prefactor(n)))
    exponent = log_g_sum - k * bound.rate * (separation * separation - 2.0 * c) / 4.0
    if exponent >= 0.0:
        return 1.0
    return math.exp(exponent)


def synthetic_estimate(
    true_state: DensityOperator,
    bound: ConcentrationBound,
    m: int,
    stream: np.random.Generator,
    basis: PauliStringBasis | None = None,
) -> TomographyEstimate:
    """Synthetic estimate whose deviation saturates a concentration envelope.

    For schemes whose measurement procedure is out of scope (2-design,
    entangled), draw ||sigma_hat - sigma||_1 = t with survival function
    min(1, g(m) exp(-m C t^2)) by inverse transform, pick a uniformly random
    traceless Hermitian direction, and return sigma + t * direction. The
    result is unit trace, Hermitian, and generally non-physical.
    """
    d = true_state.dim
    b = int(round(math.log2(d)))
    if 2**b != d:
        raise ValueError("synthetic estimates require qubit-register dimensions (d = 2^b)")
    basis = basis if basis is not None else pauli_string_basis(b)
    t = synthetic_deviation(bound, m, stream)
    coeffs = stream.standard_normal(len(basis.operators))
    direction = np.zeros((d, d), dtype=complex)
    for c, op in zip(coeffs, basis.operators):
        direction = direction + c * op
    scale = t / max(trace_norm(direction), SUPPORT_ATOL)
    return TomographyEstimate(true_state.matrix + scale * direction, bound.label, m, False)


def synthetic_deviation(bound: ConcentrationBound, m: int, stream: np.random.Generator) -> float:
    """Draw t with Pr[t >= s] = min(1, g(m) exp(-m C s^2)) via inverse transform."""
    u = stream.random()
    while u <= 0.0:  # pragma: no cover - measure-zero guard
        u = stream.random()
    return math.sqrt((bound.log_prefactor(m) - math.log(u)) / (bound.rate * m))
