"""Monte Carlo harness, exact enumeration oracles, exponent fits, and inequality scans.

Every number in the acceptance suite is produced here. Trials are addressed
by (master seed, grid index, trial index) through the counter-based stream
scheme in :mod:`quht.rng`, and per-chunk results are integer counts, so a
run is bitwise reproducible for any thread count and chunking.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .hypotest import (
    KIND_ONE_SAMPLE,
    KIND_PURE_ONE_SAMPLE,
    KIND_TWO_SAMPLE,
    synthetic_deviation,
    type2_envelope_one_sample,
    type2_envelope_two_sample,
)
from .measurement import born_probabilities, pauli_string_povm, projector_povm
from .operators import DensityOperator, fidelity, relative_entropy, trace_norm
from .rng import blocks_per_trial, chunk_uniforms, object_stream, stream_key
from .states import bloch_from_density, pauli_string_basis, random_density, state_to_json
from .tomography import (
    SCHEME_ENTANGLED,
    SCHEME_INDEP_TWO_DESIGN,
    SCHEME_PAULI_QUBIT,
    SCHEME_PAULI_STRING,
    ConcentrationBound,
    bound_entangled,
    bound_indep_two_design,
    bound_pauli_qubit,
    bound_pauli_string,
    threshold_one_sample,
    threshold_two_sample,
)

SCHEME_PURE = "pure"

# 95% normal quantile used for Wilson intervals throughout.
WILSON_Z = 1.959963984540054

# Trials per vectorized chunk are sized to stay near this many doubles.
_CHUNK_TARGET_DOUBLES = 3_000_000
_SYNTHETIC_CHUNK = 1024

# Enumeration oracle budget: (m/3 + 1)^3 outcome triples.
_ORACLE_MAX_SHOTS_PER_AXIS = 400


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else QUHT_THREADS, else machine parallelism."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("QUHT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; well behaved near 0."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(center - half, 0.0)
    hi = 1.0 if errors == trials else min(center + half, 1.0)
    return lo, hi


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of -ln(beta_hat) against m, with residual diagnostics."""

    slope: float
    intercept: float
    residual_rms: float
    points_used: int


def fit_exponent(points: Sequence[tuple[int, float]]) -> ExponentFit:
    """Fit the empirical type II exponent from (m, beta_hat) pairs.

    Points with beta_hat outside (0, 1) are excluded (the log is undefined
    or the point carries no decay information); at least three usable
    points are required.
    """
    usable = [(m, b) for m, b in points if 0.0 < b < 1.0]
    if len(usable) < 3:
        raise ValueError(
            f"insufficient data: need >= 3 points with beta_hat in (0, 1), have {len(usable)}"
        )
    x = np.array([m for m, _ in usable], dtype=float)
    y = np.array([-math.log(b) for _, b in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid * resid)))
    return ExponentFit(float(slope), float(intercept), rms, len(usable))


# ---------------------------------------------------------------------------
# Experiment plans and results


@dataclass(frozen=True)
class ExperimentPlan:
    """A reproducible Monte Carlo sweep over shot counts.

    ``nominal`` is the tested reference state; for two-sample runs (which
    have no nominal in the decision rule) it is the source of the second
    measurement sequence. ``true_state`` present means a type II (beta) run
    drawing the first sequence from it; absent means a type I (alpha) run.
    """

    kind: str
    scheme: str
    nominal: DensityOperator
    m_grid: tuple[int, ...]
    trials: int
    alpha: float
    master_seed: int
    true_state: DensityOperator | None = None
    n_grid: tuple[int, ...] | None = None
    qubit_count: int = 1
    rank: int | None = None
    synthetic: bool = False
    max_draws: int = 4_000_000_000

    def __post_init__(self):
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        if self.n_grid is not None:
            object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        self._validate()

    # -- validation -------------------------------------------------------

    def _validate(self) -> None:
        if self.kind not in (KIND_PURE_ONE_SAMPLE, KIND_ONE_SAMPLE, KIND_TWO_SAMPLE):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.kind == KIND_PURE_ONE_SAMPLE:
            if self.scheme != SCHEME_PURE:
                raise ValueError("pure-one-sample runs use scheme 'pure'")
            if self.nominal.rank != 1:
                raise ValueError("pure-one-sample runs need a pure nominal state")
        else:
            if self.scheme == SCHEME_PURE:
                raise ValueError(f"scheme 'pure' only pairs with kind {KIND_PURE_ONE_SAMPLE!r}")
            if self.scheme not in (
                SCHEME_PAULI_QUBIT,
                SCHEME_PAULI_STRING,
                SCHEME_INDEP_TWO_DESIGN,
                SCHEME_ENTANGLED,
            ):
                raise ValueError(f"unknown scheme {self.scheme!r}")
            if not 0.0 < self.alpha < 1.0:
                raise ValueError("alpha must lie in (0, 1)")
        if self.trials < 100:
            raise ValueError("trials must be >= 100")
        _require_increasing("m_grid", self.m_grid)
        if self.kind == KIND_TWO_SAMPLE:
            if self.n_grid is not None:
                if len(self.n_grid) != len(self.m_grid):
                    raise ValueError("n_grid must match m_grid in length")
                _require_increasing("n_grid", self.n_grid)
        elif self.n_grid is not None:
            raise ValueError("n_grid is only meaningful for two-sample runs")
        if self.true_state is not None and self.true_state.dim != self.nominal.dim:
            raise ValueError("true_state and nominal must share a dimension")

        if self.scheme == SCHEME_PAULI_QUBIT:
            if self.nominal.dim != 2:
                raise ValueError("pauli-qubit runs need qubit states")
            for m in self.m_grid + (self.n_grid or ()):
                if m % 3 != 0:
                    raise ValueError(f"pauli-qubit shot counts must be divisible by 3, got {m}")
        if self.scheme == SCHEME_PAULI_STRING:
            d = 2**self.qubit_count
            if self.nominal.dim != d:
                raise ValueError(
                    f"pauli-string runs on {self.qubit_count} qubits need dimension {d}"
                )
            per = 4**self.qubit_count - 1
            for m in self.m_grid + (self.n_grid or ()):
                if m // per < 1:
                    raise ValueError(f"m={m} leaves no shots per basis operator ({per} needed)")
        if self.scheme in (SCHEME_INDEP_TWO_DESIGN, SCHEME_ENTANGLED) and not self.synthetic:
            raise ValueError(
                f"scheme {self.scheme!r} has no simulable measurement procedure; "
                "set synthetic=True to run envelope-saturating synthetic estimates"
            )
        if self.synthetic and self.scheme in (SCHEME_PAULI_QUBIT, SCHEME_PAULI_STRING, SCHEME_PURE):
            raise ValueError("synthetic mode only applies to the envelope-only schemes")

        cost = self.estimated_draws()
        if cost > self.max_draws:
            raise ValueError(
                f"plan would draw about {cost:.3g} samples, beyond the budget "
                f"{self.max_draws:.3g}; shrink trials or the grid, or raise max_draws"
            )

    # -- derived quantities -------------------------------------------------

    def estimated_draws(self) -> int:
        per_trial = [self._stride(i) for i in range(len(self.m_grid))]
        return self.trials * sum(per_trial)

    def _n_at(self, index: int) -> int | None:
        if self.kind != KIND_TWO_SAMPLE:
            return None
        return (self.n_grid or self.m_grid)[index]

    def _stride(self, index: int) -> int:
        """Uniform doubles one trial consumes at grid point ``index``."""
        m = self.m_grid[index]
        n = self._n_at(index)
        if self.scheme == SCHEME_PURE:
            return m
        if self.scheme == SCHEME_PAULI_QUBIT:
            return m + (n or 0)
        if self.scheme == SCHEME_PAULI_STRING:
            per = 4**self.qubit_count - 1
            total = per * (m // per)
            if n is not None:
                total += per * (n // per)
            return total
        # synthetic schemes: object-mode streams; count one draw for the
        # deviation plus the direction coefficients, per side
        d = self.nominal.dim
        per_side = d * d
        return per_side if n is None else 2 * per_side

    def bound(self) -> ConcentrationBound | None:
        if self.scheme == SCHEME_PURE:
            return None
        if self.scheme == SCHEME_PAULI_QUBIT:
            return bound_pauli_qubit()
        if self.scheme == SCHEME_PAULI_STRING:
            return bound_pauli_string(self.qubit_count)
        d = self.nominal.dim
        r = self.rank if self.rank is not None else d
        if self.scheme == SCHEME_INDEP_TWO_DESIGN:
            return bound_indep_two_design(d, r)
        return bound_entangled(d, r)

    @property
    def mode(self) -> str:
        return "beta" if self.true_state is not None else "alpha"


def _require_increasing(name: str, grid: tuple[int, ...]) -> None:
    if not grid:
        raise ValueError(f"{name} must be nonempty")
    if any(g < 1 for g in grid):
        raise ValueError(f"{name} entries must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"{name} must be strictly increasing")


@dataclass(frozen=True)
class GridPointResult:
    """One grid point of an experiment: error count, rate, interval, envelope."""

    m: int
    n: int | None
    trials: int
    errors: int
    rate: float
    ci_lo: float
    ci_hi: float
    envelope: float
    threshold: float
    vacuous: bool = False


@dataclass(frozen=True)
class ExperimentResult:
    """Full outcome of one experiment plan."""

    kind: str
    scheme: str
    mode: str  # "alpha" or "beta"
    alpha: float
    master_seed: int
    trials: int
    rows: tuple[GridPointResult, ...]
    separation: float | None = None
    theoretical_exponent: float | None = None
    fit: ExponentFit | None = None

    def rates(self) -> list[float]:
        return [row.rate for row in self.rows]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "scheme": self.scheme,
            "mode": self.mode,
            "alpha": self.alpha,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "separation": self.separation,
            "theoretical_exponent": self.theoretical_exponent,
            "fitted_exponent": None,
            "fit": None,
            "grid": [
                {
                    "m": row.m,
                    "n": row.n,
                    "trials": row.trials,
                    "errors": row.errors,
                    ("beta_hat" if self.mode == "beta" else "alpha_hat"): row.rate,
                    "ci_lo": row.ci_lo,
                    "ci_hi": row.ci_hi,
                    "envelope": row.envelope,
                    "threshold": row.threshold,
                    "vacuous": row.vacuous,
                }
                for row in self.rows
            ],
        }
        if self.fit is not None:
            out["fitted_exponent"] = self.fit.slope
            out["fit"] = {
                "slope": self.fit.slope,
                "intercept": self.fit.intercept,
                "residual_rms": self.fit.residual_rms,
                "points_used": self.fit.points_used,
            }
        return out

    def csv_text(self) -> str:
        """Delimited summary; floats carry 17 significant digits for exact round trips."""
        lines = [f"# quht {__version__}", "m,trials,alpha_hat,beta_hat,ci_lo,ci_hi,envelope,exponent_fit"]
        fitted = _fmt(self.fit.slope) if self.fit is not None else ""
        for row in self.rows:
            alpha_hat = _fmt(row.rate) if self.mode == "alpha" else ""
            beta_hat = _fmt(row.rate) if self.mode == "beta" else ""
            lines.append(
                f"{row.m},{row.trials},{alpha_hat},{beta_hat},"
                f"{_fmt(row.ci_lo)},{_fmt(row.ci_hi)},{_fmt(row.envelope)},{fitted}"
            )
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# The Monte Carlo engine


def run_experiment(plan: ExperimentPlan, threads: int | None = None) -> ExperimentResult:
    """Execute a plan and return per-grid error rates with certificates.

    Deterministic given the master seed: trial ``t`` at grid index ``g``
    always consumes the same counter block of the same keyed stream, so the
    result is identical for any thread count.
    """
    workers = resolve_threads(threads)
    bound = plan.bound()
    separation = None
    theoretical = None
    if plan.mode == "beta":
        separation = trace_norm(plan.nominal.matrix - plan.true_state.matrix)
        if plan.scheme == SCHEME_PURE:
            f = fidelity(plan.nominal, plan.true_state)
            theoretical = math.inf if f <= 0.0 else -math.log(f)
        elif plan.kind == KIND_ONE_SAMPLE:
            theoretical = bound.rate * separation * separation
        else:
            theoretical = bound.rate * separation * separation / 4.0

    rows = []
    for gi, m in enumerate(plan.m_grid):
        n = plan._n_at(gi)
        if plan.scheme == SCHEME_PURE:
            threshold = 0.0
        elif plan.kind == KIND_ONE_SAMPLE:
            threshold = threshold_one_sample(bound, m, plan.alpha)
        else:
            threshold = threshold_two_sample(bound, m, n, plan.alpha)
        errors = _run_grid_point(plan, gi, m, n, threshold, workers)
        rate = errors / plan.trials
        if errors == 0:
            ci = (0.0, 3.0 / plan.trials)  # rule of three
        else:
            ci = wilson_interval(errors, plan.trials)
        envelope, vacuous = _envelope_for(plan, bound, m, n, separation)
        rows.append(
            GridPointResult(
                m, n, plan.trials, int(errors), rate, ci[0], ci[1], envelope, threshold, vacuous
            )
        )

    fit = None
    if plan.mode == "beta":
        eligible = [(row.m, row.rate) for row in rows if row.errors >= 10 and 0.0 < row.rate < 1.0]
        if len(eligible) >= 3:
            fit = fit_exponent(eligible)
    return ExperimentResult(
        plan.kind,
        plan.scheme,
        plan.mode,
        plan.alpha,
        plan.master_seed,
        plan.trials,
        tuple(rows),
        separation,
        theoretical,
        fit,
    )


def _envelope_for(plan, bound, m, n, separation) -> tuple[float, bool]:
    if plan.mode == "alpha":
        return (0.0 if plan.scheme == SCHEME_PURE else plan.alpha), False
    if plan.scheme == SCHEME_PURE:
        return fidelity(plan.nominal, plan.true_state) ** m, False
    if plan.kind == KIND_ONE_SAMPLE:
        env = type2_envelope_one_sample(bound, m, plan.alpha, separation)
    else:
        env = type2_envelope_two_sample(bound, m, n, plan.alpha, separation)
    return env, env >= 1.0


def _run_grid_point(plan, gi, m, n, threshold, workers) -> int:
    key = stream_key(plan.master_seed, gi)
    if plan.synthetic:
        kernel = _SyntheticKernel(plan, gi, m, n, threshold)
        chunk = _SYNTHETIC_CHUNK
    else:
        stride = plan._stride(gi)
        kernel = _uniform_kernel(plan, key, m, n, stride, threshold)
        chunk = max(1, min(65536, -(-_CHUNK_TARGET_DOUBLES // max(stride, 1))))
    ranges = [(t0, min(t0 + chunk, plan.trials)) for t0 in range(0, plan.trials, chunk)]
    if workers <= 1 or len(ranges) == 1:
        return sum(kernel(t0, t1) for t0, t1 in ranges)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda r: kernel(*r), ranges))


def _sorted_binary(p_first_value: float) -> tuple[float, bool]:
    """Descending-order head probability for a two-outcome POVM.

    Returns (p0, first_is_original_first): the probability mass of the
    descending-sorted leading outcome and whether that outcome is the
    POVM's first-listed one. Ties keep the original order, matching the
    stable sort in counts_from_uniforms.
    """
    p_second = 1.0 - p_first_value
    if p_first_value >= p_second:
        return p_first_value, True
    return p_second, False


def _axis_probs(source: DensityOperator, povms) -> list[tuple[float, bool]]:
    out = []
    for povm in povms:
        probs = born_probabilities(povm, source)
        out.append(_sorted_binary(float(probs[0])))
    return out


def _plus_counts(u: np.ndarray, lo: int, shots: int, p0: float, first_is_plus: bool) -> np.ndarray:
    """Count label +1 outcomes per trial row from the uniform block [lo, lo + shots)."""
    head = (u[:, lo : lo + shots] < p0).sum(axis=1)
    return head if first_is_plus else shots - head


def _uniform_kernel(plan, key, m, n, stride, threshold):
    """Build the vectorized per-chunk worker for the simulable schemes."""
    blocks = blocks_per_trial(stride)
    beta_mode = plan.mode == "beta"
    source_a = plan.true_state if beta_mode else plan.nominal
    two_sample = plan.kind == KIND_TWO_SAMPLE

    if plan.scheme == SCHEME_PURE:
        povm = projector_povm(plan.nominal)
        p0, first_is_on = _sorted_binary(float(born_probabilities(povm, source_a)[0]))

        def kernel(t0: int, t1: int) -> int:
            u = chunk_uniforms(key, t0, t1 - t0, blocks, stride)
            head = (u < p0).sum(axis=1)
            on = head if first_is_on else m - head
            accept = on == m
            return int(np.count_nonzero(~accept if not beta_mode else accept))

        return kernel

    if plan.scheme == SCHEME_PAULI_QUBIT:
        povms = [pauli_string_povm(axis) for axis in ("X", "Y", "Z")]
        probs_a = _axis_probs(source_a, povms)
        shots_m = m // 3
        if two_sample:
            probs_b = _axis_probs(plan.nominal, povms)
            shots_n = n // 3
        else:
            r_nominal = bloch_from_density(plan.nominal)

        def kernel(t0: int, t1: int) -> int:
            u = chunk_uniforms(key, t0, t1 - t0, blocks, stride)
            r_a = np.empty((t1 - t0, 3))
            for i, (p0, plus_first) in enumerate(probs_a):
                plus = _plus_counts(u, i * shots_m, shots_m, p0, plus_first)
                r_a[:, i] = (2 * plus - shots_m) / shots_m
            if two_sample:
                r_b = np.empty((t1 - t0, 3))
                base = 3 * shots_m
                for i, (p0, plus_first) in enumerate(probs_b):
                    plus = _plus_counts(u, base + i * shots_n, shots_n, p0, plus_first)
                    r_b[:, i] = (2 * plus - shots_n) / shots_n
                delta = r_a - r_b
            else:
                delta = r_a - r_nominal
            stat = np.sqrt(np.einsum("ij,ij->i", delta, delta))
            accept = stat <= threshold
            return int(np.count_nonzero(accept if beta_mode else ~accept))

        return kernel

    # pauli-string; b == 1 delegates to the qubit arithmetic via the same
    # closed-form statistic, so the two schemes match byte for byte there.
    basis = pauli_string_basis(plan.qubit_count)
    povms = [pauli_string_povm(label) for label in basis.labels]
    per = len(basis.operators)
    d = basis.dim
    probs_a = _axis_probs(source_a, povms)
    shots_m = m // per
    shots_n = (n // per) if two_sample else None
    if two_sample:
        probs_b = _axis_probs(plan.nominal, povms)
    op_stack = np.stack(basis.operators)  # (K, d, d)

    if plan.qubit_count == 1:
        r_nominal = None if two_sample else bloch_from_density(plan.nominal)

        def kernel(t0: int, t1: int) -> int:
            u = chunk_uniforms(key, t0, t1 - t0, blocks, stride)
            r_a = np.empty((t1 - t0, 3))
            for i, (p0, plus_first) in enumerate(probs_a):
                plus = _plus_counts(u, i * shots_m, shots_m, p0, plus_first)
                r_a[:, i] = (2 * plus - shots_m) / shots_m
            if two_sample:
                r_b = np.empty((t1 - t0, 3))
                base = 3 * shots_m
                for i, (p0, plus_first) in enumerate(probs_b):
                    plus = _plus_counts(u, base + i * shots_n, shots_n, p0, plus_first)
                    r_b[:, i] = (2 * plus - shots_n) / shots_n
                delta = r_a - r_b
            else:
                delta = r_a - r_nominal
            stat = np.sqrt(np.einsum("ij,ij->i", delta, delta))
            accept = stat <= threshold
            return int(np.count_nonzero(accept if beta_mode else ~accept))

        return kernel

    nominal_matrix = plan.nominal.matrix

    def kernel(t0: int, t1: int) -> int:
        u = chunk_uniforms(key, t0, t1 - t0, blocks, stride)
        coeffs_a = np.empty((t1 - t0, per))
        for i, (p0, plus_first) in enumerate(probs_a):
            plus = _plus_counts(u, i * shots_m, shots_m, p0, plus_first)
            coeffs_a[:, i] = (2 * plus - shots_m) / shots_m
        if two_sample:
            coeffs_b = np.empty((t1 - t0, per))
            base = per * shots_m
            for i, (p0, plus_first) in enumerate(probs_b):
                plus = _plus_counts(u, base + i * shots_n, shots_n, p0, plus_first)
                coeffs_b[:, i] = (2 * plus - shots_n) / shots_n
            deltas = np.tensordot(coeffs_a - coeffs_b, op_stack, axes=(1, 0)) / d
        else:
            mats = (np.eye(d, dtype=complex)[None] + np.tensordot(coeffs_a, op_stack, axes=(1, 0))) / d
            deltas = mats - nominal_matrix[None]
        stat = np.abs(np.linalg.eigvalsh(deltas)).sum(axis=1)
        accept = stat <= threshold
        return int(np.count_nonzero(accept if beta_mode else ~accept))

    return kernel


class _SyntheticKernel:
    """Per-chunk worker for the envelope-only schemes (object-mode streams).

    Draws a deviation magnitude that saturates the scheme's concentration
    envelope and a uniformly random traceless Hermitian direction, forming
    sigma_hat = sigma + t * direction for each side of the test.
    """

    def __init__(self, plan, gi, m, n, threshold):
        self.plan = plan
        self.gi = gi
        self.m = m
        self.n = n
        self.threshold = threshold
        self.bound = plan.bound()
        b = int(round(math.log2(plan.nominal.dim)))
        if 2**b != plan.nominal.dim:
            raise ValueError("synthetic runs need qubit-register dimensions")
        basis = pauli_string_basis(b)
        self.op_stack = np.stack(basis.operators)
        self.beta_mode = plan.mode == "beta"
        self.source_a = (plan.true_state if self.beta_mode else plan.nominal).matrix
        self.source_b = plan.nominal.matrix
        self.two_sample = plan.kind == KIND_TWO_SAMPLE

    def _perturbed(self, base: np.ndarray, shots: int, stream) -> np.ndarray:
        t = synthetic_deviation(self.bound, shots, stream)
        coeffs = stream.standard_normal(len(self.op_stack))
        direction = np.tensordot(coeffs, self.op_stack, axes=(0, 0))
        norm = float(np.abs(np.linalg.eigvalsh(direction)).sum())
        return base + (t / norm) * direction

    def __call__(self, t0: int, t1: int) -> int:
        errors = 0
        for trial in range(t0, t1):
            stream = object_stream(self.plan.master_seed, self.gi, trial)
            est_a = self._perturbed(self.source_a, self.m, stream)
            if self.two_sample:
                est_b = self._perturbed(self.source_b, self.n, stream)
            else:
                est_b = self.source_b
            stat = float(np.abs(np.linalg.eigvalsh(est_a - est_b)).sum())
            accept = stat <= self.threshold
            if accept == self.beta_mode:
                errors += 1
        return errors


# ---------------------------------------------------------------------------
# Concentration sweeps (estimator deviation vs envelope)


@dataclass(frozen=True)
class ConcentrationSweep:
    """Empirical survival fractions of ||sigma_hat - sigma||_1 against an envelope."""

    scheme: str
    m: int
    estimates: int
    thresholds: tuple[float, ...]
    exceed_counts: tuple[int, ...]
    fractions: tuple[float, ...]
    envelope: tuple[float, ...]


def concentration_sweep(
    state: DensityOperator,
    m: int,
    estimates: int,
    master_seed: int,
    thresholds: Sequence[float],
    qubit_count: int = 1,
    threads: int | None = None,
) -> ConcentrationSweep:
    """Measure Pr[||sigma_hat - sigma||_1 >= t] for the Pauli estimator at each t.

    Uses the same stream addressing as run_experiment with grid index 0;
    deterministic per master seed and thread-count independent.
    """
    basis = pauli_string_basis(qubit_count)
    per = len(basis.operators)
    d = basis.dim
    if state.dim != d:
        raise ValueError(f"state dimension {state.dim} does not match {qubit_count} qubits")
    shots = m // per
    if shots < 1:
        raise ValueError(f"m={m} leaves no shots per basis operator")
    stride = per * shots
    blocks = blocks_per_trial(stride)
    key = stream_key(master_seed, 0)
    povms = [pauli_string_povm(label) for label in basis.labels]
    probs = _axis_probs(state, povms)
    thresholds = tuple(float(t) for t in thresholds)
    t_arr = np.array(thresholds)
    op_stack = np.stack(basis.operators)
    state_matrix = state.matrix
    bloch = bloch_from_density(state) if d == 2 else None

    def kernel(t0: int, t1: int) -> np.ndarray:
        u = chunk_uniforms(key, t0, t1 - t0, blocks, stride)
        coeffs = np.empty((t1 - t0, per))
        for i, (p0, plus_first) in enumerate(probs):
            plus = _plus_counts(u, i * shots, shots, p0, plus_first)
            coeffs[:, i] = (2 * plus - shots) / shots
        if d == 2:
            delta = coeffs - bloch
            dev = np.sqrt(np.einsum("ij,ij->i", delta, delta))
        else:
            mats = (np.eye(d, dtype=complex)[None] + np.tensordot(coeffs, op_stack, axes=(1, 0))) / d
            dev = np.abs(np.linalg.eigvalsh(mats - state_matrix[None])).sum(axis=1)
        return (dev[:, None] >= t_arr[None, :]).sum(axis=0).astype(np.int64)

    chunk = max(1, min(65536, -(-_CHUNK_TARGET_DOUBLES // max(stride, 1))))
    ranges = [(t0, min(t0 + chunk, estimates)) for t0 in range(0, estimates, chunk)]
    workers = resolve_threads(threads)
    if workers <= 1 or len(ranges) == 1:
        counts = sum(kernel(t0, t1) for t0, t1 in ranges)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = sum(pool.map(lambda r: kernel(*r), ranges))
    bound = bound_pauli_qubit() if qubit_count == 1 else bound_pauli_string(qubit_count)
    scheme = SCHEME_PAULI_QUBIT if qubit_count == 1 else SCHEME_PAULI_STRING
    return ConcentrationSweep(
        scheme,
        m,
        estimates,
        thresholds,
        tuple(int(c) for c in counts),
        tuple(int(c) / estimates for c in counts),
        tuple(bound.evaluate(m, t) for t in thresholds),
    )


# ---------------------------------------------------------------------------
# Exact enumeration oracle for the qubit Pauli test


def exact_qubit_pauli_errors(
    nominal: DensityOperator, true_state: DensityOperator, m: int, c: float
) -> tuple[float, float]:
    """Exact (alpha, beta) of the qubit Pauli one-sample test by full enumeration.

    Sums the product-binomial probability of every (k_X, k_Y, k_Z) count
    triple, classifying each by the closed-form statistic
    ||sigma_hat - nominal||_1 = |r_hat - r_nominal| (Euclidean). Exact up to
    floating point; serves as the independent oracle for the Monte Carlo
    harness.
    """
    if m % 3 != 0:
        raise ValueError("m must be divisible by 3")
    shots = m // 3
    if shots > _ORACLE_MAX_SHOTS_PER_AXIS:
        raise ValueError(
            f"enumeration budget exceeded: m/3 = {shots} > {_ORACLE_MAX_SHOTS_PER_AXIS}"
        )
    if nominal.dim != 2 or true_state.dim != 2:
        raise ValueError("oracle is defined for qubit states")
    r_nominal = bloch_from_density(nominal)

    def accept_probability(state: DensityOperator) -> float:
        r = bloch_from_density(state)
        p_plus = (1.0 + r) / 2.0
        pmf = [_binomial_pmf(shots, p) for p in p_plus]
        r_hat = (2.0 * np.arange(shots + 1) - shots) / shots
        sq = [(r_hat - r_nominal[i]) ** 2 for i in range(3)]
        c2 = c * c
        # z-axis: sort squared deviations once, use the pmf cumsum
        order = np.argsort(sq[2], kind="stable")
        z_sorted = sq[2][order]
        z_cum = np.concatenate([[0.0], np.cumsum(pmf[2][order])])
        total = 0.0
        for kx in range(shots + 1):
            budget = c2 - sq[0][kx]
            if budget < 0.0:
                continue
            rem = budget - sq[1]  # per k_Y allowance for the z deviation
            idx = np.searchsorted(z_sorted, rem, side="right")
            total += pmf[0][kx] * float(np.dot(pmf[1], z_cum[idx]))
        return total

    alpha_exact = 1.0 - accept_probability(nominal)
    beta_exact = accept_probability(true_state)
    return max(alpha_exact, 0.0), min(beta_exact, 1.0)


def _binomial_pmf(n: int, p: float) -> np.ndarray:
    k = np.arange(n + 1)
    if p <= 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if p >= 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    log_binom = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(i + 1) + math.lgamma(n - i + 1) for i in k])
    )
    return np.exp(log_binom + k * math.log(p) + (n - k) * math.log1p(-p))


# ---------------------------------------------------------------------------
# Classical Pinsker sharpness scan and quantum inequality suite


def pinsker_ratio(p, q) -> float:
    """KL(P||Q) in nats divided by the squared L1 distance ||P - Q||_1^2."""
    p = _require_distribution("P", p)
    q = _require_distribution("Q", q)
    if p.shape != q.shape:
        raise ValueError("P and Q must share an alphabet")
    if np.any((p > 0.0) & (q == 0.0)):
        raise ValueError("support(P) must be contained in support(Q)")
    if np.array_equal(p, q):
        raise ValueError("P and Q must differ (the ratio is 0/0 at P = Q)")
    mask = p > 0.0
    kl = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    l1 = float(np.sum(np.abs(p - q)))
    return kl / (l1 * l1)


def _require_distribution(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError(f"{name} must be a probability vector over >= 2 symbols")
    if np.any(arr < 0.0):
        raise ValueError(f"{name} has negative entries")
    if abs(float(np.sum(arr)) - 1.0) > 1e-12:
        raise ValueError(f"{name} does not sum to 1 within 1e-12")
    return arr


def pinsker_sharpness_scan(epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Exhibit binary distributions with KL / L1^2 ratio within epsilon of 1/2.

    Scans Q = (1/2 + t, 1/2 - t) against P = (1/2, 1/2) with t halving from
    0.25; the ratio decreases to 1/2 as t -> 0, so the scan must succeed for
    any positive epsilon. Failure to converge indicates a bug and raises.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    p = np.array([0.5, 0.5])
    t = 0.25
    while t >= 1e-9:
        q = np.array([0.5 + t, 0.5 - t])
        if pinsker_ratio(p, q) <= 0.5 + epsilon:
            return p, q
        t /= 2.0
    raise RuntimeError(
        "sharpness scan failed to reach ratio <= 1/2 + epsilon; "
        "this indicates a bug in pinsker_ratio"
    )


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of the random-pair trace-distance/fidelity/relative-entropy checks."""

    dim: int
    pairs: int
    min_fvdg_slack: float
    min_pinsker_slack: float
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pairs": self.pairs,
            "min_fvdg_slack": self.min_fvdg_slack,
            "min_pinsker_slack": self.min_pinsker_slack,
            "violations": list(self.violations),
            "passed": self.passed,
        }


# Slack below this threshold counts as a violation; both inequalities hold
# exactly, so anything beyond floating-point noise indicates a bug.
_INEQUALITY_SLACK_ATOL = 1e-9


def quantum_inequality_suite(seed: int, pairs: int, d: int) -> InequalityReport:
    """Check trace-distance/fidelity and relative-entropy/trace-distance inequalities.

    Random pairs (rho of random rank, sigma full rank) must satisfy
    (1/2)||rho - sigma||_1 <= sqrt(1 - F) and D(rho||sigma) >= (1/2)||rho - sigma||_1^2.
    Any violation is reported with the offending pair serialized.
    """
    rng = np.random.default_rng(seed)
    min_fvdg = math.inf
    min_pinsker = math.inf
    violations = []
    for index in range(pairs):
        rho = random_density(d, int(rng.integers(1, d + 1)), rng)
        sigma = random_density(d, d, rng)
        half_l1 = 0.5 * trace_norm(rho.matrix - sigma.matrix)
        fvdg_slack = math.sqrt(max(1.0 - fidelity(rho, sigma), 0.0)) - half_l1
        rel = relative_entropy(rho, sigma)
        pinsker_slack = rel - 2.0 * half_l1 * half_l1
        min_fvdg = min(min_fvdg, fvdg_slack)
        if math.isfinite(pinsker_slack):
            min_pinsker = min(min_pinsker, pinsker_slack)
        if fvdg_slack < -_INEQUALITY_SLACK_ATOL or pinsker_slack < -_INEQUALITY_SLACK_ATOL:
            violations.append(
                {
                    "index": index,
                    "rho": state_to_json(rho),
                    "sigma": state_to_json(sigma),
                    "fvdg_slack": fvdg_slack,
                    "pinsker_slack": pinsker_slack,
                }
            )
    return InequalityReport(d, pairs, min_fvdg, min_pinsker, tuple(violations))
