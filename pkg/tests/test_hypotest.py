import math

import numpy as np
import pytest

from quht import (
    TestConfig,
    TestVerdict,
    bound_entangled,
    bound_pauli_qubit,
    density_from_bloch,
    one_sample_test,
    projector_povm,
    pure_state,
    pure_state_beta_exact,
    pure_state_test,
    qubit_pauli_estimate,
    sample,
    synthetic_estimate,
    threshold_one_sample,
    threshold_two_sample,
    trace_norm,
    two_sample_test,
    type2_envelope_one_sample,
    type2_envelope_two_sample,
)
from quht.experiments import ExperimentPlan, run_experiment
from quht.hypotest import synthetic_deviation
from quht.measurement import OutcomeRecord, pauli_string_povm
from quht.rng import object_stream
from quht.tomography import TomographyEstimate


def _estimate_from(source, shots_per_axis, seed):
    rng = np.random.default_rng(seed)
    recs = [sample(pauli_string_povm(ax), source, shots_per_axis, rng) for ax in "XYZ"]
    return qubit_pauli_estimate(recs)


# --- configs and verdicts ---------------------------------------------------


def test_config_auto_threshold(maximally_mixed):
    cfg = TestConfig(kind="one-sample", m=5400, alpha=0.05, nominal=maximally_mixed,
                     bound=bound_pauli_qubit())
    assert cfg.threshold == threshold_one_sample(bound_pauli_qubit(), 5400, 0.05)
    assert cfg.scheme == "pauli-qubit"


def test_config_rejects_mismatched_threshold(maximally_mixed):
    with pytest.raises(ValueError, match="solver"):
        TestConfig(kind="one-sample", m=5400, alpha=0.05, nominal=maximally_mixed,
                   bound=bound_pauli_qubit(), threshold=0.3)


def test_config_kind_validation(maximally_mixed):
    with pytest.raises(ValueError, match="need n"):
        TestConfig(kind="two-sample", m=100, alpha=0.05, bound=bound_pauli_qubit())
    with pytest.raises(ValueError, match="no nominal"):
        TestConfig(kind="two-sample", m=100, n=100, alpha=0.05,
                   nominal=maximally_mixed, bound=bound_pauli_qubit())
    with pytest.raises(ValueError, match="nominal"):
        TestConfig(kind="one-sample", m=100, alpha=0.05, bound=bound_pauli_qubit())


def test_verdict_invariant():
    with pytest.raises(ValueError, match="contradicts"):
        TestVerdict("H0", statistic=0.5, threshold=0.2, scheme="pauli-qubit", m=100)
    v = TestVerdict("H0", statistic=0.2, threshold=0.2, scheme="pauli-qubit", m=100)
    assert v.to_json()["decision"] == "H0"
    assert set(v.to_json()) == {"decision", "statistic", "threshold", "scheme", "m", "n", "alpha"}


# --- pure-state test -----------------------------------------------------------


def test_pure_state_test_accepts_nominal(ket_zero):
    rng = np.random.default_rng(1)
    for _ in range(50):
        rec = sample(projector_povm(ket_zero), ket_zero, 40, rng)
        assert pure_state_test(ket_zero, rec).decision == "H0"


def test_pure_state_test_rejects_on_any_off_draw(ket_zero):
    rec = OutcomeRecord("projector", (1, 0), (39, 1), 40)
    verdict = pure_state_test(ket_zero, rec)
    assert verdict.decision == "H1"
    assert verdict.statistic == 1.0


def test_pure_state_test_requires_pure(maximally_mixed):
    rec = OutcomeRecord("projector", (1, 0), (40, 0), 40)
    with pytest.raises(ValueError, match="pure"):
        pure_state_test(maximally_mixed, rec)


def test_pure_state_beta_exact(ket_zero, ket_plus, maximally_mixed):
    assert pure_state_beta_exact(ket_zero, ket_zero, 7) == pytest.approx(1.0, abs=1e-12)
    assert pure_state_beta_exact(ket_zero, maximally_mixed, 20) == pytest.approx(
        2.0**-20, rel=1e-9
    )
    assert pure_state_beta_exact(ket_zero, ket_plus, 10) == pytest.approx(2.0**-10, rel=1e-9)


def test_pure_state_beta_monte_carlo(ket_zero, ket_plus):
    # 2e4 seeded trials at m = 10: acceptance frequency within 4 binomial SE of 2^-10
    trials, m = 20_000, 10
    rng = np.random.default_rng(123)
    accepts = 0
    povm = projector_povm(ket_zero)
    for _ in range(trials):
        rec = sample(povm, ket_plus, m, rng)
        accepts += pure_state_test(ket_zero, rec).decision == "H0"
    p = 2.0**-10
    assert abs(accepts / trials - p) <= 4.0 * math.sqrt(p * (1.0 - p) / trials)


# --- one-sample test -------------------------------------------------------------


def test_one_sample_accepts_exact_nominal(maximally_mixed):
    cfg = TestConfig(kind="one-sample", m=300, alpha=0.05, nominal=maximally_mixed,
                     bound=bound_pauli_qubit())
    est = TomographyEstimate(np.eye(2) / 2, "pauli-qubit", 300, True)
    verdict = one_sample_test(maximally_mixed, est, cfg)
    assert verdict.decision == "H0"
    assert verdict.statistic == pytest.approx(0.0, abs=1e-14)


def test_one_sample_tie_accepts(maximally_mixed):
    cfg = TestConfig(kind="one-sample", m=300, alpha=0.05, nominal=maximally_mixed,
                     bound=bound_pauli_qubit())
    v = TestVerdict("H0", statistic=cfg.threshold, threshold=cfg.threshold,
                    scheme="pauli-qubit", m=300)
    assert v.decision == "H0"  # the closed region keeps ties in H0


def test_one_sample_scheme_and_dim_mismatch(maximally_mixed):
    cfg = TestConfig(kind="one-sample", m=300, alpha=0.05, nominal=maximally_mixed,
                     bound=bound_pauli_qubit())
    bad_scheme = TomographyEstimate(np.eye(2) / 2, "pauli-string", 300, True)
    with pytest.raises(ValueError, match="scheme"):
        one_sample_test(maximally_mixed, bad_scheme, cfg)
    bad_dim = TomographyEstimate(np.eye(4) / 4, "pauli-qubit", 300, True)
    with pytest.raises(ValueError, match="dimension"):
        one_sample_test(maximally_mixed, bad_dim, cfg)


def test_one_sample_rejects_distant_state(maximally_mixed, bloch_x08):
    # nominal I/2 against Bloch(0.8, 0, 0) at m = 5400: essentially always rejected
    plan = ExperimentPlan(kind="one-sample", scheme="pauli-qubit", nominal=maximally_mixed,
                          m_grid=(5400,), trials=10_000, alpha=0.05, master_seed=31,
                          true_state=bloch_x08)
    result = run_experiment(plan)
    rejection_rate = 1.0 - result.rows[0].rate
    assert rejection_rate >= 0.999


def test_one_sample_verdict_matches_harness_statistic(maximally_mixed):
    # object-path verdict agrees with the closed-form Bloch distance
    est = _estimate_from(density_from_bloch([0.5, 0.1, -0.2]), 200, seed=8)
    cfg = TestConfig(kind="one-sample", m=600, alpha=0.05, nominal=maximally_mixed,
                     bound=bound_pauli_qubit())
    verdict = one_sample_test(maximally_mixed, est, cfg)
    from quht.states import bloch_from_density

    closed = float(np.linalg.norm(bloch_from_density(est.matrix)))
    assert verdict.statistic == pytest.approx(closed, abs=1e-12)


# --- two-sample test ---------------------------------------------------------------


def test_two_sample_identical_estimates_accept():
    cfg = TestConfig(kind="two-sample", m=300, n=300, alpha=0.05, bound=bound_pauli_qubit())
    est = TomographyEstimate(np.eye(2) / 2, "pauli-qubit", 300, True)
    assert two_sample_test(est, est, cfg).decision == "H0"


def test_two_sample_swap_symmetric():
    cfg = TestConfig(kind="two-sample", m=600, n=600, alpha=0.05, bound=bound_pauli_qubit())
    a = _estimate_from(density_from_bloch([0.4, 0.0, 0.1]), 200, seed=5)
    b = _estimate_from(density_from_bloch([-0.2, 0.3, 0.0]), 200, seed=6)
    v1 = two_sample_test(a, b, cfg)
    v2 = two_sample_test(b, a, cfg)
    assert v1.decision == v2.decision
    assert v1.statistic == pytest.approx(v2.statistic, abs=1e-14)


def test_two_sample_mismatches_raise():
    cfg = TestConfig(kind="two-sample", m=300, n=300, alpha=0.05, bound=bound_pauli_qubit())
    a = TomographyEstimate(np.eye(2) / 2, "pauli-qubit", 300, True)
    b = TomographyEstimate(np.eye(2) / 2, "pauli-string", 300, True)
    with pytest.raises(ValueError, match="same scheme"):
        two_sample_test(a, b, cfg)
    c = TomographyEstimate(np.eye(4) / 4, "pauli-qubit", 300, True)
    with pytest.raises(ValueError, match="dimension"):
        two_sample_test(a, c, cfg)


# --- type II envelopes ----------------------------------------------------------


def test_type2_envelope_one_sample_frozen():
    val = type2_envelope_one_sample(bound_pauli_qubit(), 5400, 0.05, 0.8)
    # hand evaluation: 6 exp(-100 (0.8 - c)^2) with c = sqrt(54 ln(120) / 5400)
    assert val == pytest.approx(1.2827410289170924e-14, rel=1e-10)
    assert val == pytest.approx(
        6.0 * math.exp(-100.0 * (0.8 - math.sqrt(54 * math.log(120) / 5400)) ** 2), rel=1e-12
    )


def test_type2_envelope_vacuous_regime():
    b = bound_pauli_qubit()
    c = threshold_one_sample(b, 600, 0.05)
    assert type2_envelope_one_sample(b, 600, 0.05, c * 0.99) == 1.0
    assert type2_envelope_one_sample(b, 600, 0.05, c) == 1.0
    # the clamp lifts once the gap buys back the prefactor: gap > sqrt(54 ln6 / m)
    lift = math.sqrt(54.0 * math.log(6.0) / 600.0)
    assert type2_envelope_one_sample(b, 600, 0.05, c + lift * 1.05) < 1.0
    assert type2_envelope_one_sample(b, 600, 0.05, c + lift * 0.95) == 1.0


def test_type2_envelope_decreasing_in_m():
    b = bound_pauli_qubit()
    vals = [type2_envelope_one_sample(b, m, 0.05, 0.8) for m in (1200, 2400, 4800, 9600)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_type2_envelope_two_sample_frozen():
    b = bound_pauli_qubit()
    val = type2_envelope_two_sample(b, 5400, 5400, 0.05, 2.0)
    c = threshold_two_sample(b, 5400, 5400, 0.05)
    assert val == pytest.approx(12.0 * math.exp(-5400.0 * (4.0 - 2.0 * c) / 216.0), rel=1e-12)
    # the hand evaluation quoted with a rounded threshold is an upper bound
    assert val <= 12.0 * math.exp(-5400.0 * (4.0 - 2.0 * 0.46837) / 216.0)


def test_type2_envelope_two_sample_regimes():
    b = bound_pauli_qubit()
    c = threshold_two_sample(b, 600, 600, 0.05)
    assert type2_envelope_two_sample(b, 600, 600, 0.05, math.sqrt(2.0 * c) * 0.9) == 1.0
    assert 0.0 < type2_envelope_two_sample(b, 600, 600, 0.05, 2.0) < 1.0


def test_two_sample_prefactor_doubles():
    # with m = n, the two-sample envelope carries prefactor g + g = 2 g
    b = bound_pauli_qubit()
    m, alpha, s = 5400, 0.05, 2.0
    c = threshold_two_sample(b, m, m, alpha)
    expected = 2.0 * b.prefactor(m) * math.exp(-m * b.rate * (s * s - 2.0 * c) / 4.0)
    assert type2_envelope_two_sample(b, m, m, alpha, s) == pytest.approx(expected, rel=1e-12)


# --- synthetic estimates -----------------------------------------------------------


def test_synthetic_deviation_survival_matches_envelope():
    bound = bound_entangled(2, 1)
    m = 100
    stream = object_stream(2024, 0, 0)
    draws = np.array([synthetic_deviation(bound, m, stream) for _ in range(20_000)])
    for t in (0.75, 0.78, 0.8):
        target = min(bound.evaluate(m, t), 1.0)
        frac = float(np.mean(draws >= t))
        se = math.sqrt(target * (1.0 - target) / draws.size)
        assert abs(frac - target) <= 4.0 * se


def test_synthetic_estimate_properties(bloch_x08):
    bound = bound_entangled(2, 2)
    stream = object_stream(7, 0, 0)
    for _ in range(25):
        est = synthetic_estimate(bloch_x08, bound, 500, stream)
        assert est.scheme == "entangled"
        assert np.max(np.abs(est.matrix - est.matrix.conj().T)) < 1e-12
        assert np.real(np.trace(est.matrix)) == pytest.approx(1.0, abs=1e-10)
        dev = trace_norm(est.matrix - bloch_x08.matrix)
        t0 = math.sqrt(bound.log_prefactor(500) / (bound.rate * 500))
        assert dev >= t0 - 1e-9  # the envelope-implied law never draws below t0


def test_synthetic_estimate_deterministic(bloch_x08):
    bound = bound_entangled(2, 2)
    a = synthetic_estimate(bloch_x08, bound, 500, object_stream(9, 1, 4))
    b = synthetic_estimate(bloch_x08, bound, 500, object_stream(9, 1, 4))
    assert np.array_equal(a.matrix, b.matrix)
