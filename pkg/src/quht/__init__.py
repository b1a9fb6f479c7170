"""quht: a simulation laboratory for quantum universal hypothesis testing.

Decide whether an unknown quantum state equals a known nominal state (or
whether two unknown states coincide) from measurement data alone, with
certified type I control and exponentially decaying type II error. The
package provides the operator metrics, tomography estimators with
concentration envelopes, calibrated decision rules, and a reproducible
Monte Carlo harness that verifies the certificates empirically.
"""

__version__ = "0.1.0"

from .operators import (  # noqa: E402
    DensityOperator,
    Spectrum,
    eig_hermitian,
    fidelity,
    helstrom_bound,
    psd_sqrt,
    relative_entropy,
    sandwiched_renyi_half,
    tensor_power,
    trace_distance,
    trace_norm,
)
from .states import (  # noqa: E402
    PauliStringBasis,
    bloch_from_density,
    density_from_bloch,
    hermitian_from_bloch,
    pauli_string_basis,
    project_to_physical,
    pure_state,
    random_density,
    state_from_json,
    state_to_json,
)
from .measurement import (  # noqa: E402
    OutcomeRecord,
    Povm,
    born_probabilities,
    pauli_eigenbasis_povm,
    pauli_string_povm,
    projector_povm,
    sample,
)
from .tomography import (  # noqa: E402
    ConcentrationBound,
    TomographyEstimate,
    bound_entangled,
    bound_indep_two_design,
    bound_pauli_qubit,
    bound_pauli_string,
    pauli_string_estimate,
    qubit_pauli_estimate,
    threshold_one_sample,
    threshold_two_sample,
)
from .hypotest import (  # noqa: E402
    TestConfig,
    TestVerdict,
    one_sample_test,
    pure_state_beta_exact,
    pure_state_test,
    synthetic_estimate,
    two_sample_test,
    type2_envelope_one_sample,
    type2_envelope_two_sample,
)
from .experiments import (  # noqa: E402
    ExperimentPlan,
    ExperimentResult,
    exact_qubit_pauli_errors,
    fit_exponent,
    pinsker_ratio,
    pinsker_sharpness_scan,
    quantum_inequality_suite,
    run_experiment,
    wilson_interval,
)

__all__ = [
    "__version__",
    "DensityOperator",
    "Spectrum",
    "eig_hermitian",
    "fidelity",
    "helstrom_bound",
    "psd_sqrt",
    "relative_entropy",
    "sandwiched_renyi_half",
    "tensor_power",
    "trace_distance",
    "trace_norm",
    "PauliStringBasis",
    "bloch_from_density",
    "density_from_bloch",
    "hermitian_from_bloch",
    "pauli_string_basis",
    "project_to_physical",
    "pure_state",
    "random_density",
    "state_from_json",
    "state_to_json",
    "OutcomeRecord",
    "Povm",
    "born_probabilities",
    "pauli_eigenbasis_povm",
    "pauli_string_povm",
    "projector_povm",
    "sample",
    "ConcentrationBound",
    "TomographyEstimate",
    "bound_entangled",
    "bound_indep_two_design",
    "bound_pauli_qubit",
    "bound_pauli_string",
    "pauli_string_estimate",
    "qubit_pauli_estimate",
    "threshold_one_sample",
    "threshold_two_sample",
    "TestConfig",
    "TestVerdict",
    "one_sample_test",
    "pure_state_beta_exact",
    "pure_state_test",
    "synthetic_estimate",
    "two_sample_test",
    "type2_envelope_one_sample",
    "type2_envelope_two_sample",
    "ExperimentPlan",
    "ExperimentResult",
    "exact_qubit_pauli_errors",
    "fit_exponent",
    "pinsker_ratio",
    "pinsker_sharpness_scan",
    "quantum_inequality_suite",
    "run_experiment",
    "wilson_interval",
]
