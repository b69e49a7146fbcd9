"""Phase estimation with a two-mode squeezed vacuum in a lossy Mach-Zehnder interferometer."""
from .errors import (
    ContractError,
    DegenerateSpectrumError,
    DivergentEstimatorError,
    DomainError,
    PureModeError,
    SingularBlockError,
    TruncationError,
)
from .optimizer import (
    MeasurementPlan,
    PrecisionReport,
    optimal_phase,
    optimal_photon_number,
    plan_measurement,
    quantum_advantage_region,
    repeated_error,
)
from .parity import (
    ParityResult,
    parity_expectation_closed,
    parity_expectation_matrix,
    phase_variance,
)
from .qfi import (
    LossyMziConfig,
    QfiResult,
    bures_fidelity,
    qfi_closed,
    qfi_equal_loss,
    qfi_fidelity,
    qfi_one_arm,
    reference_limits,
)

__all__ = [
    "ContractError",
    "DegenerateSpectrumError",
    "DivergentEstimatorError",
    "DomainError",
    "LossyMziConfig",
    "MeasurementPlan",
    "ParityResult",
    "PrecisionReport",
    "PureModeError",
    "QfiResult",
    "SingularBlockError",
    "TruncationError",
    "bures_fidelity",
    "optimal_phase",
    "optimal_photon_number",
    "parity_expectation_closed",
    "parity_expectation_matrix",
    "phase_variance",
    "plan_measurement",
    "qfi_closed",
    "qfi_equal_loss",
    "qfi_fidelity",
    "qfi_one_arm",
    "quantum_advantage_region",
    "reference_limits",
    "repeated_error",
]
