"""Two-mode entanglement of probe and coupling fields propagating through
an EIT medium of Lambda-type atoms.

Units: rates and Rabi frequencies in units of the excited-state decay rate
(Gamma = 1); position along the medium is zeta = z / L in [0, 1].
"""

__version__ = "0.1.0"

from .analytics import (
    OptimumConditions,
    ReducedParams,
    analytic_coefficients,
    analytic_drift_matrix,
    decoherence_coefficient,
    optimum_conditions,
    reduced,
    v1,
    v_best_printed,
    v_closed_form,
    v_modified,
    v_opt_of_eps,
    v_opt_of_r,
)
from .bloch import bloch_rhs, m1_matrix, steady_state
from .covariance import (
    CovarianceState,
    EntanglementResult,
    entanglement_V,
    entanglement_V_theta,
    init_covariance,
    propagate_covariance,
)
from .errors import ConvergenceFailure, DomainError, EITError, InvalidParams, SingularSystem
from .fluctuation import (
    FluctuationMatrices,
    build_diffusion,
    build_drift,
    build_m1,
    build_m2,
    build_noise_correlation,
    build_selector,
    fluctuation_matrices,
    solution_operator,
    to_rotating_frame,
)
from .params import GAMMA, AtomicSteadyState, FieldAmplitudes, SystemParams
from .propagation import PropagationProfile, propagate_mean_fields
from .sweep import AxisSpec, RunRecord, optimize, run_single, scan

__all__ = [name for name in dir() if not name.startswith("_")]
