"""Field covariance propagation and the Duan inseparability measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import run_kernel
from .params import SystemParams
from .propagation import PropagationProfile, certified_run

# V below 4 by less than this is treated as round-off, not entanglement
ENTANGLEMENT_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """S_ij = <a_i a_j^+> for a = (a_p, a_p^+, a_c, a_c^+) at position ``zeta``.

    The drift fields summarise the whole run that produced the state.
    """

    s: np.ndarray
    zeta: float = 0.0
    max_commutator_drift: float = 0.0
    max_hermiticity_drift: float = 0.0
    n_steps: int = 0

    @property
    def commutator_drift(self) -> float:
        s = self.s
        return float(max(abs(s[0, 0] - s[1, 1] - 1), abs(s[2, 2] - s[3, 3] - 1)))


@dataclass(frozen=True)
class EntanglementResult:
    v: float
    theta_opt: float
    n_p: float
    n_c: float
    cross: complex
    commutator_drift: float

    @property
    def entangled(self) -> bool:
        return self.v < 4.0 - ENTANGLEMENT_MARGIN


def init_covariance() -> CovarianceState:
    """Coherent inputs: only vacuum fluctuations, S = diag(1, 0, 1, 0)."""
    return CovarianceState(np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex), zeta=0.0)


def duan_v(s: np.ndarray) -> float:
    return float(4.0 * (1.0 + s[1, 1].real + s[3, 3].real - 2.0 * abs(s[0, 3])))


def entanglement_V_theta(state: CovarianceState, theta: float | np.ndarray) -> float | np.ndarray:
    """Duan sum V(theta) = 4[1 + <a_p^+ a_p> + <a_c^+ a_c> + 2 Re(<a_p a_c> e^{-2i theta})]."""
    s = state.s
    return 4.0 * (1.0 + s[1, 1].real + s[3, 3].real + 2.0 * np.real(s[0, 3] * np.exp(-2j * np.asarray(theta))))


def entanglement_V(state: CovarianceState) -> EntanglementResult:
    """V minimised over the quadrature angle; theta_opt is taken in [0, pi)."""
    s = state.s
    cross = complex(s[0, 3])
    theta = ((np.angle(cross) + math.pi) / 2.0) % math.pi
    drift = max(state.commutator_drift, state.max_commutator_drift)
    return EntanglementResult(
        v=duan_v(s),
        theta_opt=float(theta),
        n_p=float(s[1, 1].real),
        n_c=float(s[3, 3].real),
        cross=cross,
        commutator_drift=float(drift),
    )


def propagate_covariance(
    params: SystemParams, certify: bool = True, symmetrize: bool = True, **kernel_kw
) -> tuple[CovarianceState, PropagationProfile]:
    """Integrate dS/dzeta = C S + S C^+ + Z together with the mean fields.

    C(zeta) and Z(zeta) are rebuilt at every RK4 stage from the local
    steady state. With ``certify`` the grid is doubled until V and
    |Omega_p(1)| change by less than ``params.conv_tol`` (else
    ConvergenceFailure); otherwise exactly ``params.n_steps`` steps are
    taken. ``symmetrize`` replaces S by (S + S^+)/2 after each step.
    """
    if certify:
        raw = certified_run(params, with_cov=True, symmetrize=symmetrize, **kernel_kw)
    else:
        raw = run_kernel(params, params.n_steps, True, symmetrize, **kernel_kw)
    state = CovarianceState(
        raw.covs[-1].copy(),
        zeta=1.0,
        max_commutator_drift=raw.max_commutator_drift,
        max_hermiticity_drift=raw.max_hermiticity_drift,
        n_steps=raw.n_steps,
    )
    return state, PropagationProfile.from_raw(raw, with_cov=True)
