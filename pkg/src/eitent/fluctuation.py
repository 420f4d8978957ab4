"""Linearised Heisenberg-Langevin machinery at one position of the medium.

Atomic fluctuations y (ordered as ``STATE_ORDER``) obey, in steady state,
``M1 y + M2 a + r = 0`` so that ``y = T (M2 a + r)`` with ``T = -M1^{-1}``.
Rows 9 (s13) and 8 (s23) of that relation feed the field equations
``da/dzeta = C a + N`` with ``<N N^dagger> = Z``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._kernel import (
    COND_LIMIT,
    COND_WARN,
    G_COUPLING,
    NOISE_PREFACTOR,
    drift_from,
    fill_diffusion,
    fill_m2,
    noise_from,
    selector_from,
)
from .bloch import m1_matrix, steady_state
from .errors import SingularSystem
from .params import AtomicSteadyState, FieldAmplitudes, SystemParams

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FluctuationMatrices:
    m1: np.ndarray
    m2: np.ndarray
    t: np.ndarray
    c: np.ndarray
    d: np.ndarray
    vsel: np.ndarray
    z: np.ndarray


def build_m1(state: AtomicSteadyState, fields: FieldAmplitudes, params: SystemParams) -> np.ndarray:
    # M1 does not depend on the atomic state; the argument keeps the
    # builder signatures uniform.
    return m1_matrix(fields, params)


def build_m2(state: AtomicSteadyState, params: SystemParams, g: float = G_COUPLING) -> np.ndarray:
    out = np.empty((9, 4), dtype=complex)
    fill_m2(out, state.vector, float(g))
    return out


def solution_operator(m1: np.ndarray) -> np.ndarray:
    """T = -M1^{-1} via LU with partial pivoting."""
    cond = np.linalg.cond(m1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystem(f"M1 is singular (condition number {cond:.3g})", cond)
    if cond > COND_WARN:
        log.warning("M1 condition number %.3g", cond)
    return -np.linalg.solve(m1, np.eye(9, dtype=complex))


def build_drift(
    state: AtomicSteadyState, fields: FieldAmplitudes, params: SystemParams, g: float = G_COUPLING
) -> np.ndarray:
    """4x4 drift matrix C of the field fluctuations (a_p, a_p^+, a_c, a_c^+)."""
    t = solution_operator(build_m1(state, fields, params))
    out = np.empty((4, 4), dtype=complex)
    drift_from(t, build_m2(state, params, g), params.alpha, float(g), out)
    return out


def build_diffusion(state: AtomicSteadyState, params: SystemParams) -> np.ndarray:
    out = np.empty((9, 9), dtype=complex)
    fill_diffusion(out, state.vector, params.gamma_p, params.gamma1, params.gamma2)
    return out


def build_selector(t: np.ndarray) -> np.ndarray:
    """Rows (T_9, -T_1, T_8, -T_2) mapping r onto the field noise N."""
    out = np.empty((4, 9), dtype=complex)
    selector_from(np.ascontiguousarray(t), out)
    return out


def build_noise_correlation(
    t: np.ndarray, d: np.ndarray, params: SystemParams, prefactor: float = NOISE_PREFACTOR
) -> np.ndarray:
    out = np.empty((4, 4), dtype=complex)
    noise_from(build_selector(t), np.ascontiguousarray(d, dtype=complex), params.alpha, float(prefactor), out)
    return out


def fluctuation_matrices(
    fields: FieldAmplitudes,
    params: SystemParams,
    state: AtomicSteadyState | None = None,
    g: float = G_COUPLING,
) -> FluctuationMatrices:
    """All fluctuation matrices at one position; solves the steady state
    first when ``state`` is not given."""
    if state is None:
        state = steady_state(fields, params)
    m1 = build_m1(state, fields, params)
    m2 = build_m2(state, params, g)
    t = solution_operator(m1)
    c = np.empty((4, 4), dtype=complex)
    drift_from(t, m2, params.alpha, float(g), c)
    d = build_diffusion(state, params)
    return FluctuationMatrices(
        m1=m1, m2=m2, t=t, c=c, d=d, vsel=build_selector(t), z=build_noise_correlation(t, d, params)
    )


def to_rotating_frame(c: np.ndarray, probe_phase: float, coupling_phase: float = 0.0) -> np.ndarray:
    """Remove the mean-field phases from C: a_p -> a_p e^{i phi_p}, a_c -> a_c e^{i phi_c}.

    Only the similarity part is applied; the constant -i phi' shift of the
    diagonal is left out so P1 stays comparable with iK - lambda.
    """
    u = np.exp(1j * np.array([probe_phase, -probe_phase, coupling_phase, -coupling_phase]))
    return c * u[None, :] / u[:, None]
