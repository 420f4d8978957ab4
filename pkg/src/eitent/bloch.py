"""Steady state of the optical Bloch equations for the Lambda atom."""

from __future__ import annotations

import logging

import numpy as np

from ._kernel import COND_LIMIT, COND_WARN, fill_m1, hermitize
from .errors import SingularSystem
from .params import GAMMA, AtomicSteadyState, FieldAmplitudes, SystemParams

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


def m1_matrix(fields: FieldAmplitudes, params: SystemParams) -> np.ndarray:
    out = np.empty((9, 9), dtype=complex)
    fill_m1(
        out,
        fields.omega_p,
        fields.omega_c,
        params.delta_p,
        params.delta_c,
        params.delta,
        params.gamma_p,
        params.gamma1,
        params.gamma2,
    )
    return out


def bloch_rhs(sigma: np.ndarray, fields: FieldAmplitudes, params: SystemParams) -> np.ndarray:
    """Right-hand sides of the nine mean-field Bloch equations (noise dropped).

    Written out term by term from the equations of motion, independently of
    the M1 matrix, so it can serve as a residual check. Returned as a 3x3
    array ``d sigma[mu-1, nu-1] / dt``.
    """
    s = np.asarray(sigma, dtype=complex)
    op, oc = fields.omega_p, fields.omega_c
    opc, occ = np.conj(op), np.conj(oc)
    dp, dc, d, gp = params.delta_p, params.delta_c, params.delta, params.gamma_p
    g1, g2 = params.gamma1, params.gamma2
    gam = g1 + g2
    s11, s12, s13 = s[0]
    s21, s22, s23 = s[1]
    s31, s32, s33 = s[2]
    out = np.empty((3, 3), dtype=complex)
    out[2, 0] = -(gam / 2 + 1j * dp) * s31 - 0.5j * (s11 - s33) * opc - 0.5j * occ * s21
    out[2, 1] = -(gam / 2 + 1j * dc) * s32 - 0.5j * (s22 - s33) * occ - 0.5j * opc * s12
    out[1, 0] = -(gp + 1j * d) * s21 + 0.5j * opc * s23 - 0.5j * s31 * oc
    out[0, 0] = g1 * s33 - 0.5j * s31 * op + 0.5j * opc * s13
    out[1, 1] = g2 * s33 - 0.5j * s32 * oc + 0.5j * occ * s23
    out[2, 2] = (
        -gam * s33 + 0.5j * s31 * op + 0.5j * s32 * oc - 0.5j * opc * s13 - 0.5j * occ * s23
    )
    out[0, 1] = -(gp - 1j * d) * s12 - 0.5j * s32 * op + 0.5j * occ * s13
    out[1, 2] = -(gam / 2 - 1j * dc) * s23 + 0.5j * (s22 - s33) * oc + 0.5j * s21 * op
    out[0, 2] = -(gam / 2 - 1j * dp) * s13 + 0.5j * (s11 - s33) * op + 0.5j * s12 * oc
    return out


def steady_state(fields: FieldAmplitudes, params: SystemParams) -> AtomicSteadyState:
    """Solve the nine steady-state equations with the sigma_33 equation
    replaced by the trace condition (row 6 of M1).

    Raises SingularSystem for rank-deficient configurations, e.g. both
    fields zero.
    """
    if fields.omega_p == 0 and fields.omega_c == 0:
        raise SingularSystem("both fields vanish; populations are undetermined", np.inf)
    m1 = m1_matrix(fields, params)
    cond = np.linalg.cond(m1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystem(f"M1 is singular (condition number {cond:.3g})", cond)
    if cond > COND_WARN:
        log.warning("M1 condition number %.3g", cond)
    rhs = np.zeros(9, dtype=complex)
    rhs[5] = 1.0
    y = np.linalg.solve(m1, rhs)
    hermitize(y)
    state = AtomicSteadyState.from_vector(y)
    resid = np.abs(bloch_rhs(state.sigma, fields, params)).max()
    scale = 1.0 + np.abs(state.sigma).max()
    # round-off grows with the conditioning of M1
    if resid > max(RESIDUAL_TOL, cond * np.finfo(float).eps) * scale:
        raise SingularSystem(f"steady-state residual {resid:.3g} too large", cond)
    return state


__all__ = ["GAMMA", "bloch_rhs", "m1_matrix", "steady_state"]
