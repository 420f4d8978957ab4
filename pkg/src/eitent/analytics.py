"""Closed-form asymptotics of the detuning scheme, used as independent
oracles for the full numerics.

Notation: K = alpha*eps (probe phase per unit length), lambda = 2*alpha*eps^2
(probe dissipation), mu = alpha*eps*r (two-mode coupling), eps =
Gamma*delta/Omega_c^2. The decoherence scheme uses eps_gamma =
Gamma*gamma_p/Omega_c^2 instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .params import GAMMA, SystemParams

_SERIES_LAMBDA = 1e-3


@dataclass(frozen=True)
class ReducedParams:
    k: float
    lam: float
    mu: float
    r: float
    eps: float
    eps_gamma: float


def reduced(params: SystemParams) -> ReducedParams:
    eps = GAMMA * params.delta / params.omega_c0**2
    k = params.alpha * eps
    return ReducedParams(
        k=k,
        lam=2.0 * k * eps,
        mu=k * params.r,
        r=params.r,
        eps=eps,
        eps_gamma=GAMMA * params.gamma_p / params.omega_c0**2,
    )


class Coefficients(NamedTuple):
    p1: complex
    q1: complex
    r1: complex
    s1: complex
    p2: complex
    q2: complex
    r2: complex
    s2: complex


def analytic_coefficients(red: ReducedParams, zeta: float) -> Coefficients:
    """Leading-order drift coefficients for gamma_p = 0 (laboratory frame)."""
    k, mu, r = red.k, red.mu, red.r
    ph = np.exp(1j * k * zeta)
    return Coefficients(
        p1=1j * k - red.lam,
        q1=-2j * mu * r * ph**2,
        r1=-1j * mu * ph,
        s1=-1j * mu * ph,
        p2=-1j * mu / ph,
        q2=-1j * mu * ph,
        r2=1j * mu * r,
        s2=2j * mu * r,
    )


def analytic_drift_matrix(coef: Coefficients) -> np.ndarray:
    """Assemble the 4x4 C from the eight coefficients (conjugate rows implied)."""
    p1, q1, r1, s1, p2, q2, r2, s2 = coef
    c = np.conj
    return np.array(
        [
            [p1, q1, r1, s1],
            [c(q1), c(p1), c(s1), c(r1)],
            [p2, q2, r2, s2],
            [c(q2), c(p2), c(s2), c(r2)],
        ],
        dtype=complex,
    )


def v1(mu: float, lam: float) -> float:
    """V from the zeroth- and first-order coefficients in r."""
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if lam < _SERIES_LAMBDA:
        # removable singularity at lambda = 0
        f = 2.0 - 4.0 / 3.0 * lam + 2.0 / 3.0 * lam**2 - 4.0 / 15.0 * lam**3
        h = 1.0 - lam / 2.0 + lam**2 / 6.0 - lam**3 / 24.0
    else:
        f = (math.expm1(-2.0 * lam) + 2.0 * lam) / lam**2
        h = -math.expm1(-lam) / lam
    return 4.0 * (1.0 + mu**2 * f - 2.0 * mu * h)


def v_modified(mu: float, lam: float, r: float) -> float:
    """v1 plus the photon number of single-mode squeezing, 8 sinh^2(2 mu r)."""
    return v1(mu, lam) + 8.0 * math.sinh(2.0 * mu * r) ** 2


def v_closed_form(mu: float, lam: float, r: float) -> float:
    return 4.0 * (1.0 + 2.0 * mu**2 - 2.0 * mu) + 4.0 * mu * lam * (1.0 - 4.0 * mu / 3.0) + 8.0 * (2.0 * mu * r) ** 2


class OptimumConditions(NamedTuple):
    eps_opt: float
    r_best: float
    v_best: float


def optimum_conditions(alpha: float) -> OptimumConditions:
    """Best (eps, r) on the mu = 1/2 line and the V reached there.

    ``v_best`` is the minimum of :func:`v_opt_of_r`, 2 + sqrt(32/3) / sqrt(alpha).
    See :func:`v_best_printed` for the variant with the inverted prefactor.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    eps_opt = 1.5**0.25 * alpha**-0.75
    r_best = (24.0 * alpha) ** -0.25
    return OptimumConditions(eps_opt, r_best, 2.0 + math.sqrt(32.0 / 3.0) / math.sqrt(alpha))


def v_best_printed(alpha: float) -> float:
    """2 + (32/3)^(-1/2) alpha^(-1/2): same alpha^(-1/2) scaling as
    ``optimum_conditions(alpha).v_best`` but a prefactor smaller by 32/3,
    and not the minimum of :func:`v_opt_of_r`."""
    return 2.0 + (32.0 / 3.0) ** -0.5 * alpha**-0.5


def v_opt_of_r(alpha: float, r: float) -> float:
    if r <= 0:
        raise DomainError(f"r must be > 0, got {r}")
    return 2.0 + 1.0 / (3.0 * alpha * r**2) + 8.0 * r**2


def v_opt_of_eps(alpha: float, eps: float) -> float:
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    return 2.0 + 4.0 * alpha / 3.0 * eps**2 + 2.0 / (alpha**2 * eps**2)


def decoherence_coefficient(alpha: float, eps_gamma: float, r: float, zeta: float) -> float:
    """|S1| = |Q2| of the decoherence scheme."""
    if eps_gamma < 0:
        raise DomainError(f"eps_gamma must be >= 0, got {eps_gamma}")
    x = alpha * eps_gamma
    return x * r * math.exp(-x * zeta)
