"""Parameter and state containers.

All rates, detunings and Rabi frequencies are in units of the excited-state
decay rate (``GAMMA = 1``); positions along the medium are the normalised
coordinate ``zeta = z / L`` in ``[0, 1]``.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams

GAMMA = 1.0

# Ordering of the atomic fluctuation vector y (and of the mean-value vector).
STATE_ORDER = ("s31", "s32", "s21", "s11", "s22", "s33", "s12", "s23", "s13")
STATE_INDEX = {name: i for i, name in enumerate(STATE_ORDER)}

# Ordering of the field fluctuation vector a.
FIELD_ORDER = ("a_p", "a_p_dag", "a_c", "a_c_dag")

# (row, col) of sigma[mu-1, nu-1] for each entry of STATE_ORDER
_SIGMA_POS = tuple((int(name[1]) - 1, int(name[2]) - 1) for name in STATE_ORDER)


@dataclass(frozen=True)
class SystemParams:
    """Physical and numerical knobs for one simulation.

    ``delta_p`` and ``delta_c`` default to the asymmetric arrangement
    ``delta_p = -delta_c = delta / 2``. Giving one of them derives the other
    from ``delta_p - delta_c = delta``; giving both requires that relation
    to hold.
    """

    alpha: float
    gamma_p: float = 0.0
    delta: float = 0.0
    omega_c0: float = 1.0
    r: float = 0.1
    delta_p: float | None = None
    delta_c: float | None = None
    gamma1: float = 0.5
    gamma2: float = 0.5
    n_steps: int = 200
    conv_tol: float = 1e-6

    def __post_init__(self):
        for name in ("alpha", "gamma_p", "delta", "omega_c0", "r", "gamma1", "gamma2", "conv_tol"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise InvalidParams(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.alpha <= 0:
            raise InvalidParams(f"alpha must be > 0, got {self.alpha}")
        if self.omega_c0 <= 0:
            raise InvalidParams(f"omega_c0 must be > 0 (no EIT without coupling), got {self.omega_c0}")
        if self.gamma_p < 0:
            raise InvalidParams(f"gamma_p must be >= 0, got {self.gamma_p}")
        if self.r < 0:
            raise InvalidParams(f"r must be >= 0, got {self.r}")
        if self.gamma1 < 0 or self.gamma2 < 0 or not math.isclose(self.gamma1 + self.gamma2, GAMMA, abs_tol=1e-12):
            raise InvalidParams("gamma1 + gamma2 must equal GAMMA = 1 with both non-negative")
        if self.conv_tol <= 0:
            raise InvalidParams("conv_tol must be > 0")
        if isinstance(self.n_steps, bool) or int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise InvalidParams(f"n_steps must be an integer >= 2, got {self.n_steps!r}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

        dp, dc = self.delta_p, self.delta_c
        if dp is None and dc is None:
            dp, dc = self.delta / 2, -self.delta / 2
        elif dc is None:
            dc = dp - self.delta
        elif dp is None:
            dp = dc + self.delta
        elif not math.isclose(dp - dc, self.delta, rel_tol=1e-12, abs_tol=1e-15):
            raise InvalidParams(f"delta_p - delta_c = {dp - dc} differs from delta = {self.delta}")
        if not (math.isfinite(dp) and math.isfinite(dc)):
            raise InvalidParams("one-photon detunings must be finite")
        object.__setattr__(self, "delta_p", float(dp))
        object.__setattr__(self, "delta_c", float(dc))

    @property
    def eps(self) -> float:
        """Detuning-to-coupling ratio Gamma * delta / Omega_c^2."""
        return GAMMA * self.delta / self.omega_c0**2

    @property
    def eps_gamma(self) -> float:
        return GAMMA * self.gamma_p / self.omega_c0**2

    @property
    def omega_p0(self) -> float:
        return self.r * self.omega_c0

    def replace(self, **changes) -> SystemParams:
        """Copy with changes; the one-photon detunings are re-derived when
        ``delta`` changes and neither of them is given explicitly."""
        if "delta" in changes and "delta_p" not in changes and "delta_c" not in changes:
            changes["delta_p"] = None
            changes["delta_c"] = None
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class FieldAmplitudes:
    """Local mean Rabi frequencies of the probe and coupling fields."""

    omega_p: complex
    omega_c: complex

    def __post_init__(self):
        op, oc = complex(self.omega_p), complex(self.omega_c)
        if not (np.isfinite(op) and np.isfinite(oc)):
            raise InvalidParams("field amplitudes must be finite")
        object.__setattr__(self, "omega_p", op)
        object.__setattr__(self, "omega_c", oc)
        if abs(op) > abs(oc):
            warnings.warn(
                f"|omega_p| = {abs(op):.3g} exceeds |omega_c| = {abs(oc):.3g}; outside the EIT regime",
                RuntimeWarning,
                stacklevel=3,
            )


@dataclass(frozen=True, eq=False)
class AtomicSteadyState:
    """Mean values sigma[mu-1, nu-1] = <sigma_mu_nu> of the three-level atom."""

    sigma: np.ndarray

    @classmethod
    def from_vector(cls, y) -> AtomicSteadyState:
        """Build from a vector in :data:`STATE_ORDER`, enforcing Hermiticity."""
        sigma = np.zeros((3, 3), dtype=complex)
        for value, pos in zip(np.asarray(y, dtype=complex), _SIGMA_POS):
            sigma[pos] = value
        sigma = 0.5 * (sigma + sigma.conj().T)
        return cls(sigma)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.sigma[pos] for pos in _SIGMA_POS])

    @property
    def populations(self) -> np.ndarray:
        return self.sigma.diagonal().real.copy()

    @property
    def trace(self) -> float:
        return float(self.sigma.trace().real)

    def __getitem__(self, name: str) -> complex:
        """``state["s13"]`` returns sigma_13."""
        return complex(self.sigma[_SIGMA_POS[STATE_INDEX[name]]])
