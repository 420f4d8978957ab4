"""Mean-field Maxwell propagation through the medium."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._kernel import COND_WARN, RawRun, run_kernel
from .errors import ConvergenceFailure
from .params import AtomicSteadyState, FieldAmplitudes, SystemParams

log = logging.getLogger(__name__)

MAX_DOUBLINGS = 5


@dataclass(frozen=True, eq=False)
class PropagationProfile:
    """Mean fields and local atomic states sampled on the zeta grid.

    ``covariance`` holds S(zeta) when the profile came out of a covariance
    run, else None.
    """

    zeta_grid: np.ndarray
    omega_p: np.ndarray
    omega_c: np.ndarray
    sigma: np.ndarray  # (n, 3, 3)
    covariance: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.zeta_grid)
        if not (len(self.omega_p) == len(self.omega_c) == len(self.sigma) == n):
            raise ValueError("profile arrays must have equal length")
        z = self.zeta_grid
        if n < 2 or z[0] != 0.0 or z[-1] != 1.0 or np.any(np.diff(z) <= 0):
            raise ValueError("zeta grid must increase strictly from 0 to 1")

    def __len__(self):
        return len(self.zeta_grid)

    @property
    def fields(self) -> list[FieldAmplitudes]:
        return [FieldAmplitudes(p, c) for p, c in zip(self.omega_p, self.omega_c)]

    @property
    def states(self) -> list[AtomicSteadyState]:
        return [AtomicSteadyState(s) for s in self.sigma]

    def probe_phase(self) -> np.ndarray:
        """Unwrapped arg(Omega_p(zeta)) - arg(Omega_p(0))."""
        phase = np.unwrap(np.angle(self.omega_p))
        return phase - phase[0]

    @classmethod
    def from_raw(cls, raw: RawRun, with_cov: bool) -> PropagationProfile:
        sigma = np.stack([AtomicSteadyState.from_vector(y).sigma for y in raw.states])
        return cls(
            raw.zeta,
            raw.fields[:, 0].copy(),
            raw.fields[:, 1].copy(),
            sigma,
            raw.covs.copy() if with_cov else None,
        )


def certified_run(params: SystemParams, with_cov: bool, symmetrize: bool = True, **kernel_kw) -> RawRun:
    """Double the grid from ``params.n_steps`` until two successive grids
    agree within ``params.conv_tol``; return the finer run.

    The compared quantities are |Omega_p(1)| and, with the covariance, V.
    """
    from .covariance import duan_v  # local import: covariance builds on this module

    def change(a: RawRun, b: RawRun) -> float:
        diff = abs(abs(a.fields[-1, 0]) - abs(b.fields[-1, 0]))
        if with_cov:
            diff = max(diff, abs(duan_v(a.covs[-1]) - duan_v(b.covs[-1])))
        return diff

    n = params.n_steps
    prev = run_kernel(params, n, with_cov, symmetrize, **kernel_kw)
    last = np.inf
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        cur = run_kernel(params, n, with_cov, symmetrize, **kernel_kw)
        last = change(prev, cur)
        if last <= params.conv_tol:
            if cur.max_condition > COND_WARN:
                log.warning("M1 condition number reached %.3g", cur.max_condition)
            return cur
        prev = cur
    raise ConvergenceFailure(
        f"grid doubling up to {n} steps still changes the output by {last:.3g} > conv_tol={params.conv_tol:g}"
    )


def propagate_mean_fields(params: SystemParams, certify: bool = True) -> PropagationProfile:
    """Integrate the steady-state Maxwell equations for the mean fields.

    The inputs are real: Omega_c(0) = omega_c0 and Omega_p(0) = r * omega_c0.
    Fixed-step RK4 re-solves the atomic steady state at every stage. With
    ``certify`` the grid is doubled until |Omega_p(1)| settles, otherwise
    exactly ``params.n_steps`` steps are taken.
    """
    if certify:
        raw = certified_run(params, with_cov=False)
    else:
        raw = run_kernel(params, params.n_steps, with_cov=False)
    return PropagationProfile.from_raw(raw, with_cov=False)
