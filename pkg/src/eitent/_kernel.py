"""Compiled inner loops.

The matrix fillers below are the single definition of M1, M2 and the
diffusion matrix; the public builders in :mod:`eitent.fluctuation` call them
too. Vectors follow ``params.STATE_ORDER``:

    0:s31 1:s32 2:s21 3:s11 4:s22 5:s33 6:s12 7:s23 8:s13
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numba import njit

from .errors import SingularSystem
from .params import GAMMA, SystemParams

# Z = NOISE_PREFACTOR * Gamma * alpha * V D V^dagger. The printed value 1/4
# keeps [a, a^dagger] = 1 to round-off along the whole medium.
NOISE_PREFACTOR = 0.25

# Internal unit of the single-photon Rabi frequency; cancels from C and Z.
G_COUPLING = 1.0

COND_WARN = 1e12
COND_LIMIT = 1e14


@njit(cache=True)
def fill_m1(out, op, oc, dp, dc, d, gp, g1, g2):
    gam = g1 + g2
    opc = op.conjugate()
    occ = oc.conjugate()
    out[:, :] = 0.0
    out[0, 0] = -(0.5 * gam + 1j * dp)
    out[0, 2] = -0.5j * occ
    out[0, 3] = -0.5j * opc
    out[0, 5] = 0.5j * opc
    out[1, 1] = -(0.5 * gam + 1j * dc)
    out[1, 4] = -0.5j * occ
    out[1, 5] = 0.5j * occ
    out[1, 6] = -0.5j * opc
    out[2, 0] = -0.5j * oc
    out[2, 2] = -(gp + 1j * d)
    out[2, 7] = 0.5j * opc
    out[3, 0] = -0.5j * op
    out[3, 5] = g1
    out[3, 8] = 0.5j * opc
    out[4, 1] = -0.5j * oc
    out[4, 5] = g2
    out[4, 7] = 0.5j * occ
    out[5, 3] = 1.0
    out[5, 4] = 1.0
    out[5, 5] = 1.0
    out[6, 1] = -0.5j * op
    out[6, 6] = -(gp - 1j * d)
    out[6, 8] = 0.5j * occ
    out[7, 2] = 0.5j * op
    out[7, 4] = 0.5j * oc
    out[7, 5] = -0.5j * oc
    out[7, 7] = -(0.5 * gam - 1j * dc)
    out[8, 3] = 0.5j * op
    out[8, 5] = -0.5j * op
    out[8, 6] = 0.5j * oc
    out[8, 8] = -(0.5 * gam - 1j * dp)


@njit(cache=True)
def fill_m2(out, y, g):
    s31, s32, s21, s11, s22, s33, s12, s23, s13 = y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7], y[8]
    h = 0.5 * g
    out[:, :] = 0.0
    out[0, 1] = -1j * h * (s11 - s33)
    out[0, 3] = -1j * h * s21
    out[1, 1] = -1j * h * s12
    out[1, 3] = -1j * h * (s22 - s33)
    out[2, 1] = 1j * h * s23
    out[2, 2] = -1j * h * s31
    out[3, 0] = -1j * h * s31
    out[3, 1] = 1j * h * s13
    out[4, 2] = -1j * h * s32
    out[4, 3] = 1j * h * s23
    out[6, 0] = -1j * h * s32
    out[6, 3] = 1j * h * s13
    out[7, 0] = 1j * h * s21
    out[7, 2] = 1j * h * (s22 - s33)
    out[8, 0] = 1j * h * (s11 - s33)
    out[8, 2] = 1j * h * s12


@njit(cache=True)
def fill_diffusion(out, y, gp, g1, g2):
    s31, s32, s21, s11, s22, s33, s12, s23, s13 = y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7], y[8]
    gam = g1 + g2
    out[:, :] = 0.0
    out[0, 2] = gp * s32
    out[1, 6] = gp * s31
    out[2, 0] = gp * s23
    out[2, 2] = 2.0 * gp * s22 + g2 * s33
    out[3, 3] = g1 * s33
    out[3, 7] = -g1 * s32
    out[3, 8] = -g1 * s31
    out[4, 4] = g2 * s33
    out[4, 7] = -g2 * s32
    out[4, 8] = -g2 * s31
    out[6, 1] = gp * s13
    out[6, 6] = 2.0 * gp * s11 + g1 * s33
    out[7, 3] = -g1 * s23
    out[7, 4] = -g2 * s23
    out[7, 7] = g2 * s33 + gam * s22
    out[7, 8] = (gam - gp) * s21
    out[8, 3] = -g1 * s13
    out[8, 4] = -g2 * s13
    out[8, 7] = (gam - gp) * s12
    out[8, 8] = g1 * s33 + gam * s11


@njit(cache=True)
def hermitize(y):
    """Make the mean-value vector exactly Hermitian (pairs 31/13, 32/23, 21/12)."""
    a = 0.5 * (y[0] + y[8].conjugate())
    y[0] = a
    y[8] = a.conjugate()
    b = 0.5 * (y[1] + y[7].conjugate())
    y[1] = b
    y[7] = b.conjugate()
    c = 0.5 * (y[2] + y[6].conjugate())
    y[2] = c
    y[6] = c.conjugate()
    for k in range(3, 6):
        y[k] = y[k].real


@njit(cache=True)
def _norm1(a):
    best = 0.0
    for j in range(a.shape[1]):
        col = 0.0
        for i in range(a.shape[0]):
            col += abs(a[i, j])
        if col > best:
            best = col
    return best


@njit(cache=True)
def drift_from(t, m2, alpha, g, out):
    """C rows 1 and 3 from rows 9 (s13) and 8 (s23) of T M2; rows 2 and 4
    follow from the conjugate structure."""
    k = 1j * GAMMA * alpha / (2.0 * g)
    for row, src in ((0, 8), (2, 7)):
        for j in range(4):
            acc = 0.0j
            for m in range(9):
                acc += t[src, m] * m2[m, j]
            out[row, j] = k * acc
    for row in (1, 3):
        up = row - 1
        out[row, 0] = out[up, 1].conjugate()
        out[row, 1] = out[up, 0].conjugate()
        out[row, 2] = out[up, 3].conjugate()
        out[row, 3] = out[up, 2].conjugate()


@njit(cache=True)
def selector_from(t, out):
    for m in range(9):
        out[0, m] = t[8, m]
        out[1, m] = -t[0, m]
        out[2, m] = t[7, m]
        out[3, m] = -t[1, m]


@njit(cache=True)
def noise_from(vsel, dmat, alpha, pref, out):
    vd = np.zeros((4, 9), dtype=np.complex128)
    for i in range(4):
        for j in range(9):
            acc = 0.0j
            for m in range(9):
                acc += vsel[i, m] * dmat[m, j]
            vd[i, j] = acc
    scale = pref * GAMMA * alpha
    for i in range(4):
        for j in range(4):
            acc = 0.0j
            for m in range(9):
                acc += vd[i, m] * vsel[j, m].conjugate()
            out[i, j] = scale * acc


@njit(cache=True)
def local_terms(op, oc, dp, dc, d, gp, g1, g2, alpha, g, pref, with_cov, y, cmat, zmat):
    """Solve the local steady state and, optionally, the drift and noise
    matrices. Returns the 1-norm condition estimate of M1."""
    m1 = np.empty((9, 9), dtype=np.complex128)
    fill_m1(m1, op, oc, dp, dc, d, gp, g1, g2)
    inv = np.linalg.inv(m1)
    cond = _norm1(m1) * _norm1(inv)
    for k in range(9):
        y[k] = inv[k, 5]
    hermitize(y)
    if with_cov:
        t = -inv
        m2 = np.empty((9, 4), dtype=np.complex128)
        fill_m2(m2, y, g)
        drift_from(t, m2, alpha, g, cmat)
        vsel = np.empty((4, 9), dtype=np.complex128)
        selector_from(t, vsel)
        dmat = np.empty((9, 9), dtype=np.complex128)
        fill_diffusion(dmat, y, gp, g1, g2)
        noise_from(vsel, dmat, alpha, pref, zmat)
    return cond


@njit(cache=True)
def _cov_rhs(c, s, z, out):
    for i in range(4):
        for j in range(4):
            acc = z[i, j]
            for m in range(4):
                acc += c[i, m] * s[m, j] + s[i, m] * c[j, m].conjugate()
            out[i, j] = acc


@njit(cache=True)
def integrate(op0, oc0, dp, dc, d, gp, g1, g2, alpha, g, pref, n_steps, with_cov, symmetrize):
    """Joint fixed-step RK4 for the mean fields and the covariance matrix.

    Every stage re-solves the local steady state and rebuilds C and Z from
    the stage fields.
    """
    h = 1.0 / n_steps
    half = 0.5 * GAMMA * alpha
    fields = np.empty((n_steps + 1, 2), dtype=np.complex128)
    states = np.empty((n_steps + 1, 9), dtype=np.complex128)
    covs = np.zeros((n_steps + 1, 4, 4), dtype=np.complex128)
    y = np.empty(9, dtype=np.complex128)
    cm = np.zeros((4, 4), dtype=np.complex128)
    zm = np.zeros((4, 4), dtype=np.complex128)
    kf = np.empty((4, 2), dtype=np.complex128)
    ks = np.zeros((4, 4, 4), dtype=np.complex128)
    s = np.zeros((4, 4), dtype=np.complex128)
    s[0, 0] = 1.0
    s[2, 2] = 1.0
    fp = op0
    fc = oc0
    max_cond = 0.0
    max_comm = 0.0
    max_herm = 0.0
    stage_s = np.empty((4, 4), dtype=np.complex128)
    for n in range(n_steps + 1):
        fields[n, 0] = fp
        fields[n, 1] = fc
        covs[n] = s
        comm = max(abs(s[0, 0] - s[1, 1] - 1.0), abs(s[2, 2] - s[3, 3] - 1.0)) if with_cov else 0.0
        max_comm = max(max_comm, comm)
        if n == n_steps:
            cond = local_terms(fp, fc, dp, dc, d, gp, g1, g2, alpha, g, pref, False, y, cm, zm)
            max_cond = max(max_cond, cond)
            states[n] = y
            break
        for st in range(4):
            if st == 0:
                sp, sc = fp, fc
                stage_s[:, :] = s
            else:
                w = h if st == 3 else 0.5 * h
                sp = fp + w * kf[st - 1, 0]
                sc = fc + w * kf[st - 1, 1]
                if with_cov:
                    for i in range(4):
                        for j in range(4):
                            stage_s[i, j] = s[i, j] + w * ks[st - 1, i, j]
            cond = local_terms(sp, sc, dp, dc, d, gp, g1, g2, alpha, g, pref, with_cov, y, cm, zm)
            max_cond = max(max_cond, cond)
            if st == 0:
                states[n] = y
            kf[st, 0] = 1j * half * y[8]
            kf[st, 1] = 1j * half * y[7]
            if with_cov:
                _cov_rhs(cm, stage_s, zm, ks[st])
        fp = fp + h / 6.0 * (kf[0, 0] + 2.0 * kf[1, 0] + 2.0 * kf[2, 0] + kf[3, 0])
        fc = fc + h / 6.0 * (kf[0, 1] + 2.0 * kf[1, 1] + 2.0 * kf[2, 1] + kf[3, 1])
        if with_cov:
            for i in range(4):
                for j in range(4):
                    s[i, j] = s[i, j] + h / 6.0 * (ks[0, i, j] + 2.0 * ks[1, i, j] + 2.0 * ks[2, i, j] + ks[3, i, j])
            asym = 0.0
            scale = 0.0
            for i in range(4):
                for j in range(4):
                    asym = max(asym, abs(s[i, j] - s[j, i].conjugate()))
                    scale = max(scale, abs(s[i, j]))
            max_herm = max(max_herm, asym / scale)
            if symmetrize:
                for i in range(4):
                    for j in range(i, 4):
                        a = 0.5 * (s[i, j] + s[j, i].conjugate())
                        s[i, j] = a
                        s[j, i] = a.conjugate()
    return fields, states, covs, max_comm, max_herm, max_cond


class RawRun(NamedTuple):
    zeta: np.ndarray
    fields: np.ndarray  # (n+1, 2): omega_p, omega_c
    states: np.ndarray  # (n+1, 9) in STATE_ORDER
    covs: np.ndarray  # (n+1, 4, 4)
    max_commutator_drift: float
    max_hermiticity_drift: float
    max_condition: float
    n_steps: int


def run_kernel(
    params: SystemParams,
    n_steps: int,
    with_cov: bool = True,
    symmetrize: bool = True,
    g: float = G_COUPLING,
    noise_prefactor: float = NOISE_PREFACTOR,
) -> RawRun:
    """Integrate once on a fixed grid of ``n_steps`` RK4 steps."""
    try:
        out = integrate(
            complex(params.omega_p0),
            complex(params.omega_c0),
            params.delta_p,
            params.delta_c,
            params.delta,
            params.gamma_p,
            params.gamma1,
            params.gamma2,
            params.alpha,
            float(g),
            float(noise_prefactor),
            int(n_steps),
            bool(with_cov),
            bool(symmetrize),
        )
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"atomic system is singular: {exc}", np.inf) from exc
    fields, states, covs, comm, herm, cond = out
    if not np.isfinite(cond) or cond > COND_LIMIT or not np.all(np.isfinite(covs)):
        raise SingularSystem(f"atomic system is ill-conditioned (cond ~ {cond:.3g})", cond)
    return RawRun(np.linspace(0.0, 1.0, n_steps + 1), fields, states, covs, comm, herm, cond, int(n_steps))
