import numpy as np
import pytest

from eitent import FieldAmplitudes, SingularSystem, SystemParams, bloch_rhs, m1_matrix, steady_state
from eitent.params import STATE_INDEX

from conftest import random_draw


def dark(r=0.1, **kw):
    p = SystemParams(alpha=1000, r=r, **kw)
    return p, FieldAmplitudes(p.omega_p0, p.omega_c0)


def test_dark_state_populations_and_coherence():
    p, f = dark()
    st = steady_state(f, p)
    assert st.sigma[0, 0].real == pytest.approx(1 / 1.01, abs=1e-12)
    assert st.sigma[1, 1].real == pytest.approx(0.01 / 1.01, abs=1e-12)
    assert abs(st["s21"]) == pytest.approx(0.0990099, abs=1e-7)


def test_dark_state_is_transparent():
    p, f = dark()
    st = steady_state(f, p)
    assert abs(st["s33"]) <= 1e-6
    assert abs(st["s13"]) <= 1e-6
    assert abs(st["s23"]) <= 1e-6


def test_optical_pumping_without_coupling():
    # only the probe: everything ends in the uncoupled ground state |2>
    p = SystemParams(alpha=10)
    with pytest.warns(RuntimeWarning):
        f = FieldAmplitudes(0.3, 0.0)
    st = steady_state(f, p)
    assert st.populations == pytest.approx([0, 1, 0], abs=1e-12)


def test_both_fields_zero_is_singular():
    with pytest.raises(SingularSystem):
        steady_state(FieldAmplitudes(0, 0), SystemParams(alpha=10))


def test_m1_printed_entries():
    p = SystemParams(alpha=1000, delta=0.01)
    m1 = m1_matrix(FieldAmplitudes(0.1, 1.0), p)
    assert m1[0, 0] == pytest.approx(-(0.5 + 1j * p.delta_p))
    assert m1[2, 0] == pytest.approx(-0.5j)
    assert m1[2, 2] == pytest.approx(-0.01j)
    assert np.array_equal(m1[5], [0, 0, 0, 1, 1, 1, 0, 0, 0])


def test_m1_without_fields_keeps_only_decay_and_trace():
    p = SystemParams(alpha=10, delta=0.03, gamma_p=0.002)
    m1 = m1_matrix(FieldAmplitudes(0, 0), p)
    off = m1 - np.diag(np.diag(m1))
    off[5] = 0
    # population feeding from s33 survives: rows s11, s22 get Gamma_i * s33
    off[STATE_INDEX["s11"], STATE_INDEX["s33"]] = 0
    off[STATE_INDEX["s22"], STATE_INDEX["s33"]] = 0
    assert np.all(off == 0)


def test_steady_state_solves_m1():
    p, f = dark(delta=0.02, gamma_p=1e-3)
    st = steady_state(f, p)
    e6 = np.zeros(9)
    e6[5] = 1
    assert np.abs(m1_matrix(f, p) @ st.vector - e6).max() < 1e-12


def test_residuals_on_random_draws(rng):
    worst = 0.0
    for _ in range(200):
        p, f = random_draw(rng)
        st = steady_state(f, p)
        worst = max(worst, np.abs(bloch_rhs(st.sigma, f, p)).max())
        assert st.trace == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(st.sigma, st.sigma.conj().T, atol=1e-14)
        assert np.all(st.populations > -1e-12) and np.all(st.populations < 1 + 1e-12)
    assert worst <= 1e-10


def test_residual_oracle_detects_wrong_state():
    p, f = dark(delta=0.01)
    st = steady_state(f, p)
    bad = st.sigma.copy()
    bad[0, 1] *= 1.01
    assert np.abs(bloch_rhs(bad, f, p)).max() > 1e-5


def test_asymmetric_detuning_breaks_dark_state():
    p, f = dark(delta=0.05)
    assert abs(steady_state(f, p)["s13"]) > 1e-4


def test_no_probe_leaves_atoms_in_state_1():
    for gp in (0.0, 0.01):
        st = steady_state(FieldAmplitudes(0.0, 1.0), SystemParams(alpha=10, gamma_p=gp))
        expected = np.zeros((3, 3))
        expected[0, 0] = 1
        assert np.abs(st.sigma - expected).max() <= 1e-12


def test_decoherence_repopulates_excited_state():
    p, f = dark(gamma_p=0.005)
    st = steady_state(f, p)
    assert st["s33"].real > 1e-8
    assert abs(st["s13"]) > 1e-6
