import numpy as np
import pytest

from eitent import FieldAmplitudes, SystemParams

ACCEPTANCE_LINES: list[str] = []


def random_draw(rng: np.random.Generator, gamma_p: bool = True) -> tuple[SystemParams, FieldAmplitudes]:
    """Parameters and local fields spread over the physically relevant box."""
    oc = 10 ** rng.uniform(-1, 1)
    params = SystemParams(
        alpha=10 ** rng.uniform(1, 4),
        gamma_p=10 ** rng.uniform(-5, -1) if gamma_p else 0.0,
        delta=rng.uniform(-0.2, 0.2),
        omega_c0=oc,
        r=rng.uniform(0.0, 0.9),
    )
    fields = FieldAmplitudes(params.omega_p0 * np.exp(1j * rng.uniform(0, 2 * np.pi)), oc * np.exp(1j * rng.uniform(-0.3, 0.3)))
    return params, fields


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
