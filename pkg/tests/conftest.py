import numpy as np
import pytest

from gaugeqed.hamiltonians import RabiParams, build_coulomb, build_dipole
from gaugeqed.spectra import label_sweep

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def cavity_sweeps():
    """Labeled Coulomb and dipole spectra on a shared eta grid (resonance)."""
    etas = [1e-4, 1e-3] + [round(0.05 * k, 2) for k in range(1, 41)]
    params = RabiParams(0.0)
    coulomb = label_sweep(build_coulomb, params, etas, 6)
    dipole = label_sweep(build_dipole, params, etas, 6, n_fock=coulomb[0].spec.n_fock)
    return {"etas": etas, "coulomb": dict(zip(etas, coulomb)), "dipole": dict(zip(etas, dipole))}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
