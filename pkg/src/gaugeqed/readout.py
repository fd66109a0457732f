"""Dispersive readout of the dressed qubit through a weakly coupled mode b."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ExtractionError, ResonanceError
from .hamiltonians import Gauge, RabiParams, build_coulomb, build_two_mode_coulomb, transport
from .hilbert import HilbertSpec, build_space, fock_state
from .linalg import expectation, hermitian_eig
from .observables import qubit_population, sigma_z
from .spectra import diagonalize_converged

OVERLAP_THRESHOLD = 0.8


@dataclass(frozen=True)
class ReadoutParams:
    """Readout mode b: frequency ``omega_b`` and coupling ``g_b = omega_0 * eta_b``.

    The default omega_b sits well below the lowest dressed qubit splitting in
    the ultrastrong regime, where the shift follows the adiabatic response.
    """

    omega_b: float = 0.02
    g_b: float = 0.02
    omega_0: float = 1.0
    n_fock_b: int = 4

    def __post_init__(self):
        if not self.omega_b > 0:
            raise ConfigError("omega_b must be positive")
        if self.delta_readout == 0:
            raise ResonanceError("readout mode is resonant with the qubit")
        if abs(self.g_b / self.delta_readout) >= 0.1:
            raise ConfigError(f"|g_b / delta| = {abs(self.g_b / self.delta_readout):.3g} "
                              "is outside the dispersive regime")

    @property
    def delta_readout(self) -> float:
        return self.omega_0 - self.omega_b

    @property
    def sigma_sum(self) -> float:
        return self.omega_0 + self.omega_b

    @property
    def eta_b(self) -> float:
        return self.g_b / self.omega_0


@dataclass(frozen=True)
class ReadoutResult:
    shift: float
    chi: float
    sigma_z_dipole: float
    overlaps: tuple[float, float]

    @property
    def ratio(self) -> float:
        return self.shift / self.chi


def chi_analytic(p: ReadoutParams) -> float:
    """g_b^2/delta + g_b^2/sigma, including the counter-rotating contribution."""
    if p.delta_readout == 0:
        raise ResonanceError("chi diverges at resonance")
    return p.g_b**2 / p.delta_readout + p.g_b**2 / p.sigma_sum


def chi_numeric(
    params_a: RabiParams,
    p: ReadoutParams,
    level: int = 0,
    n_fock: int | None = None,
    form: str = "reduced",
    state: np.ndarray | None = None,
) -> ReadoutResult:
    """Shift of the mode-b transition conditioned on the dressed qubit level.

    Uses exact diagonalization of the two-mode Coulomb Hamiltonian and picks
    the eigenstates with maximal overlap on |level> (x) |n_b>, n_b = 0, 1.
    ``state`` replaces the dressed level by an explicit Coulomb-gauge vector on
    the qubit (x) mode-a space (useful inside degenerate bare manifolds).
    """
    if not np.isclose(params_a.omega_0, p.omega_0):
        raise ConfigError("readout omega_0 differs from the qubit omega_0")
    single = diagonalize_converged(build_coulomb, params_a, max(level + 2, 4), n_fock=n_fock)
    n_a = single.spec.n_fock
    if state is None:
        dressed = single.state(level)
        sz_dipole = sigma_z(single, level, Gauge.DIPOLE)
    else:
        dressed = np.asarray(state, dtype=complex)
        if dressed.size != single.spec.dim:
            raise ConfigError(f"state must have length {single.spec.dim} (cutoff {n_a})")
        sz_op = transport(build_space(single.spec).sz, Gauge.DIPOLE, Gauge.COULOMB, params_a, single.spec)
        sz_dipole = expectation(dressed, sz_op)
    spec = HilbertSpec(n_a, p.n_fock_b)
    H = build_two_mode_coulomb(params_a, p.omega_b, p.eta_b, spec, form=form)
    E, V = hermitian_eig(H.matrix)

    energies, overlaps = [], []
    for n_b in (0, 1):
        target = np.einsum("qa,b->qab", dressed.reshape(2, n_a), fock_state(n_b, p.n_fock_b)).ravel()
        weights = np.abs(V.conj().T @ target) ** 2
        k = int(np.argmax(weights))
        if weights[k] < OVERLAP_THRESHOLD:
            raise ExtractionError(
                f"mode-b level n_b={n_b} of dressed level {level} has overlap {weights[k]:.3f} "
                f"< {OVERLAP_THRESHOLD}; the dispersive picture does not hold"
            )
        energies.append(E[k])
        overlaps.append(float(weights[k]))
    shift = energies[1] - energies[0] - p.omega_b
    return ReadoutResult(
        shift=float(shift),
        chi=chi_analytic(p),
        sigma_z_dipole=sz_dipole,
        overlaps=tuple(overlaps),
    )


def excitation_probabilities(params_a: RabiParams, level: int = 0, n_fock: int | None = None) -> dict[str, float]:
    """Qubit excitation of a dressed level with the bare Coulomb and dipole operators."""
    sp = diagonalize_converged(build_coulomb, params_a, max(level + 2, 4), n_fock=n_fock)
    return {
        "coulomb": qubit_population(sp, level, Gauge.COULOMB),
        "dipole": qubit_population(sp, level, Gauge.DIPOLE),
    }
