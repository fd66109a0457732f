"""Closed-form reference states and energies.

Kept independent of the numerical path: coherent amplitudes come from the
Poisson formula in log space, not from operator exponentials or recursions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, TruncationError
from .hamiltonians import RabiParams

_E = np.array([1.0, 0.0], dtype=complex)
_G = np.array([0.0, 1.0], dtype=complex)
_PLUS_X = (_E + _G) / math.sqrt(2)
_MINUS_X = (_E - _G) / math.sqrt(2)


@dataclass(frozen=True)
class AsymptoticPrediction:
    regime: str
    quantities: dict = field(default_factory=dict)


def _coherent(alpha: complex, n_fock: int) -> tuple[np.ndarray, float]:
    """Truncated coherent amplitudes and the norm lost to truncation."""
    n = np.arange(n_fock)
    r = abs(alpha)
    if r == 0:
        c = np.zeros(n_fock, dtype=complex)
        c[0] = 1.0
        return c, 0.0
    log_mag = -0.5 * r**2 + n * math.log(r) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    c = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    return c, float(1.0 - np.sum(np.abs(c) ** 2))


def _cat(qubit_a, alpha_a, qubit_b, alpha_b, sign, n_fock):
    ca, lost_a = _coherent(alpha_a, n_fock)
    cb, lost_b = _coherent(alpha_b, n_fock)
    if max(lost_a, lost_b) > 1e-4:
        raise TruncationError(f"coherent amplitude {abs(alpha_a):.3g} needs a larger cutoff")
    psi = (np.kron(qubit_a, ca) + sign * np.kron(qubit_b, cb)) / math.sqrt(2)
    return psi / np.linalg.norm(psi), max(lost_a, lost_b)


def large_eta_states(params, n_fock: int, flavor: str = "cavity") -> dict[str, np.ndarray]:
    """Leading-order eigenstates for eta * omega_c >> omega_0.

    cavity:  dipole-gauge cats (|-i eta>|+x> +- |i eta>|-x>)/sqrt2 and the
             corresponding Coulomb-gauge states |0>|e>, |0>|g>.
    circuit: flux-gauge cats (|-eta>|+x> +- |eta>|-x>)/sqrt2.
    The "minus" state is the lower one.
    """
    eta = params.eta
    out = {}
    if flavor == "cavity":
        amp = -1j * eta
        out["psi_plus"], lost = _cat(_PLUS_X, amp, _MINUS_X, -amp, +1, n_fock)
        out["psi_minus"], _ = _cat(_PLUS_X, amp, _MINUS_X, -amp, -1, n_fock)
        vac, _ = _coherent(0.0, n_fock)
        out["coulomb_plus"] = np.kron(_E, vac)
        out["coulomb_minus"] = np.kron(_G, vac)
    elif flavor == "circuit":
        amp = -eta
        out["psi_plus"], lost = _cat(_PLUS_X, amp, _MINUS_X, -amp, +1, n_fock)
        out["psi_minus"], _ = _cat(_PLUS_X, amp, _MINUS_X, -amp, -1, n_fock)
    else:
        raise PreconditionError(f"unknown flavor {flavor!r}")
    if lost > 1e-6:
        raise TruncationError(f"truncation removes {lost:.2e} of the coherent-state norm")
    return out


def large_eta_prediction(params, flavor: str = "cavity") -> AsymptoticPrediction:
    """Scalar limits of the two lowest states."""
    eta = params.eta
    if flavor == "cavity":
        q = {
            "coulomb_population": (0.0, 1.0),
            "coulomb_photons": 0.0,
            "coulomb_entropy": 0.0,
            "dipole_population": 0.5,
            "dipole_photons": eta**2,
            "dipole_entropy": 1.0,
        }
        return AsymptoticPrediction("large_eta_cavity", q)
    return AsymptoticPrediction("large_eta_circuit", {"photons": eta**2, "entropy": 1.0})


def jc_doublet(params: RabiParams) -> dict[str, float]:
    """First-manifold energies above the ground state in the rotating-wave limit."""
    if params.eta > 0.02:
        raise PreconditionError(f"eta = {params.eta} is outside the weak-coupling window (<= 0.02)")
    g = params.eta * params.omega_c
    detuning = params.omega_0 - params.omega_c
    centre = 0.5 * (params.omega_c + params.omega_0)
    split = math.sqrt(g**2 + 0.25 * detuning**2)
    return {"E_minus": centre - split, "E_plus": centre + split}
