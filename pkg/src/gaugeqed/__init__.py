"""Gauge-consistent simulation of ultrastrong-coupling cavity and circuit QED."""
from .hamiltonians import (
    CircuitParams,
    Gauge,
    GaugeHamiltonian,
    RabiParams,
    build_charge_gauge,
    build_coulomb,
    build_dipole,
    build_flux_gauge,
    build_gauge_R,
    build_gauge_T,
    build_mutual_inductance_charge,
    build_two_mode_coulomb,
    transport,
)
from .hilbert import HilbertSpec, build_space, coherent_state, default_cutoff
from .dynamics import SwitchProtocol, propagate, sudden_switch_limit
from .observables import (
    circuit_voltage_rates,
    entanglement_entropy,
    photodetection_W,
    photodetection_Wprime,
    photon_number,
    qubit_population,
)
from .readout import ReadoutParams, chi_analytic, chi_numeric
from .spectra import (
    Spectrum,
    converged_labeled,
    diagonalize,
    diagonalize_converged,
    label_states,
    label_sweep,
)

__all__ = [
    "CircuitParams",
    "Gauge",
    "GaugeHamiltonian",
    "HilbertSpec",
    "RabiParams",
    "ReadoutParams",
    "Spectrum",
    "SwitchProtocol",
    "build_charge_gauge",
    "build_coulomb",
    "build_dipole",
    "build_flux_gauge",
    "build_gauge_R",
    "build_gauge_T",
    "build_mutual_inductance_charge",
    "build_space",
    "build_two_mode_coulomb",
    "chi_analytic",
    "chi_numeric",
    "circuit_voltage_rates",
    "coherent_state",
    "converged_labeled",
    "default_cutoff",
    "diagonalize",
    "diagonalize_converged",
    "entanglement_entropy",
    "label_states",
    "label_sweep",
    "photodetection_W",
    "photodetection_Wprime",
    "photon_number",
    "propagate",
    "qubit_population",
    "sudden_switch_limit",
    "transport",
]
