"""Measurable quantities: photodetection rates, populations, photon numbers,
entanglement, circuit voltages and positive-frequency operator parts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PreconditionError
from .hamiltonians import CircuitParams, Gauge, Params, transport
from .hilbert import GROUND, EXCITED, SX, HilbertSpec, build_space
from .linalg import expectation, reduced_qubit_state, von_neumann_entropy
from .spectra import DEGENERACY_TOL, Spectrum


@dataclass(frozen=True)
class ObservableReport:
    name: str
    gauge: Gauge
    params: Params
    value: float
    transition: tuple | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"{self.name} is not finite")


def positive_frequency_part(O: np.ndarray, spectrum: Spectrum) -> np.ndarray:
    """Lowering part of O in the eigenbasis: sum over E_k < E_j of O_kj |k><j|.

    Pairs closer than the degeneracy tolerance carry no frequency and are dropped.
    """
    V = spectrum.states
    E = spectrum.energies
    O_eig = V.conj().T @ O @ V
    lowering = (E[None, :] - E[:, None]) > DEGENERACY_TOL
    return V @ (O_eig * lowering) @ V.conj().T


def matrix_element(spectrum: Spectrum, O: np.ndarray, bra, ket) -> complex:
    return complex(np.vdot(spectrum.state(bra), O @ spectrum.state(ket)))


def field_operator(spectrum: Spectrum) -> np.ndarray:
    """Gauge-consistent electric-field quadrature i(a - a^dag), in the spectrum's gauge."""
    ops = build_space(spectrum.spec)
    if spectrum.gauge == Gauge.COULOMB:
        return ops.p
    if spectrum.gauge == Gauge.DIPOLE:
        return ops.p - 2 * spectrum.params.eta * ops.sx
    raise ConfigError("photodetection rates are defined for cavity gauges")


def photodetection_W(spectrum: Spectrum, j, k) -> float:
    """|<k|E|j>|^2 with the field operator expressed consistently in either cavity gauge."""
    _require_lower(spectrum, j, k)
    return abs(matrix_element(spectrum, field_operator(spectrum), k, j)) ** 2


def photodetection_Wprime(spectrum: Spectrum, j, k) -> float:
    """Naive dipole-gauge rate: i(a - a^dag) used without its qubit contribution."""
    if spectrum.gauge != Gauge.DIPOLE:
        raise ConfigError("the naive rate is defined on dipole-gauge states")
    _require_lower(spectrum, j, k)
    return abs(matrix_element(spectrum, build_space(spectrum.spec).p, k, j)) ** 2


def _sensor_rate(spectrum: Spectrum, j, l, field: np.ndarray) -> float:
    # system (x) two-level sensor; the sensor is excited g -> e while the system decays j -> l
    coupling = np.kron(field, SX)
    initial = np.kron(spectrum.state(j), GROUND)
    final = np.kron(spectrum.state(l), EXCITED)
    return abs(np.vdot(final, coupling @ initial)) ** 2


def sensor_rate_corrected(spectrum: Spectrum, j, l) -> float:
    """Golden-rule excitation rate of a weakly coupled sensor, dipole-gauge states.

    The sensor couples to the displacement field minus the polarization of the
    qubit, i.e. to i(a - a^dag) - 2 eta sx.
    """
    if spectrum.gauge != Gauge.DIPOLE:
        raise ConfigError("sensor rates are formulated with dipole-gauge states")
    _require_lower(spectrum, j, l)
    ops = build_space(spectrum.spec)
    return _sensor_rate(spectrum, j, l, ops.p - 2 * spectrum.params.eta * ops.sx)


def sensor_rate_naive(spectrum: Spectrum, j, l) -> float:
    """Same sensor, but coupled to i(a - a^dag) alone (not gauge invariant)."""
    if spectrum.gauge != Gauge.DIPOLE:
        raise ConfigError("sensor rates are formulated with dipole-gauge states")
    _require_lower(spectrum, j, l)
    return _sensor_rate(spectrum, j, l, build_space(spectrum.spec).p)


def _measure(spectrum: Spectrum, level, O: np.ndarray, gauge_of_measurement: Gauge) -> float:
    O_here = transport(O, gauge_of_measurement, spectrum.gauge, spectrum.params, spectrum.spec)
    return expectation(spectrum.state(level), O_here)


def qubit_population(spectrum: Spectrum, level, gauge_of_measurement: Gauge | str) -> float:
    """<sigma_+ sigma_-> with the bare operator taken in ``gauge_of_measurement``.

    Gauge.DIPOLE gives the population seen by dispersive readout; Gauge.COULOMB
    gives the bare Coulomb-gauge population.
    """
    ops = build_space(spectrum.spec)
    value = _measure(spectrum, level, ops.s_plus @ ops.s_minus, Gauge(gauge_of_measurement))
    return float(np.clip(value, 0.0, 1.0))


def sigma_z(spectrum: Spectrum, level, gauge_of_measurement: Gauge | str) -> float:
    ops = build_space(spectrum.spec)
    return _measure(spectrum, level, ops.sz, Gauge(gauge_of_measurement))


def photon_number(spectrum: Spectrum, level, gauge_of_measurement: Gauge | str) -> float:
    ops = build_space(spectrum.spec)
    return max(0.0, _measure(spectrum, level, ops.n, Gauge(gauge_of_measurement)))


def ground_photon_number(spectrum: Spectrum, gauge_of_measurement: Gauge | str) -> float:
    """Ground-state <a^dag a> with a^dag a defined in ``gauge_of_measurement``.

    For cavities the physical photon number is the Coulomb one; measuring the
    dipole-gauge a^dag a on dipole states gives the naive comparator.
    """
    return photon_number(spectrum, 0, gauge_of_measurement)


def entanglement_entropy(state: np.ndarray, spec: HilbertSpec | None = None) -> float:
    """Qubit von Neumann entropy in bits."""
    state = np.asarray(state, dtype=complex)
    if spec is not None and state.size != spec.dim:
        raise PreconditionError(f"state has length {state.size}, expected {spec.dim}")
    norm = np.linalg.norm(state)
    if abs(norm - 1) > 1e-8:
        raise PreconditionError(f"state is not normalized (norm {norm:.12g})")
    return float(np.clip(von_neumann_entropy(reduced_qubit_state(state)), 0.0, 1.0))


def inductor_flux(params: CircuitParams, gauge: Gauge, spec: HilbertSpec) -> np.ndarray:
    """Inductor flux in units of the zero-point flux."""
    ops = build_space(spec)
    if gauge == Gauge.FLUX:
        th = params.theta
        return ops.x + 2 * params.eta * (math.cos(th) * ops.sx - math.sin(th) * ops.sz)
    if gauge == Gauge.CHARGE:
        return ops.x
    raise ConfigError("inductor flux is defined for circuit gauges")


def inductor_voltage(spectrum: Spectrum) -> np.ndarray:
    """Heisenberg rate of change -i[Phi_L, H], in units of omega_c times the zero-point flux."""
    phi = inductor_flux(spectrum.params, spectrum.gauge, spectrum.spec)
    H = spectrum.hamiltonian.matrix
    return -1j * (phi @ H - H @ phi) / spectrum.params.omega_c


def circuit_voltage_rates(spectrum: Spectrum, j, k=0) -> dict[str, float]:
    """Normalized emission rates |<k|V_L|j>|^2 (inductor) and |<k|a - a^dag|j>|^2 (capacitor)."""
    _require_lower(spectrum, j, k)
    ops = build_space(spectrum.spec)
    v_l = matrix_element(spectrum, inductor_voltage(spectrum), k, j)
    v_c = matrix_element(spectrum, ops.a - ops.a_dag, k, j)
    return {"V_L_rate": abs(v_l) ** 2, "V_C_rate": abs(v_c) ** 2}


def ground_state_report(spectrum: Spectrum, reference: Gauge) -> list[ObservableReport]:
    """Ground-state photon number, population and entropy with the bare operators of
    ``reference`` and of the spectrum's own gauge."""
    out = []
    for g in dict.fromkeys([reference, spectrum.gauge]):
        out.append(ObservableReport("photon_number", g, spectrum.params, ground_photon_number(spectrum, g)))
        out.append(ObservableReport("qubit_population", g, spectrum.params, qubit_population(spectrum, 0, g)))
    out.append(ObservableReport("entropy", spectrum.gauge, spectrum.params,
                                entanglement_entropy(spectrum.state(0))))
    return out


def _require_lower(spectrum: Spectrum, j, k) -> None:
    if spectrum.index(k) == spectrum.index(j):
        raise PreconditionError("transition needs two distinct levels")
    if spectrum.energies[spectrum.index(k)] > spectrum.energies[spectrum.index(j)]:
        raise PreconditionError("final level must lie below the initial level")
