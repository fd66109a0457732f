"""Qubit-oscillator Hamiltonians in the Coulomb, dipole, flux and charge gauges.

Units: hbar = 1 and every frequency is measured in units of the cavity
frequency, so ``omega_c`` is normally 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import ConfigError, UnsupportedParameterError
from .hilbert import SY, SZ, HilbertSpec, annihilation, build_space
from .linalg import kron, matrix_function, require_hermitian


class Gauge(str, Enum):
    COULOMB = "coulomb"
    DIPOLE = "dipole"
    FLUX = "flux"
    CHARGE = "charge"

    @property
    def family(self) -> str:
        return "cavity" if self in (Gauge.COULOMB, Gauge.DIPOLE) else "circuit"


@dataclass(frozen=True)
class RabiParams:
    eta: float
    omega_0: float = 1.0
    omega_c: float = 1.0

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ConfigError(f"omega_c must be positive, got {self.omega_c}")
        if self.omega_0 < 0 or self.eta < 0:
            raise ConfigError("omega_0 and eta must be non-negative")

    @property
    def g(self) -> float:
        return self.eta * self.omega_c


@dataclass(frozen=True)
class CircuitParams:
    """Flux-qubit/LC parameters in the two-level projection.

    ``theta = arcsin(epsilon / omega_0)``; pass either ``theta`` directly or a
    bias ``epsilon`` (and optionally ``delta_tunnel`` for a consistency check).
    """

    eta: float
    omega_0: float = 1.0
    omega_c: float = 1.0
    theta: float | None = None
    epsilon: float | None = None
    delta_tunnel: float | None = None

    def __post_init__(self):
        if not self.omega_c > 0:
            raise ConfigError(f"omega_c must be positive, got {self.omega_c}")
        if self.omega_0 < 0 or self.eta < 0:
            raise ConfigError("omega_0 and eta must be non-negative")
        if self.epsilon is not None:
            if abs(self.epsilon) > self.omega_0:
                raise ConfigError("|epsilon| must not exceed omega_0")
            theta = math.asin(self.epsilon / self.omega_0) if self.omega_0 else 0.0
            if self.theta is not None and not math.isclose(self.theta, theta, abs_tol=1e-12):
                raise ConfigError("theta is inconsistent with epsilon / omega_0")
            object.__setattr__(self, "theta", theta)
        elif self.theta is None:
            object.__setattr__(self, "theta", 0.0)
        if self.delta_tunnel is not None:
            eps = self.epsilon if self.epsilon is not None else self.omega_0 * math.sin(self.theta)
            if abs(self.omega_0**2 - self.delta_tunnel**2 - eps**2) > 1e-10:
                raise ConfigError("omega_0^2 must equal delta_tunnel^2 + epsilon^2")

    @classmethod
    def from_bias(cls, eta: float, epsilon: float, delta_tunnel: float, omega_c: float = 1.0):
        return cls(eta=eta, omega_0=math.hypot(epsilon, delta_tunnel), omega_c=omega_c,
                   epsilon=epsilon, delta_tunnel=delta_tunnel)


Params = Union[RabiParams, CircuitParams]


@dataclass(frozen=True)
class GaugeHamiltonian:
    matrix: np.ndarray
    gauge: Gauge
    params: Params
    spec: HilbertSpec

    def __post_init__(self):
        require_hermitian(self.matrix)


Builder = Callable[[Params, HilbertSpec], GaugeHamiltonian]


@lru_cache(maxsize=32)
def _quadrature_eig(n: int, kind: str) -> tuple[np.ndarray, np.ndarray]:
    a = annihilation(n)
    M = a + a.T if kind == "x" else 1j * (a - a.T)
    w, V = np.linalg.eigh(M)
    w.flags.writeable = False
    V.flags.writeable = False
    return w, V


def _cos_sin(n: int, kind: str, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of ``scale`` times the boson quadrature x or p, on the boson space only."""
    if scale == 0:
        return np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex)
    w, V = _quadrature_eig(n, kind)
    Vh = V.conj().T
    return (V * np.cos(scale * w)) @ Vh, (V * np.sin(scale * w)) @ Vh


def _qubit_rotation(spec: HilbertSpec, kind: str, eta: float) -> np.ndarray:
    """sz cos(2 eta q) + sy sin(2 eta q) for q = x or p of mode a."""
    c, s = _cos_sin(spec.n_fock, kind, 2 * eta)
    ib = np.eye(spec.n_fock_b or 1)
    return kron(SZ, c, ib) + kron(SY, s, ib)


def free_hamiltonian(params: Params, spec: HilbertSpec) -> np.ndarray:
    ops = build_space(spec)
    return params.omega_c * ops.n + 0.5 * params.omega_0 * ops.sz


def build_coulomb(params: RabiParams, spec: HilbertSpec) -> GaugeHamiltonian:
    """omega_c a^dag a + (omega_0/2)(sz cos 2 eta x + sy sin 2 eta x)."""
    ops = build_space(spec)
    H = params.omega_c * ops.n + 0.5 * params.omega_0 * _qubit_rotation(spec, "x", params.eta)
    return GaugeHamiltonian(_herm(H), Gauge.COULOMB, params, spec)


def dipole_interaction(params: RabiParams, spec: HilbertSpec) -> np.ndarray:
    ops = build_space(spec)
    return 1j * params.eta * params.omega_c * (ops.a_dag - ops.a) @ ops.sx


def build_dipole(params: RabiParams, spec: HilbertSpec, self_energy: bool = False) -> GaugeHamiltonian:
    """Free part plus i eta omega_c (a^dag - a) sx.

    With ``self_energy`` the constant eta^2 omega_c is added, which makes the
    matrix exactly the gauge transform of the Coulomb Hamiltonian.
    """
    H = free_hamiltonian(params, spec) + dipole_interaction(params, spec)
    if self_energy:
        H = H + params.eta**2 * params.omega_c * np.eye(spec.dim)
    return GaugeHamiltonian(_herm(H), Gauge.DIPOLE, params, spec)


def gauge_generator(params: Params, spec: HilbertSpec) -> np.ndarray:
    """F = -eta sx x; the cavity gauge unitary is exp(iF)."""
    ops = build_space(spec)
    return -params.eta * ops.sx @ ops.x


def build_gauge_T(params: RabiParams, spec: HilbertSpec) -> np.ndarray:
    """exp(-i eta sx x), mapping Coulomb-gauge states to dipole-gauge states."""
    if params.eta == 0:
        return np.eye(spec.dim, dtype=complex)
    ops = build_space(spec)
    return matrix_function(ops.sx @ ops.x, lambda w: np.exp(-1j * params.eta * w))


def build_flux_gauge(params: CircuitParams, spec: HilbertSpec) -> GaugeHamiltonian:
    ops = build_space(spec)
    th = params.theta
    coupling = params.omega_c * params.eta * ops.x @ (math.cos(th) * ops.sx - math.sin(th) * ops.sz)
    H = free_hamiltonian(params, spec) + coupling
    return GaugeHamiltonian(_herm(H), Gauge.FLUX, params, spec)


def build_gauge_R(params: CircuitParams, spec: HilbertSpec) -> np.ndarray:
    """exp[eta sx (a - a^dag)] = exp(-i eta sx p), mapping charge- to flux-gauge states."""
    if params.eta == 0:
        return np.eye(spec.dim, dtype=complex)
    ops = build_space(spec)
    return matrix_function(ops.sx @ ops.p, lambda w: np.exp(-1j * params.eta * w))


def _require_symmetry_point(params: CircuitParams) -> None:
    if abs(params.theta) > 1e-14:
        raise UnsupportedParameterError("the charge gauge is only available at theta = 0")


def build_charge_gauge(params: CircuitParams, spec: HilbertSpec) -> GaugeHamiltonian:
    """omega_c a^dag a + (omega_0/2) R^dag sz R, built by explicit conjugation."""
    _require_symmetry_point(params)
    ops = build_space(spec)
    R = build_gauge_R(params, spec)
    H = params.omega_c * ops.n + 0.5 * params.omega_0 * (R.conj().T @ ops.sz @ R)
    return GaugeHamiltonian(_herm(H), Gauge.CHARGE, params, spec)


def build_mutual_inductance_charge(params: CircuitParams, spec: HilbertSpec) -> GaugeHamiltonian:
    """Momentum-coupled form written out as sz cos(2 eta p) + sy sin(2 eta p)."""
    _require_symmetry_point(params)
    ops = build_space(spec)
    H = params.omega_c * ops.n + 0.5 * params.omega_0 * _qubit_rotation(spec, "p", params.eta)
    return GaugeHamiltonian(_herm(H), Gauge.CHARGE, params, spec)


def build_two_mode_coulomb(
    params_a: RabiParams,
    omega_b: float,
    eta_b: float,
    spec: HilbertSpec,
    form: str = "full",
) -> GaugeHamiltonian:
    """Qubit coupled to the USC mode a and a weak readout mode b.

    ``form="full"`` keeps the joint argument 2 eta_a x_a + 2 eta_b x_b inside
    the cosine and sine. ``form="reduced"`` keeps mode b to first order only,
    omega_0 eta_b x_b sy' with the rotated Pauli operators of mode a.
    """
    if spec.n_fock_b is None:
        raise ConfigError("two-mode Hamiltonian needs spec.n_fock_b")
    if params_a.eta > 0 and eta_b > 0.1 * params_a.eta:
        warnings.warn(f"eta_b = {eta_b} is not small compared to eta_a = {params_a.eta}",
                      stacklevel=2)
    ops = build_space(spec)
    w0 = params_a.omega_0
    ca, sa = _cos_sin(spec.n_fock, "x", 2 * params_a.eta)
    H = params_a.omega_c * ops.n + omega_b * ops.n_b
    if form == "full":
        cb, sb = _cos_sin(spec.n_fock_b, "x", 2 * eta_b)
        cos_sum = np.kron(ca, cb) - np.kron(sa, sb)
        sin_sum = np.kron(sa, cb) + np.kron(ca, sb)
        H = H + 0.5 * w0 * (np.kron(SZ, cos_sum) + np.kron(SY, sin_sum))
    elif form == "reduced":
        ib = np.eye(spec.n_fock_b)
        sz_rot = kron(SZ, ca, ib) + kron(SY, sa, ib)
        sy_rot = kron(SY, ca, ib) - kron(SZ, sa, ib)
        H = H + 0.5 * w0 * sz_rot + eta_b * w0 * ops.x_b @ sy_rot
    else:
        raise ConfigError(f"unknown two-mode form {form!r}")
    return GaugeHamiltonian(_herm(H), Gauge.COULOMB, params_a, spec)


def gauge_unitary(from_gauge: Gauge, to_gauge: Gauge, params: Params, spec: HilbertSpec) -> np.ndarray:
    """Unitary U with |psi_to> = U |psi_from> (up to a global phase)."""
    from_gauge, to_gauge = Gauge(from_gauge), Gauge(to_gauge)
    if from_gauge == to_gauge:
        return np.eye(spec.dim, dtype=complex)
    if from_gauge.family != to_gauge.family:
        raise ConfigError(f"no gauge map between {from_gauge.value} and {to_gauge.value}")
    if from_gauge.family == "cavity":
        T = build_gauge_T(params, spec)
        return T if to_gauge == Gauge.DIPOLE else T.conj().T
    _require_symmetry_point(params)
    R = build_gauge_R(params, spec)
    return R if to_gauge == Gauge.FLUX else R.conj().T


def transport(O: np.ndarray, from_gauge: Gauge, to_gauge: Gauge, params: Params, spec: HilbertSpec) -> np.ndarray:
    """Express an operator defined in ``from_gauge`` in ``to_gauge``."""
    if Gauge(from_gauge) == Gauge(to_gauge):
        return O
    U = gauge_unitary(from_gauge, to_gauge, params, spec)
    return U @ O @ U.conj().T


BUILDERS: dict[Gauge, Builder] = {
    Gauge.COULOMB: build_coulomb,
    Gauge.DIPOLE: build_dipole,
    Gauge.FLUX: build_flux_gauge,
    Gauge.CHARGE: build_charge_gauge,
}


def with_eta(params: Params, eta: float) -> Params:
    return replace(params, eta=eta)


def _herm(H: np.ndarray) -> np.ndarray:
    # spectral-calculus products carry ~1e-15 asymmetry; symmetrize once here
    return 0.5 * (H + H.conj().T)
