import numpy as np
import pytest
import scipy.linalg

from gaugeqed.errors import ConfigError, UnsupportedParameterError
from gaugeqed.hamiltonians import (
    CircuitParams,
    Gauge,
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
from gaugeqed.hilbert import HilbertSpec, build_space, parity_operator
from gaugeqed.observables import ground_photon_number
from gaugeqed.spectra import diagonalize


def eig(H):
    return np.linalg.eigvalsh(H.matrix)


def gaps(e, k):
    return e[:k] - e[0]


def interior(n_fock, keep):
    return np.r_[0:keep, n_fock : n_fock + keep]


BARE = np.array([-0.5, 0.5, 0.5, 1.5, 1.5, 2.5])


@pytest.mark.parametrize("builder", [build_coulomb, build_dipole])
def test_cavity_bare_ladder(builder):
    assert np.allclose(eig(builder(RabiParams(0.0), HilbertSpec(10)))[:6], BARE)


@pytest.mark.parametrize("builder", [build_flux_gauge, build_charge_gauge, build_mutual_inductance_charge])
def test_circuit_bare_ladder(builder):
    assert np.allclose(eig(builder(CircuitParams(0.0), HilbertSpec(10)))[:6], BARE)


def test_coulomb_reduces_exactly_at_zero_coupling():
    spec = HilbertSpec(12)
    ops = build_space(spec)
    assert np.array_equal(build_coulomb(RabiParams(0.0, 0.7), spec).matrix, ops.n + 0.35 * ops.sz)


def test_coulomb_matches_dipole_spectrum():
    spec = HilbertSpec(60)
    ec = eig(build_coulomb(RabiParams(1.0), spec))
    ed = eig(build_dipole(RabiParams(1.0), spec))
    assert np.max(np.abs(gaps(ec, 8) - gaps(ed, 8)) / np.maximum(gaps(ec, 8), 1)) < 1e-8


def test_vacuum_rabi_asymmetry():
    e = eig(build_coulomb(RabiParams(0.5), HilbertSpec(60)))
    assert e[1] - e[0] < 1.0


def test_dipole_small_coupling_splitting():
    e = eig(build_dipole(RabiParams(0.1), HilbertSpec(40)))
    assert abs((e[2] - e[1]) - 0.2) < 5e-3


def test_dipole_large_coupling_doublet():
    e = eig(build_dipole(RabiParams(2.0), HilbertSpec(80)))
    assert e[1] - e[0] < 1e-2


def test_self_energy_offset():
    spec = HilbertSpec(10)
    p = RabiParams(0.4)
    diff = build_dipole(p, spec, self_energy=True).matrix - build_dipole(p, spec).matrix
    assert np.allclose(diff, 0.16 * np.eye(spec.dim))


def test_gauge_T_identity_and_unitarity():
    spec = HilbertSpec(30)
    assert np.allclose(build_gauge_T(RabiParams(0.0), spec), np.eye(spec.dim))
    T = build_gauge_T(RabiParams(0.8), spec)
    assert np.max(np.abs(T.conj().T @ T - np.eye(spec.dim))) < 1e-10


def test_gauge_T_against_expm():
    spec = HilbertSpec(30)
    ops = build_space(spec)
    ref = scipy.linalg.expm(-1j * 0.8 * ops.sx @ ops.x)
    assert np.max(np.abs(build_gauge_T(RabiParams(0.8), spec) - ref)) < 1e-10


def test_gauge_T_maps_coulomb_to_dipole():
    spec = HilbertSpec(80)
    p = RabiParams(0.8)
    T = build_gauge_T(p, spec)
    mapped = T @ build_coulomb(p, spec).matrix @ T.conj().T
    target = build_dipole(p, spec, self_energy=True).matrix
    idx = interior(80, 40)
    assert np.max(np.abs((mapped - target)[np.ix_(idx, idx)])) < 1e-6


def test_transformed_photon_operator():
    spec = HilbertSpec(80)
    eta = 0.8
    ops = build_space(spec)
    T = build_gauge_T(RabiParams(eta), spec)
    a_prime = T @ ops.a @ T.conj().T
    idx = interior(80, 40)
    assert np.max(np.abs((a_prime - ops.a - 1j * eta * ops.sx)[np.ix_(idx, idx)])) < 1e-8


@pytest.mark.parametrize("eta", [0.3, 1.0, 2.0])
def test_flux_matches_charge_spectrum(eta):
    spec = HilbertSpec(120)
    ef = eig(build_flux_gauge(CircuitParams(eta), spec))
    ec = eig(build_charge_gauge(CircuitParams(eta), spec))
    assert np.max(np.abs(gaps(ef, 6) - gaps(ec, 6)) / np.maximum(gaps(ef, 6), 1)) < 1e-8


def test_charge_gauge_photon_operator():
    spec = HilbertSpec(80)
    eta = 0.6
    ops = build_space(spec)
    R = build_gauge_R(CircuitParams(eta), spec)
    ref = scipy.linalg.expm(eta * ops.sx @ (ops.a - ops.a_dag))
    assert np.max(np.abs(R - ref)) < 1e-10
    a_prime = R.conj().T @ ops.a @ R
    idx = interior(80, 40)
    assert np.max(np.abs((a_prime - ops.a + eta * ops.sx)[np.ix_(idx, idx)])) < 1e-8


def test_charge_gauge_rejects_bias():
    with pytest.raises(UnsupportedParameterError):
        build_charge_gauge(CircuitParams(0.5, theta=0.2), HilbertSpec(10))


def test_flux_gauge_ground_photons_large_coupling():
    sp = diagonalize(build_flux_gauge(CircuitParams(2.0), HilbertSpec(80)))
    assert abs(ground_photon_number(sp, Gauge.FLUX) - 4.0) < 0.05 * 4.0


def test_flux_gauge_bias_breaks_parity():
    spec = HilbertSpec(20)
    P = parity_operator(spec)
    H = build_flux_gauge(CircuitParams(0.5, theta=0.3), spec).matrix
    assert np.max(np.abs(P @ H - H @ P)) > 1e-3


def test_mutual_inductance_routes_agree():
    spec = HilbertSpec(40)
    p = CircuitParams(1.3)
    closed = build_mutual_inductance_charge(p, spec).matrix
    conjugated = build_charge_gauge(p, spec).matrix
    assert np.max(np.abs(closed - conjugated)) < 1e-10


def test_mutual_inductance_matches_flux_spectrum():
    spec = HilbertSpec(120)
    em = eig(build_mutual_inductance_charge(CircuitParams(1.0), spec))
    ef = eig(build_flux_gauge(CircuitParams(1.0), spec))
    assert np.max(np.abs(gaps(em, 6) - gaps(ef, 6)) / np.maximum(gaps(ef, 6), 1)) < 1e-8


def test_mutual_inductance_photon_number_grows():
    spec = HilbertSpec(80)
    values = []
    for eta in (0.25, 0.5, 1.0, 1.5, 2.0):
        sp = diagonalize(build_mutual_inductance_charge(CircuitParams(eta), spec))
        values.append(ground_photon_number(sp, Gauge.FLUX))
    assert np.all(np.diff(values) > 0)


def test_circuit_params_bias():
    p = CircuitParams.from_bias(0.5, epsilon=0.6, delta_tunnel=0.8)
    assert np.isclose(p.omega_0, 1.0)
    assert np.isclose(p.theta, np.arcsin(0.6))
    with pytest.raises(ConfigError):
        CircuitParams(0.5, omega_0=1.0, epsilon=1.5)
    with pytest.raises(ConfigError):
        CircuitParams(0.5, omega_0=1.0, epsilon=0.6, delta_tunnel=0.7)


def test_two_mode_decoupled_readout():
    spec = HilbertSpec(30, 3)
    p = RabiParams(0.7)
    e2 = eig(build_two_mode_coulomb(p, 0.3, 0.0, spec))
    e1 = eig(build_coulomb(p, HilbertSpec(30)))
    product = np.sort((e1[:, None] + 0.3 * np.arange(3)[None, :]).ravel())
    assert np.allclose(e2[:10], product[:10], atol=1e-10)


def test_two_mode_without_usc_mode_is_single_mode_rabi():
    # mode a decouples; mode b then is a Coulomb-gauge Rabi model of its own
    eta_b, omega_b = 0.02, 1.0
    spec = HilbertSpec(4, 12)
    e2 = eig(build_two_mode_coulomb(RabiParams(0.0), omega_b, eta_b, spec))
    eb = eig(build_coulomb(RabiParams(eta_b, omega_0=1.0, omega_c=omega_b), HilbertSpec(12)))
    product = np.sort((eb[:, None] + np.arange(4)[None, :]).ravel())
    assert np.allclose(e2[:8], product[:8], atol=1e-10)
    doublet = e2[1:4] - e2[0]
    assert np.any(np.isclose(doublet, 1 - 0.02, atol=1e-3)) and np.any(np.isclose(doublet, 1 + 0.02, atol=1e-3))


def test_two_mode_reduced_matches_full_to_first_order():
    spec = HilbertSpec(24, 3)
    p = RabiParams(0.5)
    full = eig(build_two_mode_coulomb(p, 0.3, 0.001, spec, form="full"))
    reduced = eig(build_two_mode_coulomb(p, 0.3, 0.001, spec, form="reduced"))
    assert np.max(np.abs(full[:6] - reduced[:6])) < 1e-5


def test_two_mode_warns_on_strong_readout():
    with pytest.warns(UserWarning):
        build_two_mode_coulomb(RabiParams(0.1), 0.3, 0.05, HilbertSpec(6, 2))


def test_two_mode_needs_second_cutoff():
    with pytest.raises(ConfigError):
        build_two_mode_coulomb(RabiParams(0.1), 0.3, 0.001, HilbertSpec(6))


@pytest.mark.parametrize(
    "H",
    [
        lambda s: build_coulomb(RabiParams(0.9), s),
        lambda s: build_dipole(RabiParams(0.9), s),
        lambda s: build_flux_gauge(CircuitParams(0.9), s),
        lambda s: build_charge_gauge(CircuitParams(0.9), s),
    ],
)
def test_parity_symmetry(H):
    spec = HilbertSpec(30)
    P = parity_operator(spec)
    M = H(spec).matrix
    assert np.max(np.abs(P @ M - M @ P)) < 1e-10


def test_ground_energy_quadratic_onset():
    spec = HilbertSpec(20)
    h = 1e-4
    e0 = eig(build_coulomb(RabiParams(0.0), spec))[0]
    eh = eig(build_coulomb(RabiParams(h), spec))[0]
    assert abs((eh - e0) / h) < 10 * h


def test_transport_between_families_rejected():
    spec = HilbertSpec(6)
    with pytest.raises(ConfigError):
        transport(np.eye(spec.dim), Gauge.COULOMB, Gauge.FLUX, RabiParams(0.1), spec)
