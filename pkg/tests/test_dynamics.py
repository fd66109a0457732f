import math

import numpy as np
import pytest

from gaugeqed.dynamics import SwitchProtocol, emission_signal, hamiltonian_at, propagate, sudden_switch_limit
from gaugeqed.errors import ConfigError
from gaugeqed.hamiltonians import RabiParams, build_coulomb, build_dipole, build_gauge_T
from gaugeqed.hilbert import HilbertSpec, basis_state, build_space
from gaugeqed.spectra import diagonalize

SPEC = HilbertSpec(40)
P08 = RabiParams(0.8)
PERIOD = 2 * math.pi


@pytest.fixture(scope="module")
def grounds():
    return (
        diagonalize(build_coulomb(P08, SPEC)).states[:, 0],
        diagonalize(build_dipole(P08, SPEC)).states[:, 0],
    )


@pytest.mark.parametrize("shape", ["linear", "raised_cosine"])
def test_protocol_closed_forms(shape):
    T = 0.3
    prot = SwitchProtocol.switch_off(1.0, T, 2.0, shape)
    assert prot.lam(0.5) == 1 and prot.lam(1.5) == 0
    assert prot.lam_dot(0.5) == 0 and prot.lam_dot(1.5) == 0
    edges = np.linspace(1.0, 1.0 + T, 20001)
    mids = 0.5 * (edges[1:] + edges[:-1])
    integral = np.sum([prot.lam_dot(t) for t in mids]) * (T / 20000)
    ts = edges
    assert abs(integral + 1) < 1e-6
    assert all(0 <= prot.lam(t) <= 1 for t in ts)


def test_protocol_validation():
    with pytest.raises(ConfigError):
        SwitchProtocol(((1.0, "off"), (1.05, "on")), 0.1, 2.0)
    with pytest.raises(ConfigError):
        SwitchProtocol.switch_off(1.0, 0.1, 1.05)
    with pytest.raises(ConfigError):
        SwitchProtocol.switch_off(1.0, 0.1, 2.0, shape="square")


def test_hamiltonian_static_limits():
    prot = SwitchProtocol.switch_off(1.0, 0.1, 2.0)
    H_before = hamiltonian_at(0.2, "dipole", P08, prot, SPEC).matrix
    assert np.allclose(H_before, build_dipole(P08, SPEC).matrix)
    ops = build_space(SPEC)
    H_after = hamiltonian_at(1.5, "dipole", P08, prot, SPEC).matrix
    assert np.array_equal(H_after, ops.n + 0.5 * ops.sz)
    H_after_c = hamiltonian_at(1.5, "coulomb", P08, prot, SPEC).matrix
    assert np.array_equal(H_after_c, ops.n + 0.5 * ops.sz)


def test_switch_term_magnitude_linear_ramp():
    T = 1e-3
    prot = SwitchProtocol.switch_off(0.0, T, 1.0, "linear")
    ops = build_space(SPEC)
    mid = 0.5 * T
    H = hamiltonian_at(mid, "dipole", P08, prot, SPEC).matrix
    H_naive = hamiltonian_at(mid, "dipole", P08, prot, SPEC, switch_term=False).matrix
    term = H - H_naive
    expected = (1 / T) * (-P08.eta) * ops.sx @ ops.x  # -lambda_dot F with lambda_dot = -1/T
    assert np.allclose(term, expected)
    assert np.linalg.norm(term, 2) > 10 * np.linalg.norm(H_naive, 2)


def test_stationary_state_only_gains_phase(grounds):
    psi = grounds[1]
    res = propagate(psi, "dipole", P08, SwitchProtocol.constant(1.0, 5.0), SPEC)
    assert np.ptp(res.photon_number) < 1e-9 and np.ptp(res.qubit_population) < 1e-9
    assert abs(abs(np.vdot(psi, res.states[-1])) - 1) < 1e-9


def test_off_switch_reaches_coulomb_ground(grounds):
    g_c, g_d = grounds
    T = 1e-3 * PERIOD
    res = propagate(g_d, "dipole", P08, SwitchProtocol.switch_off(0.0, T, T), SPEC)
    assert 1 - abs(np.vdot(g_c, res.states[-1])) ** 2 < 1e-4
    assert max(abs(np.linalg.norm(s) - 1) for s in res.states) < 1e-8


def test_frozen_photon_number_and_emission(grounds):
    g_c, _ = grounds
    T = 1e-3 * PERIOD
    res = propagate(g_c, "coulomb", P08, SwitchProtocol.switch_off(0.5, T, 0.5 + T + 3.0), SPEC)
    after = res.times >= 0.5 + T
    assert np.ptp(res.photon_number[after]) < 1e-9
    n0 = np.real(np.vdot(g_c, build_space(SPEC).n @ g_c))
    assert abs(res.mean_after(0.5 + T) - n0) < 1e-5
    _, signal = emission_signal(res)
    assert np.all(signal > -1e-10)
    assert abs(res.mean_after(0.5 + T, "emission") - res.mean_after(0.5 + T)) < 1e-10


def test_naive_dipole_keeps_dipole_photons(grounds):
    g_c, g_d = grounds
    T = 1e-3 * PERIOD
    prot = SwitchProtocol.switch_off(0.5, T, 0.5 + T + 2.0)
    naive = propagate(g_d, "dipole", P08, prot, SPEC, switch_term=False)
    ops = build_space(SPEC)
    n_dipole = np.real(np.vdot(g_d, ops.n @ g_d))
    n_coulomb = np.real(np.vdot(g_c, ops.n @ g_c))
    assert abs(naive.mean_after(0.5 + T) / n_dipole - 1) < 0.01
    assert naive.mean_after(0.5 + T) > n_coulomb


def test_no_interaction_no_emission():
    res = propagate(basis_state("g", 0, SPEC), "coulomb", RabiParams(0.0),
                    SwitchProtocol.on_off(0.5, 1.5, 0.05, 3.0), SPEC)
    assert np.max(np.abs(res.emission)) < 1e-20


def test_on_off_gauge_covariance():
    spec = HilbertSpec(30)
    p = RabiParams(0.5)
    T = 1e-3 * PERIOD
    prot = SwitchProtocol.on_off(0.2, 0.2 + T + 1.5, T, 0.2 + 2 * T + 2.5)
    start = basis_state("g", 0, spec)
    rc = propagate(start, "coulomb", p, prot, spec)
    rd = propagate(start, "dipole", p, prot, spec)
    assert np.max(np.abs(rc.photon_number[-5:] - rd.photon_number[-5:])) < 1e-4
    assert np.max(np.abs(rc.qubit_population[-5:] - rd.qubit_population[-5:])) < 1e-4
    # mid-plateau records use transported operators; they agree as well
    t_mid = 0.2 + T + 0.75
    i_c, i_d = np.argmin(abs(rc.times - t_mid)), np.argmin(abs(rd.times - t_mid))
    assert abs(rc.photon_number[i_c] - rd.photon_number[i_d]) < 1e-4
    assert abs(rc.emission[i_c] - rd.emission[i_d]) < 1e-4


def test_sudden_limits(grounds):
    g_c, g_d = grounds
    assert 1 - abs(np.vdot(g_c, sudden_switch_limit(g_d, "dipole", P08, "off", SPEC))) ** 2 < 1e-10
    start = basis_state("g", 0, SPEC)
    T = build_gauge_T(P08, SPEC)
    assert np.allclose(sudden_switch_limit(start, "dipole", P08, "on", SPEC), T @ start)
    assert np.allclose(sudden_switch_limit(start, "coulomb", P08, "on", SPEC), start)
    free = RabiParams(0.0)
    assert np.allclose(sudden_switch_limit(g_d, "dipole", free, "off", SPEC), g_d)


def test_ramp_converges_to_sudden_limit(grounds):
    _, g_d = grounds
    target = sudden_switch_limit(g_d, "dipole", P08, "off", SPEC)
    deficits = []
    for k in (2, 3, 4):
        T = 10.0**-k * PERIOD
        res = propagate(g_d, "dipole", P08, SwitchProtocol.switch_off(0.0, T, T), SPEC)
        deficits.append(1 - abs(np.vdot(target, res.states[-1])) ** 2)
    assert deficits[0] > deficits[1] > deficits[2]
    assert deficits[2] < 1e-6


def test_rejects_circuit_gauge():
    with pytest.raises(ConfigError):
        propagate(basis_state("g", 0, SPEC), "flux", P08, SwitchProtocol.constant(1.0, 1.0), SPEC)
