"""Quick invariant checks runnable from the command line."""
from __future__ import annotations

import math
import sys
from typing import Callable

import numpy as np

from .dynamics import SwitchProtocol, propagate
from .hamiltonians import (
    CircuitParams,
    RabiParams,
    build_charge_gauge,
    build_coulomb,
    build_dipole,
    build_flux_gauge,
)
from .hilbert import HilbertSpec, build_space, parity_operator
from .linalg import hermitian_eig, matrix_function, partial_trace_boson
from .observables import photodetection_W, positive_frequency_part
from .spectra import diagonalize, label_sweep


def _eig_round_trip() -> bool:
    rng = np.random.default_rng(7)
    A = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    H = A + A.conj().T
    w, V = hermitian_eig(H)
    return np.max(np.abs((V * w) @ V.conj().T - H)) < 1e-10 * 64


def _trig_identity() -> bool:
    x = build_space(HilbertSpec(60)).x
    c = matrix_function(1.6 * x, np.cos)
    s = matrix_function(1.6 * x, np.sin)
    return np.max(np.abs(c @ c + s @ s - np.eye(len(x)))) < 1e-10


def _partial_trace() -> bool:
    rng = np.random.default_rng(11)
    psi = rng.normal(size=40) + 1j * rng.normal(size=40)
    psi /= np.linalg.norm(psi)
    rho_q = partial_trace_boson(np.outer(psi, psi.conj()))
    ev = np.linalg.eigvalsh(rho_q)
    return abs(np.trace(rho_q) - 1) < 1e-10 and ev.min() > -1e-10 and ev.max() < 1 + 1e-10


def _gauge_spectra() -> bool:
    spec = HilbertSpec(60)
    p = RabiParams(1.0)
    ec = diagonalize(build_coulomb(p, spec)).energies[:8]
    ed = diagonalize(build_dipole(p, spec)).energies[:8]
    cp = CircuitParams(1.0)
    ef = diagonalize(build_flux_gauge(cp, spec)).energies[:8]
    eq = diagonalize(build_charge_gauge(cp, spec)).energies[:8]
    ok = lambda a, b: np.max(np.abs((a - a[0]) - (b - b[0]))) < 1e-8
    return ok(ec, ed) and ok(ef, eq)


def _parity() -> bool:
    spec = HilbertSpec(40)
    P = parity_operator(spec)
    Hs = [build_coulomb(RabiParams(0.7), spec).matrix, build_dipole(RabiParams(0.7), spec).matrix,
          build_flux_gauge(CircuitParams(0.7), spec).matrix]
    return all(np.max(np.abs(P @ H - H @ P)) < 1e-10 for H in Hs)


def _cross_gauge_rates() -> bool:
    p = RabiParams(0.0)
    (sc,) = label_sweep(build_coulomb, p, [0.5], 6, n_fock=60)
    (sd,) = label_sweep(build_dipole, p, [0.5], 6, n_fock=60)
    pairs = [("1-", "0"), ("1+", "0"), ("2-", "1-"), ("2+", "1+")]
    return all(abs(photodetection_W(sc, j, k) - photodetection_W(sd, j, k)) < 1e-7 for j, k in pairs)


def _emission_sum() -> bool:
    sp = diagonalize(build_coulomb(RabiParams(0.8), HilbertSpec(40)))
    O = build_space(sp.spec).p
    Op = positive_frequency_part(O, sp)
    j = 5
    psi = sp.states[:, j]
    direct = np.real(np.vdot(Op @ psi, Op @ psi))
    brute = sum(abs(np.vdot(sp.states[:, k], O @ psi)) ** 2 for k in range(j)
                if sp.energies[j] - sp.energies[k] > 1e-10)
    return abs(direct - brute) < 1e-10


def _norm_conservation() -> bool:
    spec = HilbertSpec(30)
    p = RabiParams(0.5)
    psi = diagonalize(build_dipole(p, spec)).states[:, 0]
    res = propagate(psi, "dipole", p, SwitchProtocol.switch_off(0.2, 2 * math.pi * 1e-2, 0.6), spec)
    return max(abs(np.linalg.norm(s) - 1) for s in res.states) < 1e-8


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("eigensolver round trip", _eig_round_trip),
    ("cos^2 + sin^2 = 1 by spectral calculus", _trig_identity),
    ("partial trace positivity", _partial_trace),
    ("Coulomb/dipole and flux/charge spectra", _gauge_spectra),
    ("parity symmetry at theta = 0", _parity),
    ("photodetection rate in both gauges", _cross_gauge_rates),
    ("positive-frequency brute-force sum", _emission_sum),
    ("norm conservation through a switch", _norm_conservation),
]


def run(stream=sys.stdout) -> int:
    failures = 0
    for name, check in CHECKS:
        try:
            ok = bool(check())
            detail = ""
        except Exception as exc:  # report and keep going
            ok, detail = False, f" ({type(exc).__name__}: {exc})"
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}{detail}", file=stream)
    print(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed", file=stream)
    return 0 if failures == 0 else 1
