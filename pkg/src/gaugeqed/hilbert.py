"""Qubit (x) truncated-boson composite space and its canonical operators.

Ordering is fixed globally: the qubit is the slow index, then mode a, then
(optionally) mode b. The qubit basis is (|e>, |g>), so sigma_z = diag(1, -1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, TruncationError
from .linalg import kron

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
S_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
S_MINUS = S_PLUS.T.copy()
I2 = np.eye(2, dtype=complex)

EXCITED = np.array([1, 0], dtype=complex)
GROUND = np.array([0, 1], dtype=complex)


@dataclass(frozen=True)
class HilbertSpec:
    n_fock: int
    n_fock_b: int | None = None

    def __post_init__(self):
        if int(self.n_fock) != self.n_fock or self.n_fock < 2:
            raise ConfigError(f"n_fock must be an integer >= 2, got {self.n_fock}")
        if self.n_fock_b is not None and (int(self.n_fock_b) != self.n_fock_b or self.n_fock_b < 2):
            raise ConfigError(f"n_fock_b must be an integer >= 2, got {self.n_fock_b}")

    @property
    def boson_dim(self) -> int:
        return self.n_fock * (self.n_fock_b or 1)

    @property
    def dim(self) -> int:
        return 2 * self.boson_dim


@dataclass(frozen=True)
class CanonicalOperators:
    spec: HilbertSpec
    a: np.ndarray
    a_dag: np.ndarray
    x: np.ndarray
    p: np.ndarray
    n: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    identity: np.ndarray
    b: np.ndarray | None = None
    b_dag: np.ndarray | None = None
    x_b: np.ndarray | None = None
    n_b: np.ndarray | None = None


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def number(n: int) -> np.ndarray:
    return np.diag(np.arange(n, dtype=float)).astype(complex)


def default_cutoff(eta: float) -> int:
    """Fock cutoff with headroom for coherent amplitudes of order eta."""
    return max(24, math.ceil(4 * eta**2 + 6 * eta + 12))


@lru_cache(maxsize=64)
def build_space(spec: HilbertSpec) -> CanonicalOperators:
    """Lifted operators for ``spec``; cached, so the arrays are read-only."""
    na = spec.n_fock
    ib = np.eye(spec.n_fock_b, dtype=complex) if spec.n_fock_b else np.eye(1, dtype=complex)
    ia = np.eye(na, dtype=complex)

    def on_a(op):
        return kron(I2, op, ib)

    def on_q(op):
        return kron(op, ia, ib)

    a = annihilation(na)
    ops = dict(
        a=on_a(a),
        a_dag=on_a(a.conj().T),
        x=on_a(a + a.conj().T),
        p=on_a(1j * (a - a.conj().T)),
        n=on_a(number(na)),
        sx=on_q(SX),
        sy=on_q(SY),
        sz=on_q(SZ),
        s_plus=on_q(S_PLUS),
        s_minus=on_q(S_MINUS),
        identity=np.eye(spec.dim, dtype=complex),
    )
    if spec.n_fock_b:
        b = annihilation(spec.n_fock_b)
        ops.update(
            b=kron(I2, ia, b),
            b_dag=kron(I2, ia, b.conj().T),
            x_b=kron(I2, ia, b + b.conj().T),
            n_b=kron(I2, ia, number(spec.n_fock_b)),
        )
    for arr in ops.values():
        arr.flags.writeable = False
    return CanonicalOperators(spec=spec, **ops)


def fock_state(n: int, n_fock: int) -> np.ndarray:
    v = np.zeros(n_fock, dtype=complex)
    v[n] = 1.0
    return v


def product_state(qubit: np.ndarray, boson: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(qubit, dtype=complex), np.asarray(boson, dtype=complex))


def basis_state(qubit: str, n: int, spec: HilbertSpec) -> np.ndarray:
    """Bare product state |qubit, n> with qubit in {'e', 'g'}."""
    q = {"e": EXCITED, "g": GROUND}[qubit]
    return product_state(q, fock_state(n, spec.n_fock))


def coherent_state(alpha: complex, spec: HilbertSpec) -> np.ndarray:
    """Normalized coherent state of mode a, truncated to ``spec.n_fock`` levels."""
    if abs(alpha) ** 2 > spec.n_fock / 4:
        raise TruncationError(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds n_fock/4 = {spec.n_fock / 4:.3g}"
        )
    c = np.empty(spec.n_fock, dtype=complex)
    c[0] = 1.0
    for k in range(1, spec.n_fock):
        c[k] = c[k - 1] * alpha / np.sqrt(k)
    return c / np.linalg.norm(c)


def parity_operator(spec: HilbertSpec) -> np.ndarray:
    """sigma_z exp(i pi a^dag a); commutes with every theta = 0 Hamiltonian."""
    signs = (-1.0) ** np.arange(spec.n_fock)
    ib = np.eye(spec.n_fock_b or 1)
    return kron(SZ, np.diag(signs).astype(complex), ib)
