"""Dense Hermitian linear algebra on small composite spaces."""
from __future__ import annotations

from functools import reduce
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import NumericalError, PreconditionError

HERMITIAN_TOL = 1e-12
PHASE_TOL = 1e-8


def hermiticity_defect(M: np.ndarray) -> float:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {M.shape}")
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def require_hermitian(M: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    defect = hermiticity_defect(M)
    if defect >= tol:
        raise PreconditionError(f"matrix is not Hermitian (max |M - M^H| = {defect:.3e})")


def fix_phases(V: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    """Rotate each column so its first entry with magnitude above ``tol`` is real positive."""
    V = np.array(V, dtype=complex, copy=True)
    if V.size == 0:
        return V
    significant = np.abs(V) > tol
    first = np.argmax(significant, axis=0)
    cols = np.arange(V.shape[1])
    pivot = V[first, cols]
    settled = ~significant[first, cols] | ((pivot.imag == 0) & (pivot.real > 0))
    phase = np.where(settled, 1.0, np.conj(pivot) / np.where(settled, 1.0, np.abs(pivot)))
    V *= phase
    V[first, cols] = np.abs(V[first, cols])
    return V


def _eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # MRRR driver: noticeably faster than the LAPACK default at these sizes
    return scipy.linalg.eigh(M, driver="evr", check_finite=False)


def hermitian_eig(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending eigenvalues and a unitary matrix whose columns are the
    phase-fixed eigenvectors.
    """
    M = np.asarray(M, dtype=complex)
    require_hermitian(M)
    try:
        w, V = _eigh(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    V = fix_phases(V)
    dim = M.shape[0]
    residual = float(np.max(np.linalg.norm(M @ V - V * w, axis=0))) if dim else 0.0
    if residual >= 1e-10 * max(dim, 1) * max(1.0, float(np.max(np.abs(w), initial=0.0))):
        raise NumericalError(f"eigen-residual {residual:.3e} too large for dimension {dim}")
    return w, V


def matrix_function(M: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    M = np.asarray(M, dtype=complex)
    require_hermitian(M)
    w, V = _eigh(M)
    return (V * f(w)) @ V.conj().T


def kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def partial_trace_boson(rho: np.ndarray, n_qubit: int = 2) -> np.ndarray:
    """Trace out everything after the leading qubit index."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape[1] != dim or dim % n_qubit:
        raise PreconditionError(f"shape {rho.shape} is not a qubit-boson operator")
    n_rest = dim // n_qubit
    return np.einsum("iaja->ij", rho.reshape(n_qubit, n_rest, n_qubit, n_rest))


def reduced_qubit_state(psi: np.ndarray, n_qubit: int = 2) -> np.ndarray:
    """Qubit density matrix of a pure composite state (no full outer product needed)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.size % n_qubit:
        raise PreconditionError(f"state length {psi.size} is not divisible by {n_qubit}")
    m = psi.reshape(n_qubit, -1)
    return m @ m.conj().T


def von_neumann_entropy(rho: np.ndarray, base: float = 2.0) -> float:
    p = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)) / np.log(base))


def expectation(psi: np.ndarray, O: np.ndarray) -> float:
    """Real part of <psi|O|psi>."""
    return float(np.real(np.vdot(psi, O @ psi)))
