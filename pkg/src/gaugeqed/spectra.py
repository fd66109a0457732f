"""Cutoff-converged diagonalization and dressed-state labels.

Labels are strings: ``"0"`` for the dressed ground state, ``"1-"``, ``"1+"``,
``"2-"`` ... for the doublets that continue the Jaynes-Cummings manifolds,
and ``"unassigned"`` where continuation could not decide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .hamiltonians import Builder, GaugeHamiltonian, Params, with_eta
from .hilbert import HilbertSpec, build_space, default_cutoff
from .linalg import fix_phases, hermitian_eig

UNASSIGNED = "unassigned"
DEGENERACY_TOL = 1e-10
CUTOFF_CAP = 512
LABEL_START_ETA = 1e-3
LABEL_STEP = 0.02
AMBIGUITY_MARGIN = 0.05


@dataclass
class Spectrum:
    energies: np.ndarray
    states: np.ndarray
    hamiltonian: GaugeHamiltonian
    converged_levels: int
    labels: list[str] | None = None
    builder: Builder | None = field(default=None, repr=False)

    @property
    def gauge(self):
        return self.hamiltonian.gauge

    @property
    def params(self):
        return self.hamiltonian.params

    @property
    def spec(self) -> HilbertSpec:
        return self.hamiltonian.spec

    def index(self, level: int | str) -> int:
        """Resolve a label or integer level and check it lies in the converged range."""
        if isinstance(level, str):
            if not self.labels or level not in self.labels:
                raise KeyError(f"label {level!r} not present in spectrum")
            idx = self.labels.index(level)
        else:
            idx = int(level)
        if not 0 <= idx < self.converged_levels:
            raise ConvergenceError(f"level {idx} is outside the {self.converged_levels} converged levels")
        return idx

    def state(self, level: int | str) -> np.ndarray:
        return self.states[:, self.index(level)]

    def gaps(self) -> np.ndarray:
        return self.energies[: self.converged_levels] - self.energies[0]


def _tiebreak_clusters(w: np.ndarray, V: np.ndarray, perturbation: np.ndarray | None):
    """Resolve exactly degenerate clusters by diagonalizing ``perturbation`` inside them."""
    if perturbation is None:
        return V
    V = V.copy()
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            block = V[:, start:stop]
            sub = block.conj().T @ perturbation @ block
            _, U = np.linalg.eigh(0.5 * (sub + sub.conj().T))
            V[:, start:stop] = block @ U
        start = stop
    return fix_phases(V)


def diagonalize(H: GaugeHamiltonian, builder: Builder | None = None, n_levels: int | None = None) -> Spectrum:
    """Full diagonalization of a single Hamiltonian.

    When a builder is given, degenerate clusters are resolved by the first-order
    response to an infinitesimal increase of eta, i.e. the eta -> 0+ limit.
    """
    w, V = hermitian_eig(H.matrix)
    if builder is not None and np.any(np.diff(w) < DEGENERACY_TOL):
        d_eta = 1e-7
        dH = builder(with_eta(H.params, H.params.eta + d_eta), H.spec).matrix - H.matrix
        V = _tiebreak_clusters(w, V, dH)
    return Spectrum(
        energies=w,
        states=V,
        hamiltonian=H,
        converged_levels=n_levels if n_levels is not None else len(w),
        builder=builder,
    )


def _gaps_agree(a: np.ndarray, b: np.ndarray, rtol: float) -> tuple[bool, float]:
    da, db = a - a[0], b - b[0]
    scale = np.maximum(np.maximum(np.abs(da), np.abs(db)), 1.0)
    err = float(np.max(np.abs(da - db) / scale))
    return err < rtol, err


def diagonalize_converged(
    builder: Builder,
    params: Params,
    n_levels: int,
    n_fock: int | None = None,
    rtol: float = 1e-8,
    cap: int = CUTOFF_CAP,
) -> Spectrum:
    """Diagonalize with the cutoff doubled until the lowest gaps are stable.

    The returned spectrum is the coarser of the two cutoffs that agreed.
    """
    if n_levels < 2:
        raise PreconditionError("n_levels must be at least 2")
    n = n_fock or default_cutoff(params.eta)
    n = max(n, math.ceil(n_levels / 2) + 2)
    coarse = diagonalize(builder(params, HilbertSpec(n)), builder, n_levels)
    last = None
    while 2 * n <= cap:
        fine = diagonalize(builder(params, HilbertSpec(2 * n)), builder, n_levels)
        ok, err = _gaps_agree(coarse.energies[:n_levels], fine.energies[:n_levels], rtol)
        if ok:
            return coarse
        last = (coarse.gaps(), fine.gaps(), err)
        n *= 2
        coarse = fine
    raise ConvergenceError(
        f"lowest {n_levels} gaps not stable to {rtol} below cutoff {cap}; "
        f"last estimates {last[0] if last else None} vs {last[1] if last else None}"
    )


def _manifold_labels(spectrum: Spectrum) -> list[str]:
    """Labels from the bare excitation number, valid for vanishing coupling."""
    ops = build_space(spectrum.spec)
    excitations = ops.n + ops.s_plus @ ops.s_minus
    V = spectrum.states
    n_exc = np.real(np.einsum("ij,ij->j", V.conj(), excitations @ V))
    manifold = np.rint(n_exc).astype(int)
    labels = [UNASSIGNED] * V.shape[1]
    groups: dict[int, list[int]] = {}
    for k, (m, val) in enumerate(zip(manifold, n_exc)):
        if abs(val - m) < 0.25:
            groups.setdefault(m, []).append(k)
    for m, members in groups.items():
        if m == 0 and len(members) == 1:
            labels[members[0]] = "0"
        elif m > 0 and len(members) == 2:
            lo, hi = sorted(members)
            labels[lo], labels[hi] = f"{m}-", f"{m}+"
    return labels


def _step_path(start: float, targets: Sequence[float], step: float) -> list[float]:
    path = [start]
    for t in targets:
        n = max(1, math.ceil((t - path[-1]) / step - 1e-12))
        path.extend(np.linspace(path[-1], t, n + 1)[1:].tolist())
    return path


class _Tracker:
    """Maximal-overlap continuation of labeled eigenvectors along eta."""

    def __init__(self, builder: Builder, params: Params, spec: HilbertSpec, n_track: int):
        self.builder = builder
        self.params = params
        self.spec = spec
        self.n_track = n_track
        self.eta = None
        self.labels: list[str] = []
        self.vectors: np.ndarray | None = None

    def _spectrum(self, eta: float) -> Spectrum:
        return diagonalize(self.builder(with_eta(self.params, eta), self.spec), self.builder)

    def start(self, eta: float) -> Spectrum:
        sp = self._spectrum(eta)
        labels = _manifold_labels(sp)
        keep = [k for k in range(min(self.n_track, len(labels))) if labels[k] != UNASSIGNED]
        self.eta = eta
        self.labels = [labels[k] for k in keep]
        self.vectors = sp.states[:, keep]
        return sp

    def _match(self, sp: Spectrum):
        S = np.abs(sp.states.conj().T @ self.vectors) ** 2
        order = np.argsort(-S, axis=0)
        best = order[0]
        top = S[best, np.arange(S.shape[1])]
        second = S[order[1], np.arange(S.shape[1])] if S.shape[0] > 1 else np.zeros_like(top)
        ambiguous = (top - second) < AMBIGUITY_MARGIN
        if len(set(best.tolist())) != len(best):
            counts = np.bincount(best, minlength=S.shape[0])
            ambiguous |= counts[best] > 1
        return best, ambiguous

    def advance(self, eta: float, depth: int = 0, max_depth: int = 8) -> Spectrum:
        sp = self._spectrum(eta)
        best, ambiguous = self._match(sp)
        if np.any(ambiguous) and depth < max_depth:
            mid = 0.5 * (self.eta + eta)
            self.advance(mid, depth + 1, max_depth)
            sp = self._spectrum(eta)
            best, ambiguous = self._match(sp)
            if np.any(ambiguous):
                return self.advance(eta, max_depth, max_depth)
        keep = ~ambiguous
        self.labels = [lab for lab, k in zip(self.labels, keep) if k]
        self.vectors = sp.states[:, best[keep]]
        self.eta = eta
        return sp

    def assign(self, sp: Spectrum) -> list[str]:
        labels = [UNASSIGNED] * sp.converged_levels
        S = np.abs(sp.states.conj().T @ self.vectors) ** 2
        for col, lab in enumerate(self.labels):
            k = int(np.argmax(S[:, col]))
            if S[k, col] > 0.99 and k < sp.converged_levels and labels[k] == UNASSIGNED:
                labels[k] = lab
        return labels


def label_sweep(
    builder: Builder,
    params: Params,
    etas: Sequence[float],
    n_levels: int = 8,
    n_fock: int | None = None,
    step: float = LABEL_STEP,
) -> list[Spectrum]:
    """Labeled spectra on an eta grid from one continuation pass.

    The cutoff is validated at the largest eta and then held fixed.
    """
    etas = [float(e) for e in etas]
    if not etas:
        return []
    top = max(etas)
    if n_fock is None:
        n_fock = diagonalize_converged(builder, with_eta(params, top), n_levels).spec.n_fock
    spec = HilbertSpec(n_fock)
    tracker = _Tracker(builder, params, spec, n_track=2 * n_levels + 2)
    results: dict[float, Spectrum] = {}
    for eta in sorted(set(e for e in etas if e < LABEL_START_ETA)):
        sp = diagonalize(builder(with_eta(params, eta), spec), builder, n_levels)
        sp.labels = _manifold_labels(sp)[:n_levels]
        results[eta] = sp
    upper = sorted(set(e for e in etas if e >= LABEL_START_ETA))
    if upper:
        tracker.start(LABEL_START_ETA)
        targets = set(upper)
        for eta in _step_path(LABEL_START_ETA, upper, step)[1:]:
            sp = tracker.advance(eta)
            hit = next((t for t in targets if math.isclose(t, eta, rel_tol=0, abs_tol=1e-12)), None)
            if hit is not None:
                sp = diagonalize(builder(with_eta(params, hit), spec), builder, n_levels)
                sp.labels = tracker.assign(sp)
                results[hit] = sp
        if LABEL_START_ETA in targets and LABEL_START_ETA not in results:
            sp = diagonalize(builder(with_eta(params, LABEL_START_ETA), spec), builder, n_levels)
            sp.labels = _manifold_labels(sp)[:n_levels]
            results[LABEL_START_ETA] = sp
    return [results[e] for e in etas]


def label_states(spectrum: Spectrum, builder: Builder | None = None, step: float = LABEL_STEP) -> Spectrum:
    """Attach continuation labels to ``spectrum`` (returned for chaining)."""
    builder = builder or spectrum.builder
    if builder is None:
        raise PreconditionError("labeling needs the Hamiltonian builder")
    n_levels = spectrum.converged_levels
    (labeled,) = label_sweep(builder, spectrum.params, [spectrum.params.eta], n_levels,
                             n_fock=spectrum.spec.n_fock, step=step)
    S = np.abs(labeled.states[:, :n_levels].conj().T @ spectrum.states[:, :n_levels]) ** 2
    labels = [UNASSIGNED] * n_levels
    for j in range(n_levels):
        k = int(np.argmax(S[:, j]))
        if S[k, j] > 0.99:
            labels[j] = labeled.labels[k]
    spectrum.labels = labels
    spectrum.builder = builder
    return spectrum


def converged_labeled(builder: Builder, params: Params, n_levels: int = 8, n_fock: int | None = None) -> Spectrum:
    """Convenience: converged spectrum with continuation labels."""
    return label_states(diagonalize_converged(builder, params, n_levels, n_fock=n_fock), builder)
