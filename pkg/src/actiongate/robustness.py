"""KAM-flavored perturbation experiments.

Seeded Hermitian perturbations of the free Hamiltonian, the localization
condition |<n'|n>|^2 > 1/2 for perturbed eigenstates, and gate-fidelity
degradation sweeps under the exact engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import Basis
from .errors import DomainError, SizeError
from .gates import execute_schedule, fidelity

_EIGEN_CAP = 500


@dataclass(frozen=True)
class PerturbationSpec:
    """Seeded random Hermitian perturbation, max-entry-normalized.

    Off-diagonal entries are uniform on the complex unit disc, diagonal
    entries uniform on [-1, 1]; ``banded`` structure zeroes couplings
    beyond ``bandwidth``.  ``strength`` scales the normalized matrix.
    """

    strength: float
    seed: int = 0
    structure: str = "dense"
    bandwidth: int = 1

    def __post_init__(self):
        if self.strength < 0:
            raise DomainError("strength must be >= 0")
        if self.structure not in ("dense", "banded"):
            raise DomainError(f"unknown structure {self.structure!r}")
        if self.structure == "banded" and self.bandwidth < 1:
            raise DomainError("bandwidth must be >= 1")


def perturbation_matrix(spec: PerturbationSpec, n: int) -> np.ndarray:
    """The normalized Hermitian matrix P (before scaling by ``strength``).

    Bitwise deterministic for a fixed (seed, n, structure).
    """
    rng = np.random.default_rng(spec.seed)
    diag = rng.uniform(-1.0, 1.0, n)
    radius = np.sqrt(rng.random((n, n)))
    angle = 2.0 * math.pi * rng.random((n, n))
    z = radius * np.exp(1j * angle)
    p = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, k=1)
    p[iu] = z[iu]
    p = p + p.conj().T + np.diag(diag)
    if spec.structure == "banded":
        idx = np.arange(n)
        p[np.abs(idx[:, None] - idx[None, :]) > spec.bandwidth] = 0.0
    peak = np.max(np.abs(p))
    if peak > 0:
        p = p / peak
    return p


def perturbed_eigensystem(basis: Basis, spec: PerturbationSpec, cap=_EIGEN_CAP):
    """Eigenvalues and eigenvectors of H0 + strength * P.

    Eigenvalues ascend; eigenvector columns are the perturbed states in the
    unperturbed basis.  Residuals ||Hv - wv|| are checked to 1e-8.
    """
    n = basis.dim
    if n > cap:
        raise SizeError(f"basis size {n} exceeds the cap {cap}")
    h = np.diag(np.asarray(basis.energies, dtype=complex))
    h = h + spec.strength * perturbation_matrix(spec, n)
    vals, vecs = np.linalg.eigh(h)
    residual = np.max(np.abs(h @ vecs - vecs * vals[None, :]))
    scale = max(np.max(np.abs(vals)), 1.0)
    if residual > 1e-8 * scale:
        raise DomainError(f"eigenpair residual {residual:.3g} too large")
    return vals, vecs


@dataclass(frozen=True)
class LocalizationEntry:
    level: int
    match: int
    overlap: float
    persists: bool


@dataclass(frozen=True)
class LocalizationReport:
    entries: tuple
    persist_fraction: float
    min_overlap: float


def localization_report(basis: Basis, spec: PerturbationSpec) -> LocalizationReport:
    """Greedy overlap assignment between unperturbed and perturbed states.

    Each unperturbed level n gets the best-matching perturbed eigenstate by
    descending |<n'|n>|^2, each perturbed state assigned at most once;
    ``persists`` records overlap > 1/2 (the localization condition).
    """
    _, vecs = perturbed_eigensystem(basis, spec)
    overlap = np.abs(vecs) ** 2  # overlap[n, n'] = |<n|n'_pert>|^2
    n = basis.dim
    order = np.dstack(np.unravel_index(np.argsort(overlap, axis=None)[::-1],
                                       overlap.shape))[0]
    taken_level = set()
    taken_state = set()
    match = {}
    for i, j in order:
        i, j = int(i), int(j)
        if i in taken_level or j in taken_state:
            continue
        match[i] = j
        taken_level.add(i)
        taken_state.add(j)
        if len(match) == n:
            break
    entries = tuple(LocalizationEntry(i, match[i], float(overlap[i, match[i]]),
                                      bool(overlap[i, match[i]] > 0.5))
                    for i in range(n))
    persist = sum(e.persists for e in entries) / n
    return LocalizationReport(entries, persist,
                              float(min(e.overlap for e in entries)))


def first_order_overlap_estimate(basis: Basis, spec: PerturbationSpec):
    """Perturbation-theory overlaps 1 - eps^2 sum_m |P_mn|^2 / (E_n - E_m)^2."""
    p = perturbation_matrix(spec, basis.dim)
    e = np.asarray(basis.energies)
    est = []
    for n in range(basis.dim):
        acc = 0.0
        for m in range(basis.dim):
            if m == n:
                continue
            acc += abs(p[m, n]) ** 2 / (e[n] - e[m]) ** 2
        est.append(1.0 - spec.strength**2 * acc)
    return np.array(est)


@dataclass(frozen=True)
class SweepPoint:
    epsilon2: float
    fidelity: float
    min_overlap: float
    persist_fraction: float


def fidelity_sweep(basis: Basis, control, schedule, spec: PerturbationSpec,
                   epsilon2_grid, dt=None, target=None):
    """Gate fidelity vs perturbation strength under the exact engine.

    For each epsilon2 the schedule runs with H0 + epsilon2 P added to the
    free Hamiltonian; fidelity is measured against the unperturbed target
    (default: the schedule's idealized rabi-engine unitary) in the
    unperturbed interaction frame.  The perturbation matrix is fixed by the
    seed; only its strength varies along the grid.
    """
    if target is None:
        target = execute_schedule(basis, control, schedule, engine="rabi")
    p = perturbation_matrix(spec, basis.dim)
    points = []
    for eps2 in epsilon2_grid:
        if eps2 < 0:
            raise DomainError("epsilon2 must be >= 0")
        extra = eps2 * p
        u = execute_schedule(basis, control, schedule, engine="exact", dt=dt,
                             static_extra=extra)
        loc = localization_report(
            basis, PerturbationSpec(eps2, spec.seed, spec.structure,
                                    spec.bandwidth))
        points.append(SweepPoint(float(eps2), fidelity(target, u),
                                 loc.min_overlap, loc.persist_fraction))
    return tuple(points)
