"""Closed-form spectra of four integrable central-potential models.

Implements the classical Hamiltonians H0(J) in action variables, their
quantized counterparts E0(n), classical / semiclassical / quantum frequency
ladders, and degeneracy / resonance diagnostics.  All frequencies are
angular; quantum frequencies are always computed as energy differences
divided by hbar, and semiclassical ones as derivatives of E/hbar, never
from displayed prefactors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError

TWO_PI = 2.0 * math.pi

MODEL_KINDS = ("isotropic_harmonic", "anharmonic", "coulomb", "coulomb_perturbed")
OSCILLATOR_KINDS = ("isotropic_harmonic", "anharmonic")
COULOMB_KINDS = ("coulomb", "coulomb_perturbed")

_AXES = ("r", "theta", "phi")


@dataclass(frozen=True)
class ModelSpec:
    """One of the four central-potential models plus physical parameters.

    Parameters
    ----------
    kind : str
        One of ``isotropic_harmonic``, ``anharmonic``, ``coulomb``,
        ``coulomb_perturbed``.
    m, omega, c, k, beta, hbar : float
        Mass, oscillator angular frequency, quartic anharmonicity
        (units 1/length^2), Coulomb strength (energy*length), inverse-square
        correction (energy*length^2), Planck constant.  Defaults give the
        hbar = m = 1 unit system.
    dimension : int
        1, 2 or 3; absent axes carry action / quantum number 0.
    """

    kind: str
    m: float = 1.0
    omega: float = 1.0
    c: float = 0.0
    k: float = 1.0
    beta: float = 0.0
    hbar: float = 1.0
    dimension: int = 3

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.m <= 0 or self.hbar <= 0:
            raise DomainError("mass and hbar must be positive")
        if self.dimension not in (1, 2, 3):
            raise DomainError("dimension must be 1, 2 or 3")
        if self.kind in OSCILLATOR_KINDS and self.omega <= 0:
            raise DomainError("oscillator models need omega > 0")
        if self.kind == "anharmonic" and self.c < 0:
            raise DomainError("anharmonicity c must be >= 0")
        if self.kind in COULOMB_KINDS and self.k <= 0:
            raise DomainError("coulomb strength k must be positive")
        if self.kind == "coulomb_perturbed" and self.beta < 0:
            raise DomainError("beta must be >= 0")

    @property
    def axes(self):
        return _AXES[: self.dimension]

    def potential(self, r):
        """Central potential V(r); ``r`` may be an array."""
        if self.kind == "isotropic_harmonic":
            return 0.5 * self.m * self.omega**2 * r**2
        if self.kind == "anharmonic":
            return 0.5 * self.m * self.omega**2 * (r**2 + self.c * r**4)
        if self.kind == "coulomb":
            return -self.k / r
        return -(self.k / r + self.beta / r**2)


@dataclass(frozen=True)
class QuantumNumbers:
    """Action-variable quantum numbers (n_r, n_theta, n_phi)."""

    n_r: int
    n_theta: int = 0
    n_phi: int = 0

    def __post_init__(self):
        for v in (self.n_r, self.n_theta, self.n_phi):
            if v < 0 or v != int(v):
                raise DomainError("quantum numbers must be non-negative integers")

    @property
    def l(self):
        return self.n_theta + self.n_phi

    @property
    def n(self):
        return self.n_r + self.n_theta + self.n_phi

    def astuple(self):
        return (self.n_r, self.n_theta, self.n_phi)


@dataclass(frozen=True)
class ClassicalActions:
    """Action variables (J_r, J_theta, J_phi), each >= 0."""

    j_r: float
    j_theta: float = 0.0
    j_phi: float = 0.0

    def __post_init__(self):
        if min(self.j_r, self.j_theta, self.j_phi) < 0:
            raise DomainError("actions must be non-negative")

    def astuple(self):
        return (self.j_r, self.j_theta, self.j_phi)


def _check_axes_qn(model, qn):
    if model.dimension < 3 and qn.n_phi != 0:
        raise DomainError("n_phi must be 0 for dimension < 3")
    if model.dimension < 2 and qn.n_theta != 0:
        raise DomainError("n_theta must be 0 for dimension < 2")


def _check_axes_actions(model, j):
    if model.dimension < 3 and j.j_phi != 0:
        raise DomainError("J_phi must be 0 for dimension < 3")
    if model.dimension < 2 and j.j_theta != 0:
        raise DomainError("J_theta must be 0 for dimension < 2")


# ---------------------------------------------------------------------------
# classical energies H0(J)
# ---------------------------------------------------------------------------

def _energy_classical_raw(model, jr, jt, jp):
    """H0(J) without sign/axis validation (used for finite differences)."""
    m, w, c, k, beta = model.m, model.omega, model.c, model.k, model.beta
    if model.kind == "isotropic_harmonic":
        return (w / TWO_PI) * (2.0 * jr + jt + jp)
    if model.kind == "anharmonic":
        if c == 0.0:
            return (w / TWO_PI) * (2.0 * jr + jt + jp)
        a_sum = 2.0 * jr + jt + jp
        b_sum = jt + jp
        arg = (1.0
               - 3.0 * c * a_sum / (TWO_PI * m * w)
               + 3.0 * c**2 * b_sum**2 / (16.0 * math.pi**2 * m**2 * w**2))
        if arg <= 0.0:
            raise DomainError(
                f"anharmonic square-root argument {arg:.6g} <= 0 "
                f"(actions too large for c={c})")
        return (2.0 * m * w**2 / (3.0 * c)) * (1.0 - math.sqrt(arg))
    if model.kind == "coulomb":
        s = jr + jt + jp
        if s <= 0.0:
            raise DomainError("total action must be positive for bound Coulomb motion")
        return -2.0 * math.pi**2 * m * k**2 / s**2
    # coulomb_perturbed
    b_sum = jt + jp
    disc = b_sum**2 - 8.0 * math.pi**2 * m * beta
    if disc < 0.0:
        raise DomainError(
            f"(J_theta+J_phi)^2 - 8 pi^2 m beta = {disc:.6g} < 0: "
            "angular action too small for the inverse-square term")
    s = jr + math.sqrt(disc)
    if s <= 0.0:
        raise DomainError("effective total action must be positive")
    return -2.0 * math.pi**2 * m * k**2 / s**2


def energy_classical(model: ModelSpec, j: ClassicalActions) -> float:
    """Classical energy H0(J) of the model's closed form.

    Raises
    ------
    DomainError
        When the bound-motion or square-root precondition fails.
    """
    _check_axes_actions(model, j)
    e = _energy_classical_raw(model, *j.astuple())
    if model.kind in COULOMB_KINDS and e >= 0.0:
        raise DomainError("Coulomb-type motion must have negative energy")
    return e


@dataclass(frozen=True)
class FrequencyResult:
    """Analytic classical frequencies with a central-difference cross-check."""

    analytic: tuple
    numeric: tuple
    max_rel_err: float


def _classical_frequencies_analytic(model, jr, jt, jp):
    m, w, c, k = model.m, model.omega, model.c, model.k
    if model.kind == "isotropic_harmonic" or (model.kind == "anharmonic" and c == 0.0):
        return (2.0 * w, w, w)
    if model.kind == "anharmonic":
        e = _energy_classical_raw(model, jr, jt, jp)
        s = 1.0 - 3.0 * e * c / (2.0 * m * w**2)
        wr = 2.0 * w / s
        wt = w * (1.0 - c * (jt + jp) / (4.0 * math.pi * m * w)) / s
        return (wr, wt, wt)
    e = _energy_classical_raw(model, jr, jt, jp)
    wr = (-2.0 * m * e) ** 1.5 / (m**2 * k)
    if model.kind == "coulomb":
        return (wr, wr, wr)
    b_sum = jt + jp
    root = math.sqrt(b_sum**2 - 8.0 * math.pi**2 * m * model.beta)
    wt = wr * b_sum / root
    return (wr, wt, wt)


def classical_frequencies(model: ModelSpec, j: ClassicalActions,
                          step: float = 1e-7) -> FrequencyResult:
    """Angular classical frequencies omega^c_i = 2 pi dH0/dJ_i.

    Returns both the analytic formulas and a central-difference check of
    the gradient; ``max_rel_err`` is their worst relative disagreement over
    the axes present in the model dimension.
    """
    _check_axes_actions(model, j)
    energy_classical(model, j)  # validate the point itself
    analytic = _classical_frequencies_analytic(model, *j.astuple())
    jvec = list(j.astuple())
    scale = max(max(abs(v) for v in jvec), 1.0)
    h = step * scale
    numeric = []
    for i in range(3):
        lo, hi = list(jvec), list(jvec)
        lo[i] -= h
        hi[i] += h
        try:
            d = (_energy_classical_raw(model, *hi) - _energy_classical_raw(model, *lo)) / (2 * h)
        except DomainError:
            # one-sided second-order stencil when the centred point leaves the domain
            p1, p2 = list(jvec), list(jvec)
            p1[i] += h
            p2[i] += 2 * h
            f0 = _energy_classical_raw(model, *jvec)
            d = (-3 * f0 + 4 * _energy_classical_raw(model, *p1)
                 - _energy_classical_raw(model, *p2)) / (2 * h)
        numeric.append(TWO_PI * d)
    nax = model.dimension
    rel = max(abs(numeric[i] - analytic[i]) / max(abs(analytic[i]), 1e-300)
              for i in range(nax))
    return FrequencyResult(tuple(analytic), tuple(numeric), rel)


# ---------------------------------------------------------------------------
# quantized energies E0(n)
# ---------------------------------------------------------------------------

def _energy_quantum_real(model, nr, nt, np_, form="exact"):
    """E0 with the quantum numbers relaxed to real values."""
    m, w, c, k, beta, hb = model.m, model.omega, model.c, model.k, model.beta, model.hbar
    l = nt + np_
    if model.kind == "isotropic_harmonic":
        return hb * w * (2.0 * nr + l + 1.5)
    if model.kind == "anharmonic":
        if form == "paper_approx":
            return (hb * w * (2.0 * nr + l + 1.5)
                    - hb**2 / (4.0 * m) * (l + 1.5) * (l - 0.5) * c)
        if c == 0.0:
            return hb * w * (2.0 * nr + l + 1.5)
        arg = (1.0
               - 3.0 * hb * c * (2.0 * nr + l + 1.5) / (m * w)
               + 3.0 * hb**2 * c**2 * (l + 1.5) * (l - 0.5) / (4.0 * m**2 * w**2))
        if arg <= 0.0:
            raise DomainError(
                f"anharmonic square-root argument {arg:.6g} <= 0 at level "
                f"(n_r={nr}, l={l})")
        return (2.0 * m * w**2 / (3.0 * c)) * (1.0 - math.sqrt(arg))
    if model.kind == "coulomb":
        return -m * k**2 / (2.0 * hb**2 * (nr + l + 1.0) ** 2)
    disc = (l + 0.5) ** 2 - 2.0 * m * beta / hb**2
    if disc < 0.0:
        raise DomainError(
            f"(l+1/2)^2 - 2 m beta / hbar^2 = {disc:.6g} < 0: l' is imaginary")
    lp = -0.5 + math.sqrt(disc)
    return -m * k**2 / (2.0 * hb**2 * (nr + lp + 1.0) ** 2)


def energy_quantum(model: ModelSpec, qn: QuantumNumbers,
                   anharmonic_form: str = "exact") -> float:
    """Quantized energy E0(n) of the model's closed form.

    ``anharmonic_form`` selects between the exact anharmonic expression and
    the printed small-c approximation (``paper_approx``); the two disagree
    by a term of order c*(2 n_r + l + 3/2)^2, which the test suite documents.
    """
    if anharmonic_form not in ("exact", "paper_approx"):
        raise DomainError(f"unknown anharmonic form {anharmonic_form!r}")
    _check_axes_qn(model, qn)
    return _energy_quantum_real(model, *qn.astuple(), form=anharmonic_form)


def effective_angular_parameter(model: ModelSpec, l: int) -> float:
    """l' of the perturbed Coulomb model (equals l when beta = 0)."""
    disc = (l + 0.5) ** 2 - 2.0 * model.m * model.beta / model.hbar**2
    if disc < 0.0:
        raise DomainError("l' is imaginary: beta too large for this l")
    return -0.5 + math.sqrt(disc)


def transition_frequency(model: ModelSpec, qn_a: QuantumNumbers,
                         qn_b: QuantumNumbers, anharmonic_form="exact") -> float:
    """Quantum frequency (E0(a) - E0(b)) / hbar; antisymmetric under swap."""
    ea = energy_quantum(model, qn_a, anharmonic_form)
    eb = energy_quantum(model, qn_b, anharmonic_form)
    return (ea - eb) / model.hbar


# ---------------------------------------------------------------------------
# semiclassical frequencies and the series relating them to quantum ones
# ---------------------------------------------------------------------------

_AXIS_INDEX = {"r": 0, "theta": 1, "phi": 2}

# central-difference steps per derivative order, balancing truncation
# against round-off for O(1) energies
_FD_STEPS = {1: 1e-6, 2: 1e-4, 3: 1e-3, 4: 3e-3, 5: 1e-2, 6: 2e-2}

_FD_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
    5: ((-3, -0.5), (-2, 2.0), (-1, -2.5), (1, 2.5), (2, -2.0), (3, 0.5)),
    6: ((-3, 1.0), (-2, -6.0), (-1, 15.0), (0, -20.0), (1, 15.0), (2, -6.0), (3, 1.0)),
}


def _energy_derivative(model, qn, axis, order, form="exact"):
    """d^order E0 / d n_axis^order with n_axis relaxed to a real variable."""
    i = _AXIS_INDEX[axis]
    base = list(qn.astuple())
    if model.kind == "coulomb":
        # analytic: E = -mk^2 / (2 hb^2 (s+1)^2), d^l/ds^l (s+1)^-2
        s = qn.n
        sign = (-1) ** order
        return (-model.m * model.k**2 / (2.0 * model.hbar**2)
                * sign * math.factorial(order + 1) / (s + 1.0) ** (order + 2))
    if model.kind == "isotropic_harmonic" or (model.kind == "anharmonic" and model.c == 0.0
                                              and form == "exact"):
        if order == 1:
            return model.hbar * model.omega * (2.0 if axis == "r" else 1.0)
        return 0.0
    if order not in _FD_STENCILS:
        raise DomainError(f"derivative order {order} not supported")
    h = _FD_STEPS[order]
    acc = 0.0
    for offset, coeff in _FD_STENCILS[order]:
        pt = list(base)
        pt[i] += offset * h
        acc += coeff * _energy_quantum_real(model, *pt, form=form)
    return acc / h**order


@dataclass(frozen=True)
class SemiclassicalFrequency:
    """Semiclassical frequency and the partial-sum residuals of the series
    relating it to the quantum transition frequency."""

    value: float
    residuals: tuple


def semiclassical_frequency(model: ModelSpec, qn: QuantumNumbers, axis: str,
                            order: int = 4) -> SemiclassicalFrequency:
    """Semiclassical frequency (1/hbar) dE0/dn_axis plus relation residuals.

    ``residuals[L-1]`` is ``omega_axis - value - sum_{l=2}^{L} (1/l!)
    d^l E0/dn^l / hbar``; for linear spectra every entry is exactly zero.
    """
    if axis not in model.axes:
        raise DomainError(f"axis {axis!r} not present in dimension {model.dimension}")
    _check_axes_qn(model, qn)
    i = _AXIS_INDEX[axis]
    up = list(qn.astuple())
    up[i] += 1
    omega_q = (energy_quantum(model, QuantumNumbers(*up)) - energy_quantum(model, qn)) / model.hbar
    value = _energy_derivative(model, qn, axis, 1) / model.hbar
    residuals = []
    acc = value
    residuals.append(omega_q - acc)
    for l in range(2, order + 1):
        acc += _energy_derivative(model, qn, axis, l) / (model.hbar * math.factorial(l))
        residuals.append(omega_q - acc)
    return SemiclassicalFrequency(value, tuple(residuals))


# ---------------------------------------------------------------------------
# level enumeration, degeneracy groups and resonance relations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSet:
    """Energy-sorted levels with degeneracy groups.

    ``entries`` is a tuple of (QuantumNumbers, energy) sorted ascending by
    energy with lexicographic (n, n_r, n_theta, n_phi) tie-break;
    ``groups`` partitions entry indices into equal-energy classes.
    """

    entries: tuple
    groups: tuple

    @property
    def energies(self):
        return tuple(e for _, e in self.entries)

    def group_of(self, index):
        for g, members in enumerate(self.groups):
            if index in members:
                return g
        raise IndexError(index)


def degenerate_groups(energies, tol=None):
    """Partition indices of ``energies`` into groups equal within ``tol``.

    Default tolerance is relative 1e-10 scaled by the spectral range.
    Grouping is by transitive adjacency on the sorted values.
    """
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        return ()
    if tol is None:
        span = float(e.max() - e.min())
        tol = 1e-10 * max(span, 1e-300)
    order = np.argsort(e, kind="stable")
    groups = [[int(order[0])]]
    for prev, cur in zip(order[:-1], order[1:]):
        if abs(e[cur] - e[prev]) <= tol:
            groups[-1].append(int(cur))
        else:
            groups.append([int(cur)])
    return tuple(tuple(sorted(g)) for g in groups)


def enumerate_levels(model: ModelSpec, n_max: int, tol=None,
                     anharmonic_form="exact") -> LevelSet:
    """All levels with total quantum number n <= n_max, sorted and grouped."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    dims = model.dimension
    entries = []
    for nr in range(n_max + 1):
        for nt in range(n_max + 1 - nr) if dims >= 2 else (0,):
            for np_ in range(n_max + 1 - nr - nt) if dims >= 3 else (0,):
                qn = QuantumNumbers(nr, nt, np_)
                entries.append((qn, energy_quantum(model, qn, anharmonic_form)))
    entries.sort(key=lambda t: (t[1], t[0].n, t[0].n_r, t[0].n_theta, t[0].n_phi))
    groups = degenerate_groups([e for _, e in entries], tol)
    return LevelSet(tuple(entries), groups)


def find_resonances(freqs, k_max: int, tol: float, cap: int = 10_000_000):
    """Integer vectors l with 1 <= sum|l_i| <= k_max and |l . freqs| < tol.

    Vectors are sign-canonical (first nonzero component positive) and sorted
    by (sum|l|, lexicographic order).  Raises SizeError when the enumeration
    box (2 k_max + 1)^len(freqs) exceeds ``cap``.
    """
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    if tol <= 0:
        raise DomainError("tol must be positive")
    nu = [float(f) for f in freqs]
    n = len(nu)
    box = (2 * k_max + 1) ** n
    if box > cap:
        raise SizeError(f"resonance search space {box} exceeds bound {cap}")
    hits = []
    for l in itertools.product(range(-k_max, k_max + 1), repeat=n):
        norm1 = sum(abs(x) for x in l)
        if norm1 == 0 or norm1 > k_max:
            continue
        lead = next(x for x in l if x != 0)
        if lead < 0:
            continue
        if abs(sum(li * vi for li, vi in zip(l, nu))) < tol:
            hits.append(l)
    hits.sort(key=lambda l: (sum(abs(x) for x in l), l))
    return tuple(hits)


@dataclass(frozen=True)
class ScanReport:
    degeneracy_groups: tuple
    resonances: tuple
    k_max: int
    tol: float


def degeneracy_and_resonance_scan(levels_or_freqs, k_max: int, tol: float,
                                  cap: int = 10_000_000) -> ScanReport:
    """Degeneracy groups plus bounded exhaustive resonance search.

    Accepts either a LevelSet, whose energies are grouped and fed to the
    relation search, or a plain sequence of frequencies.
    """
    if isinstance(levels_or_freqs, LevelSet):
        values = list(levels_or_freqs.energies)
    else:
        values = [float(v) for v in levels_or_freqs]
    groups = degenerate_groups(values, tol)
    resonances = find_resonances(values, k_max, tol, cap)
    return ScanReport(groups, resonances, k_max, tol)
