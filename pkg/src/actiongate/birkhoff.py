"""Taylor expansion of H0(J) around an invariant torus and its quantization.

The quadratic truncation gives coupled number-operator Hamiltonians; the
Hessian feeds the non-degeneracy determinant, the gradient the
incommensurability diagnostics, and the coupling coefficients two-qubit
phase gates.  Frequencies here are per-radian action derivatives
w^cl_i = dH0/dJ_i (the angular classical frequency divided by 2 pi).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectra import (COULOMB_KINDS, ClassicalActions, ModelSpec, TWO_PI,
                      _energy_classical_raw, energy_classical, find_resonances)


@dataclass(frozen=True)
class TorusPoint:
    """Expansion point J|_o in the interior of the bound-motion domain."""

    actions: ClassicalActions

    def validate(self, model):
        energy_classical(model, self.actions)
        return self


@dataclass(frozen=True)
class ExpansionCoeffs:
    """H0, gradient and Hessian of H0(J) at the expansion point.

    ``gradient`` and ``hessian`` run over the model's active axes only.
    """

    h0: float
    gradient: tuple
    hessian: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hessian, dtype=float)
        if h.shape != (len(self.gradient),) * 2:
            raise DomainError("hessian shape must match the gradient length")
        if h.size and np.max(np.abs(h - h.T)) > 1e-10:
            raise DomainError("hessian must be symmetric within 1e-10")
        h = 0.5 * (h + h.T)
        h.setflags(write=False)
        object.__setattr__(self, "hessian", h)


def _numeric_expansion(model, j0, step=1e-5):
    """Central-difference gradient and Hessian over the active axes."""
    d = model.dimension
    base = list(j0.astuple())
    scale = max(math.sqrt(sum(x * x for x in base)), 1e-3)
    h = step * scale

    def f(pt):
        return _energy_classical_raw(model, *pt)

    grad = []
    for i in range(d):
        hi, lo = list(base), list(base)
        hi[i] += h
        lo[i] -= h
        grad.append((f(hi) - f(lo)) / (2.0 * h))
    hess = np.zeros((d, d))
    f0 = f(base)
    for i in range(d):
        hi, lo = list(base), list(base)
        hi[i] += h
        lo[i] -= h
        hess[i, i] = (f(hi) - 2.0 * f0 + f(lo)) / h**2
        for j in range(i):
            pp, pm, mp_, mm = (list(base) for _ in range(4))
            pp[i] += h; pp[j] += h
            pm[i] += h; pm[j] -= h
            mp_[i] -= h; mp_[j] += h
            mm[i] -= h; mm[j] -= h
            hess[i, j] = hess[j, i] = (f(pp) - f(pm) - f(mp_) + f(mm)) / (4.0 * h**2)
    return tuple(grad), hess


def taylor_expand(model: ModelSpec, point: TorusPoint,
                  step: float = 1e-5) -> ExpansionCoeffs:
    """Quadratic Taylor data of H0(J) at the torus ``point``.

    Harmonic and Coulomb derivatives are analytic; the anharmonic and
    perturbed-Coulomb ones use central differences with relative step
    ``step``.
    """
    point.validate(model)
    d = model.dimension
    j = point.actions.astuple()
    h0 = energy_classical(model, point.actions)
    if model.kind == "isotropic_harmonic" or (model.kind == "anharmonic"
                                              and model.c == 0.0):
        w = model.omega / TWO_PI
        grad = tuple(w * g for g in (2.0, 1.0, 1.0)[:d])
        return ExpansionCoeffs(h0, grad, np.zeros((d, d)))
    if model.kind == "coulomb":
        s = sum(j)
        g = 4.0 * math.pi**2 * model.m * model.k**2 / s**3
        hess = np.full((d, d), -12.0 * math.pi**2 * model.m * model.k**2 / s**4)
        return ExpansionCoeffs(h0, (g,) * d, hess)
    grad, hess = _numeric_expansion(model, point.actions, step)
    return ExpansionCoeffs(h0, grad, hess)


def nondegeneracy_determinant(coeffs: ExpansionCoeffs) -> float:
    """det(d^2 H0 / dJ_i dJ_j); zero flags a degenerate integrable model."""
    if coeffs.hessian.size == 0:
        raise DomainError("empty hessian")
    return float(np.linalg.det(coeffs.hessian))


def incommensurability_check(freqs, k_max: int, tol: float,
                             cap: int = 10_000_000):
    """Integer resonance relations among ``freqs`` up to order ``k_max``.

    Shares the bounded exhaustive search with the spectra module; an empty
    result certifies incommensurability up to the requested order and
    tolerance.
    """
    return find_resonances(freqs, k_max, tol, cap)


@dataclass(frozen=True)
class QuantizedBirkhoff:
    """Quadratic number-operator Hamiltonian from quantizing the expansion.

    DeltaJ_i maps to 2 pi hbar (Delta n_i) under the default
    ``number_operator`` convention, or to 2 pi hbar (Delta n_i + 1/2) under
    ``half_shift``; either way the Hamiltonian is diagonal in the number
    basis with E = H0 + sum c_i d_i + (1/2) sum c_ij d_i d_j.
    """

    h0: float
    linear: tuple
    coupling: np.ndarray
    cutoffs: tuple
    hbar: float
    convention: str

    def displacement(self, dn):
        d = np.asarray(dn, dtype=float)
        if d.shape != (len(self.linear),):
            raise DomainError("mode count mismatch")
        return d + 0.5 if self.convention == "half_shift" else d

    def energy(self, dn) -> float:
        delta = self.displacement(dn)
        return float(self.h0 + np.dot(self.linear, delta)
                     + 0.5 * delta @ self.coupling @ delta)

    def spectrum(self):
        """(dn tuple, energy) over the cutoff grid, sorted by energy then label."""
        grid = itertools.product(*(range(c) for c in self.cutoffs))
        rows = [(dn, self.energy(dn)) for dn in grid]
        rows.sort(key=lambda t: (t[1], t[0]))
        return tuple(rows)


def quantize_truncated(coeffs: ExpansionCoeffs, cutoffs, hbar: float = 1.0,
                       convention: str = "number_operator") -> QuantizedBirkhoff:
    """Bohr-Sommerfeld quantization of the quadratic expansion.

    c_i = 2 pi hbar w^cl_i and c_ij = (2 pi hbar)^2 H0''_ij.
    """
    if convention not in ("number_operator", "half_shift"):
        raise DomainError(f"unknown quantization convention {convention!r}")
    d = len(coeffs.gradient)
    if isinstance(cutoffs, int):
        cutoffs = (cutoffs,) * d
    if len(cutoffs) != d:
        raise DomainError("need one cutoff per mode")
    if any(c < 2 for c in cutoffs):
        raise DomainError("cutoffs must be >= 2 per mode")
    lam = TWO_PI * hbar
    linear = tuple(lam * g for g in coeffs.gradient)
    coupling = lam**2 * coeffs.hessian
    return QuantizedBirkhoff(coeffs.h0, linear, coupling, tuple(cutoffs),
                             hbar, convention)


def order3_remainder_bound(model: ModelSpec, j0: ClassicalActions, delta,
                           samples: int = 64) -> float:
    """Lagrange bound max |d^3/ds^3 H0(J0 + s delta)| / 6 over s in [0, 1].

    Directional third derivatives are sampled by central differences along
    the displacement ray.
    """
    base = np.asarray(j0.astuple())
    dvec = np.zeros(3)
    dvec[: len(delta)] = delta

    def g(s):
        return _energy_classical_raw(model, *(base + s * dvec))

    h = 1e-3
    best = 0.0
    for s in np.linspace(2 * h, 1.0 - 2 * h, samples):
        d3 = (g(s + 2 * h) - 2 * g(s + h) + 2 * g(s - h) - g(s - 2 * h)) / (2 * h**3)
        best = max(best, abs(d3))
    return best / 6.0


def coupling_phase_gate(c_ij: float, t: float, hbar: float = 1.0) -> np.ndarray:
    """Two-mode phase gate diag(1, 1, 1, e^{-i c_ij t / hbar}).

    Restricting two modes to Delta n in {0, 1}, only |11> acquires a phase;
    at c_ij t / hbar = pi this is CZ.
    """
    theta = c_ij * t / hbar
    return np.diag([1.0, 1.0, 1.0, np.exp(-1j * theta)]).astype(complex)
