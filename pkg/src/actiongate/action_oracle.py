"""Independent numerical oracles for the closed-form spectra.

Two routes: turning-point quadrature of the radial action integral
J_r = 2 int sqrt(2m(E - V) - L^2/r^2) dr, and a finite-difference
eigensolver for the reduced radial Schroedinger problem.  Both are kept
independent of the closed forms they are used to validate; closed-form
knowledge only ever enters as *bounds* (scan windows, box sizes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .errors import ConvergenceError, DomainError, NoBoundOrbit, QuadratureError
from .spectra import (COULOMB_KINDS, ClassicalActions, ModelSpec, TWO_PI,
                      _energy_classical_raw)


@dataclass(frozen=True)
class OrbitSpec:
    """A classical orbit: energy, total angular momentum and its z component."""

    model: ModelSpec
    energy: float
    l_total: float
    l_z: float

    def __post_init__(self):
        if self.l_total < 0:
            raise DomainError("L must be >= 0")
        if abs(self.l_z) > self.l_total * (1 + 1e-12):
            raise DomainError("|L_z| must not exceed L")
        if self.model.kind in COULOMB_KINDS and self.energy >= 0:
            raise NoBoundOrbit("Coulomb-type orbits must have E < 0")


@dataclass(frozen=True)
class RadialGrid:
    """Grid for the radial eigensolver; spacing is 'uniform' or 'log'."""

    r_min: float
    r_max: float
    n: int
    spacing: str = "uniform"

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise DomainError("need 0 < r_min < r_max")
        if self.n < 3:
            raise DomainError("need at least 3 grid points")
        if self.spacing not in ("uniform", "log"):
            raise DomainError(f"unknown spacing rule {self.spacing!r}")


def _p_r_squared(model, energy, l_total, r):
    return 2.0 * model.m * (energy - model.potential(r)) - l_total**2 / r**2


def _scan_window(model, energy, l_total):
    """Analytic bracket [r_lo, r_hi] guaranteed to contain both turning points."""
    m, k = model.m, model.k
    if model.kind in COULOMB_KINDS:
        # p_r^2 is quadratic in 1/r; Vieta bounds for positive roots
        a_coeff = 2.0 * m * model.beta - l_total**2
        if a_coeff >= 0.0:
            raise NoBoundOrbit(
                "L^2 <= 2 m beta: no inner turning point (fall to the centre)")
        r_hi = k / abs(energy)
        r_lo = (l_total**2 - 2.0 * m * model.beta) / (2.0 * m * k)
        return 0.95 * r_lo, 1.05 * r_hi
    # oscillators: E = V(r_hi) bounded by the harmonic part from below
    if energy <= 0:
        raise NoBoundOrbit("oscillator orbits need E > 0")
    r_hi = math.sqrt(2.0 * energy / (m * model.omega**2))
    if l_total > 0:
        r_lo = l_total / math.sqrt(2.0 * m * energy)
    else:
        raise NoBoundOrbit("L = 0: inner turning point degenerates to the origin")
    return 0.95 * r_lo, 1.05 * r_hi


def _turning_points(model, energy, l_total, scan_points=1000):
    """Locate r- < r+ with p_r^2 > 0 between them; None for a circular orbit."""
    r_lo, r_hi = _scan_window(model, energy, l_total)
    rs = np.geomspace(r_lo, r_hi, scan_points)
    f = _p_r_squared(model, energy, l_total, rs)
    sign_changes = np.nonzero(np.diff(np.sign(f)) != 0)[0]
    if len(sign_changes) >= 2:
        g = lambda r: _p_r_squared(model, energy, l_total, r)
        i0, i1 = sign_changes[0], sign_changes[-1]
        r_minus = brentq(g, rs[i0], rs[i0 + 1], xtol=1e-300, rtol=8.9e-16)
        r_plus = brentq(g, rs[i1], rs[i1 + 1], xtol=1e-300, rtol=8.9e-16)
        return r_minus, r_plus
    fmax = float(f.max())
    scale = float(np.abs(f).max()) or 1.0
    # the coarse grid resolves the maximum of p_r^2 only to O(spacing^2)
    if abs(fmax) <= 1e-5 * scale:
        return None  # circular orbit: the turning points coalesce
    raise NoBoundOrbit(
        f"no classically allowed radial interval found in [{r_lo:.3g}, {r_hi:.3g}]")


@dataclass(frozen=True)
class ActionResult:
    actions: ClassicalActions
    quad_error: float
    nodes: int


def action_integrals(orbit: OrbitSpec, nodes: int = 64, tol: float = 1e-10,
                     max_doublings: int = 8) -> ActionResult:
    """Action variables of the orbit by turning-point quadrature.

    J_phi = 2 pi |L_z| and J_theta = 2 pi (L - |L_z|) are exact closed
    identities for central fields; J_r is computed by Gauss-Legendre
    quadrature after the substitution r = r- + (r+ - r-) sin^2 u, which
    removes the inverse-square-root endpoint singularities.  Nodes are
    doubled until the relative change drops below ``tol``.
    """
    model = orbit.model
    j_phi = TWO_PI * abs(orbit.l_z)
    j_theta = TWO_PI * (orbit.l_total - abs(orbit.l_z))
    tp = _turning_points(model, orbit.energy, orbit.l_total)
    if tp is None:
        return ActionResult(ClassicalActions(0.0, j_theta, j_phi), 0.0, 0)

    r_minus, r_plus = tp
    width = r_plus - r_minus

    def quad(n):
        x, w = roots_legendre(n)
        u = 0.25 * math.pi * (x + 1.0)  # map [-1,1] -> [0, pi/2]
        s = np.sin(u)
        r = r_minus + width * s * s
        f = _p_r_squared(model, orbit.energy, orbit.l_total, r)
        integrand = np.sqrt(np.maximum(f, 0.0)) * 2.0 * width * s * np.cos(u)
        return 2.0 * float(np.dot(w, integrand)) * 0.25 * math.pi

    prev = quad(nodes)
    err = math.inf
    for _ in range(max_doublings):
        nodes *= 2
        cur = quad(nodes)
        err = abs(cur - prev) / max(abs(cur), 1e-300)
        prev = cur
        if err < tol:
            break
    else:
        raise QuadratureError(
            f"J_r quadrature stalled at relative change {err:.3g} > {tol:g}")
    return ActionResult(ClassicalActions(prev, j_theta, j_phi), err, nodes)


def verify_closed_form(model: ModelSpec, orbit: OrbitSpec, **quad_kwargs) -> float:
    """Relative residual |H0(J(orbit)) - E| / |E| of the closed form.

    Orbits are three-dimensional objects; the model's H0(J) is evaluated on
    all three actions regardless of the model's encoding dimension.
    """
    result = action_integrals(orbit, **quad_kwargs)
    e = _energy_classical_raw(model, *result.actions.astuple())
    return abs(e - orbit.energy) / abs(orbit.energy)


def random_orbits(model: ModelSpec, count: int, seed: int = 0):
    """Deterministic sample of ``count`` valid bound orbits for the model.

    Angular momenta and energies are drawn from ranges that keep the motion
    bound and away from the circular limit; candidates without two turning
    points are rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    orbits = []
    attempts = 0
    while len(orbits) < count:
        attempts += 1
        if attempts > 100 * count:
            raise DomainError("orbit sampling kept rejecting candidates")
        if model.kind in COULOMB_KINDS:
            l_floor = math.sqrt(2.0 * model.m * model.beta)
            l_total = rng.uniform(max(0.3, 1.5 * l_floor), 1.2)
            e_circ = -model.m * model.k**2 / (2.0 * l_total**2)
            energy = e_circ * rng.uniform(0.2, 0.85)
        else:
            l_total = rng.uniform(0.2, 1.5)
            energy = model.omega * l_total * (1.0 + rng.uniform(0.1, 1.5))
        l_z = l_total * rng.uniform(-1.0, 1.0)
        try:
            orbit = OrbitSpec(model, energy, l_total, l_z)
            _turning_points(model, energy, l_total)
        except (NoBoundOrbit, DomainError):
            continue
        orbits.append(orbit)
    return tuple(orbits)


# ---------------------------------------------------------------------------
# radial finite-difference eigensolver
# ---------------------------------------------------------------------------

def eigensolve_radial(model: ModelSpec, l: int, grid: RadialGrid, count: int):
    """Lowest ``count`` eigenvalues of the reduced radial problem.

    Solves -(hbar^2/2m) u'' + [V(r) + hbar^2 l(l+1)/(2 m r^2)] u = E u with
    Dirichlet walls at the grid ends via a symmetric tridiagonal matrix.
    The log spacing rule maps x = ln r, u = sqrt(r) w, and rescales the
    generalized problem back to a standard tridiagonal one; it requires a
    moderate r_min (conditioning degrades like 1/r_min^2).
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if l < 0:
        raise DomainError("l must be >= 0")
    m, hb = model.m, model.hbar
    n = grid.n
    if count > n:
        raise DomainError("grid too small for the requested number of states")
    if grid.spacing == "uniform":
        h = (grid.r_max - grid.r_min) / (n + 1)
        r = grid.r_min + h * np.arange(1, n + 1)
        v = model.potential(r) + hb**2 * l * (l + 1) / (2.0 * m * r**2)
        diag = hb**2 / (m * h**2) + v
        off = -(hb**2 / (2.0 * m * h**2)) * np.ones(n - 1)
    else:
        x = np.linspace(math.log(grid.r_min), math.log(grid.r_max), n + 2)
        h = x[1] - x[0]
        r = np.exp(x[1:-1])
        b = r**2
        v = model.potential(r) + hb**2 * l * (l + 1) / (2.0 * m * r**2)
        diag_a = hb**2 / (m * h**2) + b * v + hb**2 / (8.0 * m)
        off_a = -(hb**2 / (2.0 * m * h**2)) * np.ones(n - 1)
        diag = diag_a / b
        off = off_a / np.sqrt(b[:-1] * b[1:])
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1),
                            eigvals_only=True)
    return np.asarray(vals)


def default_box(model: ModelSpec, l: int, count: int):
    """(r_min, r_max) sized so the highest target state fits comfortably.

    Uses rough closed-form energy guesses only to bound the box; the
    reported eigenvalues do not depend on the guesses once converged.
    For Coulomb kinds the inner wall must sit far below the s-wave scale:
    a wall at radius a shifts l = 0 energies by about u(a) u'(a) / 2 ~ 2a,
    so r_min = r_max * 1e-10 keeps that below 1e-8.
    """
    m, hb, k = model.m, model.hbar, model.k
    if model.kind in COULOMB_KINDS:
        n_top = count + l + 1
        r_turn = 2.0 * hb**2 * n_top**2 / (m * k)
        r_max = 2.5 * r_turn
        r_min = r_max * 1e-10
    else:
        e_top = hb * model.omega * (2.0 * (count + 1) + l + 1.5)
        r_turn = math.sqrt(2.0 * e_top / (m * model.omega**2))
        r_max = 2.5 * r_turn
        r_min = r_max * 1e-12
    return r_min, r_max


@dataclass(frozen=True)
class ConvergedLevels:
    """Result of the grid-refinement loop: extrapolated energies plus the
    raw eigenvalue sequence per refinement stage."""

    energies: np.ndarray
    raw_history: tuple
    grid_sizes: tuple


def converged_radial_levels(model: ModelSpec, l: int, count: int,
                            rel_tol: float = 1e-7, r_max=None, r_min=None,
                            n0: int = 4000, max_doublings: int = 7) -> ConvergedLevels:
    """Eigenvalues converged by halving the grid spacing.

    The spacing is halved until the (order-adaptive Richardson) extrapolated
    eigenvalues shift by less than ``rel_tol``; the observed convergence
    order is estimated from the last three raw stages, which also covers the
    perturbed Coulomb model whose singular inverse-square term degrades the
    nominal second-order rate.
    """
    box_min, box_max = default_box(model, l, count)
    r_lo = box_min if r_min is None else r_min
    r_hi = box_max if r_max is None else r_max
    n = n0
    history = [eigensolve_radial(model, l, RadialGrid(r_lo, r_hi, n), count)]
    sizes = [n]
    best = history[-1]
    for _ in range(max_doublings):
        n *= 2
        history.append(eigensolve_radial(model, l, RadialGrid(r_lo, r_hi, n), count))
        sizes.append(n)
        if len(history) < 3:
            continue
        e1, e2, e3 = history[-3], history[-2], history[-1]
        d1, d2 = e2 - e1, e3 - e2
        ext = e3.copy()
        for i in range(count):
            if abs(d2[i]) < 1e-15 * max(abs(e3[i]), 1e-30) or d1[i] * d2[i] <= 0:
                continue
            p = math.log2(abs(d1[i] / d2[i]))
            p = min(max(p, 0.5), 4.0)
            ext[i] = e3[i] + d2[i] / (2.0**p - 1.0)
        shift = float(np.max(np.abs(ext - best) / np.maximum(np.abs(ext), 1e-300)))
        best = ext
        if shift < rel_tol:
            return ConvergedLevels(best, tuple(history), tuple(sizes))
    raise ConvergenceError(
        f"eigensolver refinement exhausted {max_doublings} doublings "
        f"without reaching rel_tol={rel_tol:g}")
