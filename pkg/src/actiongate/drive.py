"""Time evolution under H = H0 + eps cos(w_d t + phi) H1.

Provides exact stepped propagation (midpoint exponential rule), truncated
Dyson series in the interaction picture, the analytic two-level solutions
in the rotating-wave approximation, the zero-drive two-level solution, and
rotating-wave validity diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DomainError, PairError, QuadratureError,
                     ResonanceCollision)

_UNITARITY_TOL = 1e-8
_HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class Basis:
    """Ordered energy levels of the free Hamiltonian.

    ``labels`` default to integer indices; energies are in units where the
    free Hamiltonian is diag(energies) and frequencies are energy/hbar.
    """

    energies: tuple
    labels: tuple = None
    hbar: float = 1.0

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        object.__setattr__(self, "energies", e)
        if not all(math.isfinite(x) for x in e):
            raise DomainError("basis energies must be finite")
        if self.hbar <= 0:
            raise DomainError("hbar must be positive")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(len(e))))
        elif len(self.labels) != len(e):
            raise DomainError("labels and energies must have equal length")

    @property
    def dim(self):
        return len(self.energies)

    def omega(self, i, j):
        """Transition angular frequency (E_i - E_j)/hbar."""
        return (self.energies[i] - self.energies[j]) / self.hbar

    def free_propagator(self, t):
        """U0(t) = exp(-i H0 t / hbar)."""
        w = np.asarray(self.energies) / self.hbar
        return np.diag(np.exp(-1j * w * t))


@dataclass(frozen=True)
class ControlMatrix:
    """Hermitian amplitude matrix a_{nn'}; H1 = hbar * a."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("control matrix must be square")
        if np.max(np.abs(a - a.conj().T)) > _HERMITICITY_TOL:
            raise DomainError("control matrix must be Hermitian within 1e-12")
        a = np.array(0.5 * (a + a.conj().T))
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def uniform_ladder(cls, n, strength=1.0):
        """Nearest-level couplings a_{i,i+1} = strength, zero diagonal."""
        a = np.zeros((n, n), dtype=complex)
        idx = np.arange(n - 1)
        a[idx, idx + 1] = strength
        a[idx + 1, idx] = np.conj(strength)
        return cls(a)

    @property
    def dim(self):
        return self.a.shape[0]


@dataclass(frozen=True)
class DriveSpec:
    """Cosine drive eps * cos(w_d t + phi)."""

    epsilon: float
    omega_d: float
    phi: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError("epsilon must be >= 0")
        if self.omega_d < 0:
            raise DomainError("omega_d must be >= 0")

    def amplitude(self, t):
        return self.epsilon * np.cos(self.omega_d * t + self.phi)


def _check_dims(basis, control):
    if control.dim != basis.dim:
        raise DomainError("control matrix dimension does not match basis")


def _omega_matrix(basis):
    w = np.asarray(basis.energies) / basis.hbar
    return w[:, None] - w[None, :]


def _upper_mask(basis):
    """mask[i, j] true when level i lies strictly above j (index tie-break)."""
    e = np.asarray(basis.energies)
    idx = np.arange(basis.dim)
    return (e[:, None] > e[None, :]) | ((e[:, None] == e[None, :])
                                        & (idx[:, None] > idx[None, :]))


def check_unitary(u, tol=_UNITARITY_TOL):
    """Raise if max-entry norm of U^dag U - I exceeds ``tol``; returns u."""
    d = u.shape[0]
    dev = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if dev > tol:
        raise DomainError(f"propagator not unitary: deviation {dev:.3g} > {tol:g}")
    return u


# ---------------------------------------------------------------------------
# interaction picture pieces
# ---------------------------------------------------------------------------

def interaction_hamiltonian(basis, control, drive, t):
    """Full interaction-picture Hamiltonian eps(t) U0^dag H1 U0 at time t."""
    _check_dims(basis, control)
    om = _omega_matrix(basis)
    return drive.amplitude(t) * basis.hbar * control.a * np.exp(1j * om * t)


def interaction_split(basis, control, drive, t):
    """The three pieces (H+, H-, Hg) of the interaction Hamiltonian.

    H+- carry the co- and counter-rotating phases e^{i t (w_nn' +- w_d)} of
    every energy-ordered pair (degenerate off-diagonal pairs are assigned by
    index order); Hg is the diagonal part.  The three sum to the full
    interaction Hamiltonian identically.
    """
    _check_dims(basis, control)
    hb, eps, wd, phi = basis.hbar, drive.epsilon, drive.omega_d, drive.phi
    om = _omega_matrix(basis)
    up = _upper_mask(basis)
    a_up = np.where(up, control.a, 0.0)
    half = 0.5 * hb * eps
    plus_up = half * a_up * np.exp(1j * phi) * np.exp(1j * (om + wd) * t)
    minus_up = half * a_up * np.exp(-1j * phi) * np.exp(1j * (om - wd) * t)
    h_plus = plus_up + plus_up.conj().T
    h_minus = minus_up + minus_up.conj().T
    h_g = hb * eps * math.cos(wd * t + phi) * np.diag(np.diag(control.a))
    return h_plus, h_minus, h_g


# ---------------------------------------------------------------------------
# Rabi and Dyson propagators
# ---------------------------------------------------------------------------

def rabi_propagator(basis, control, drive, pair, t):
    """Resonant Rabi propagator exp(-i (eps t/2)(a_mm' e^{-i phi}|m><m'| + h.c.)).

    ``pair = (m, m')`` with E(m) > E(m'); identity outside the pair
    subspace.  The drive must sit on the pair's transition frequency.
    """
    _check_dims(basis, control)
    m, mp = pair
    n = basis.dim
    if not (0 <= m < n and 0 <= mp < n) or m == mp:
        raise PairError(f"invalid pair {pair!r} for a {n}-level basis")
    if basis.energies[m] <= basis.energies[mp]:
        raise PairError("pair must list the higher-energy state first")
    w = basis.omega(m, mp)
    if abs(drive.omega_d - w) > 1e-9 * max(1.0, abs(w)):
        raise DomainError(
            f"drive frequency {drive.omega_d:g} is off the pair resonance {w:g}")
    amp = control.a[m, mp] * np.exp(-1j * drive.phi)
    theta = drive.epsilon * abs(control.a[m, mp]) * t
    u = np.eye(n, dtype=complex)
    if abs(amp) == 0.0:
        return u
    phase = amp / abs(amp)  # e^{-i phi_tilde'}
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    # subspace ordered (m', m): lower state first
    u[mp, mp] = c
    u[m, m] = c
    u[mp, m] = -1j * s * np.conj(phase)
    u[m, mp] = -1j * s * phase
    return u


@dataclass(frozen=True)
class DysonResult:
    u: np.ndarray
    omitted_norm: float
    steps: int


def dyson_propagator(basis, control, drive, order, t, steps=None):
    """Partial Dyson sum of the interaction-picture propagator.

    Terms are built by iterated Picard integration (cumulative trapezoid on
    a shared grid, default 2^12 points per drive period); ``omitted_norm``
    is the spectral norm of the first term beyond ``order``.
    """
    _check_dims(basis, control)
    if order < 0:
        raise DomainError("order must be >= 0")
    if t < 0:
        raise DomainError("t must be >= 0")
    om = _omega_matrix(basis)
    w_fast = float(np.max(np.abs(om))) + drive.omega_d
    if steps is None:
        base = drive.omega_d if drive.omega_d > 0 else max(w_fast, 1.0)
        steps = 4096 * max(1, math.ceil(t * base / (2.0 * math.pi)))
    if steps < 2:
        raise QuadratureError("need at least 2 quadrature steps")
    dt = t / steps
    if w_fast > 0 and dt * w_fast > 0.5:
        raise QuadratureError(
            f"time grid undersamples the fastest phase: dt*w = {dt * w_fast:.3g} > 0.5")
    n = basis.dim
    ts = np.linspace(0.0, t, steps + 1)
    hi = (drive.amplitude(ts)[:, None, None] * basis.hbar
          * control.a[None, :, :] * np.exp(1j * om[None, :, :] * ts[:, None, None]))
    eye = np.broadcast_to(np.eye(n, dtype=complex), hi.shape).copy()

    def picard(prev):
        f = hi @ prev
        integral = np.zeros_like(f)
        np.cumsum(0.5 * dt * (f[:-1] + f[1:]), axis=0, out=integral[1:])
        return (-1j / basis.hbar) * integral

    total = np.eye(n, dtype=complex)
    curr = eye
    for _ in range(order):
        curr = picard(curr)
        total = total + curr[-1]
    omitted = picard(curr)[-1]
    return DysonResult(total, float(np.linalg.norm(omitted, 2)), steps)


# ---------------------------------------------------------------------------
# exact stepped propagator
# ---------------------------------------------------------------------------

_TAYLOR_TERMS = 13
_TAYLOR_MAX_NORM = 0.25
_CHUNK = 1 << 16


def _expm_batch(g):
    """exp(-i g) for a stack of Hermitian matrices."""
    theta = float(np.max(np.abs(g).sum(axis=-1))) if g.size else 0.0
    if theta <= _TAYLOR_MAX_NORM:
        s = -1j * g
        n = g.shape[-1]
        eye = np.broadcast_to(np.eye(n, dtype=complex), g.shape)
        acc = eye + s / _TAYLOR_TERMS
        for j in range(_TAYLOR_TERMS - 1, 0, -1):
            acc = eye + (s @ acc) / j
        return acc
    w, v = np.linalg.eigh(g)
    return (v * np.exp(-1j * w)[..., None, :]) @ v.conj().swapaxes(-1, -2)


def _ordered_product(mats):
    """mats[-1] @ ... @ mats[0] by pairwise reduction."""
    while mats.shape[0] > 1:
        m = mats.shape[0]
        even = m - (m % 2)
        paired = np.matmul(mats[1:even:2], mats[0:even:2])
        if m % 2:
            mats = np.concatenate([paired, mats[-1:]], axis=0)
        else:
            mats = paired
    return mats[0]


def propagate_stepped(h_builder, t_start, t_end, steps, hbar=1.0):
    """Ordered product of midpoint exponentials exp(-i H(t_mid) dt / hbar).

    ``h_builder(ts)`` must return the stack of Hamiltonians at the sample
    times.  Exactly unitary per step; global error O(dt^2).
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    dt = (t_end - t_start) / steps
    total = None
    for lo in range(0, steps, _CHUNK):
        hi = min(lo + _CHUNK, steps)
        mids = t_start + (np.arange(lo, hi) + 0.5) * dt
        h = h_builder(mids)
        u = _expm_batch(h * (dt / hbar))
        chunk = _ordered_product(u)
        total = chunk if total is None else chunk @ total
    return total


def _builder(basis, control, drive, mode, static_extra=None):
    n = basis.dim
    h0 = np.diag(np.asarray(basis.energies, dtype=complex))
    if static_extra is not None:
        extra = np.asarray(static_extra, dtype=complex)
        if extra.shape != (n, n):
            raise DomainError("static_extra must match the basis dimension")
        if np.max(np.abs(extra - extra.conj().T)) > _HERMITICITY_TOL:
            raise DomainError("static_extra must be Hermitian")
        h0 = h0 + extra
    if mode == "full":
        h1 = basis.hbar * control.a

        def build(ts):
            return h0[None] + drive.amplitude(ts)[:, None, None] * h1[None]
        return build
    if mode == "rwa":
        up = _upper_mask(basis)
        a_up = np.where(up, control.a, 0.0)
        half = 0.5 * basis.hbar * drive.epsilon

        def build(ts):
            ph = np.exp(-1j * (drive.omega_d * ts + drive.phi))[:, None, None]
            upper = half * a_up[None] * ph
            return h0[None] + upper + upper.conj().swapaxes(-1, -2)
        return build
    raise DomainError(f"unknown propagation mode {mode!r}")


def exact_propagator(basis, control, drive, t, steps, mode="full",
                     static_extra=None):
    """Reference stepped propagator for H(t) = H0 + eps cos(w_d t + phi) H1.

    ``mode='rwa'`` propagates H0 plus only the co-rotating part of the
    drive, the Hamiltonian solved exactly by the analytic two-level form.
    ``static_extra`` adds a constant Hermitian term to H0 (perturbation
    studies).  The result is checked unitary to 1e-8.
    """
    _check_dims(basis, control)
    build = _builder(basis, control, drive, mode, static_extra)
    u = propagate_stepped(build, 0.0, t, steps, basis.hbar)
    return check_unitary(u)


def step_doubling_order(basis, control, drive, t, steps, mode="full",
                        static_extra=None):
    """Observed convergence order from three step-doubled runs."""
    u1 = exact_propagator(basis, control, drive, t, steps, mode, static_extra)
    u2 = exact_propagator(basis, control, drive, t, 2 * steps, mode, static_extra)
    u4 = exact_propagator(basis, control, drive, t, 4 * steps, mode, static_extra)
    d12 = np.max(np.abs(u1 - u2))
    d24 = np.max(np.abs(u2 - u4))
    if d24 == 0.0:
        raise DomainError("step-doubling differences vanished; reduce steps")
    return math.log2(d12 / d24)


# ---------------------------------------------------------------------------
# analytic two-level solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoLevelParams:
    """Parameters of the driven two-level system in the rotating frame.

    omega_bar / omega_tilde are the sum / difference frequencies of the two
    levels, delta the drive detuning, amp_abs = |a_10|, phi_tilde the
    coupling phase (a_10 = |a_10| e^{-i phi_tilde}), phi_tilde_prime =
    phi + phi_tilde, and rabi the generalized Rabi frequency.
    """

    omega_bar: float
    omega_tilde: float
    delta: float
    epsilon: float
    amp_abs: float
    phi_tilde: float
    phi_tilde_prime: float
    rabi: float

    def __post_init__(self):
        if self.rabi < abs(self.delta) - 1e-12 or self.rabi < self.epsilon * self.amp_abs - 1e-12:
            raise DomainError("generalized Rabi frequency below its lower bounds")

    @classmethod
    def from_system(cls, basis, control, drive):
        if basis.dim != 2:
            raise DomainError("two-level parameters need a two-level basis")
        _check_dims(basis, control)
        e0, e1 = basis.energies
        if e1 <= e0:
            raise DomainError("basis must be ordered with E(1) > E(0)")
        hb = basis.hbar
        omega_bar = (e0 + e1) / hb
        omega_tilde = (e1 - e0) / hb
        a10 = control.a[1, 0]
        amp_abs = abs(a10)
        phi_tilde = -math.atan2(a10.imag, a10.real)
        delta = drive.omega_d - omega_tilde
        rabi = math.hypot(delta, drive.epsilon * amp_abs)
        return cls(omega_bar, omega_tilde, delta, drive.epsilon, amp_abs,
                   phi_tilde, drive.phi + phi_tilde, rabi)


def two_level_analytic(params: TwoLevelParams, t):
    """Analytic Schroedinger-picture propagator of the co-rotating drive.

    Returns (U, P01) where P01 = (eps^2 |a|^2 / Rabi^2) sin^2(Rabi t / 2).
    The generalized Rabi frequency is used uniformly in every entry.
    """
    wb, wt = params.omega_bar, params.omega_tilde
    om, delta = params.rabi, params.delta
    g = params.epsilon * params.amp_abs
    half = 0.5 * om * t
    c, s = math.cos(half), math.sin(half)
    ratio_d = delta / om if om > 0 else 0.0
    ratio_g = g / om if om > 0 else 0.0
    pp = params.phi_tilde_prime
    u = np.array([
        [np.exp(0.5j * wt * t) * (c - 1j * ratio_d * s),
         -1j * np.exp(0.5j * wt * t) * np.exp(1j * pp) * ratio_g * s],
        [-1j * np.exp(-0.5j * wt * t) * np.exp(-1j * pp) * ratio_g * s,
         np.exp(-0.5j * wt * t) * (c + 1j * ratio_d * s)],
    ], dtype=complex)
    u *= np.exp(-0.5j * wb * t)
    p01 = (ratio_g * s) ** 2
    return u, p01


@dataclass(frozen=True)
class ZeroDriveParams:
    """Parameters of the constant-drive (w_d = 0) two-level system.

    eps0 = eps cos(phi); omega_t / omega_r are the drive-shifted sum and
    difference frequencies, gamma = 2 eps0 |a_10| the coupling rate, and
    big_omega = sqrt(omega_r^2 + gamma^2).
    """

    eps0: float
    omega_t: float
    omega_r: float
    gamma: float
    big_omega: float
    phi_tilde: float

    def __post_init__(self):
        if self.big_omega < abs(self.omega_r) - 1e-12:
            raise DomainError("big_omega below |omega_r|")

    @property
    def axis(self):
        """Unit rotation axis n0 for big_omega > 0."""
        if self.big_omega == 0.0:
            raise DomainError("axis undefined at zero effective frequency")
        return (self.gamma * math.cos(self.phi_tilde) / self.big_omega,
                -self.gamma * math.sin(self.phi_tilde) / self.big_omega,
                -self.omega_r / self.big_omega)

    @classmethod
    def from_system(cls, basis, control, epsilon, phi):
        if basis.dim != 2:
            raise DomainError("zero-drive parameters need a two-level basis")
        _check_dims(basis, control)
        e0, e1 = basis.energies
        hb = basis.hbar
        eps0 = epsilon * math.cos(phi)
        a00 = control.a[0, 0].real
        a11 = control.a[1, 1].real
        a10 = control.a[1, 0]
        omega_t = (e0 + e1) / hb + eps0 * (a00 + a11)
        omega_r = (e1 - e0) / hb + eps0 * (a11 - a00)
        gamma = 2.0 * eps0 * abs(a10)
        phi_tilde = -math.atan2(a10.imag, a10.real)
        return cls(eps0, omega_t, omega_r, gamma,
                   math.hypot(omega_r, gamma), phi_tilde)


def zero_drive_propagator(params: ZeroDriveParams, t):
    """Propagator of the static total Hamiltonian at drive frequency 0.

    At omega_r = 0 it reduces to exp(-i omega_t t/2) R_{n0'}(2 eps0 |a| t)
    with the in-plane axis set by the coupling phase.
    """
    om = params.big_omega
    half = 0.5 * om * t
    c, s = math.cos(half), math.sin(half)
    if om > 0:
        rr, rg = params.omega_r / om, params.gamma / om
    else:
        rr, rg = 0.0, 0.0
    ph = np.exp(1j * params.phi_tilde)
    u = np.array([
        [c + 1j * rr * s, -1j * ph * rg * s],
        [-1j * np.conj(ph) * rg * s, c - 1j * rr * s],
    ], dtype=complex)
    return np.exp(-0.5j * params.omega_t * t) * u


# ---------------------------------------------------------------------------
# rotating-wave validity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RwaRatio:
    kind: str
    pair: tuple
    value: float


@dataclass(frozen=True)
class RwaReport:
    target: tuple
    rows: tuple
    flagged: tuple
    threshold: float
    collision_tol: float


def rwa_validity_report(basis, control, drive, pair, threshold=0.05,
                        collision_tol=None):
    """Smallness ratios governing the rotating-wave approximation.

    Tabulates eps|a_nn'|/(w_nn' + w_d) for every coupled pair,
    eps|a_nn|/w_d for nonzero diagonals, and eps|a_nn'|/|w_nn' - w_d| for
    coupled pairs other than the target; rows above ``threshold`` are
    flagged.  Raises ResonanceCollision when a non-target coupled pair lies
    within ``collision_tol`` (default 10 eps max|a|) of the drive.
    """
    _check_dims(basis, control)
    m, mp = pair
    if basis.energies[m] <= basis.energies[mp]:
        raise PairError("target pair must list the higher-energy state first")
    w_target = basis.omega(m, mp)
    if abs(drive.omega_d - w_target) > 1e-9 * max(1.0, abs(w_target)):
        raise DomainError("target pair is not on resonance with the drive")
    eps = drive.epsilon
    n = basis.dim
    offdiag = np.abs(control.a - np.diag(np.diag(control.a)))
    max_a = float(offdiag.max()) if n > 1 else 0.0
    if collision_tol is None:
        collision_tol = 10.0 * eps * max_a
    rows = []
    for i in range(n):
        for j in range(i):
            hi, lo = (i, j) if basis.energies[i] >= basis.energies[j] else (j, i)
            amp = abs(control.a[hi, lo])
            if amp == 0.0:
                continue
            w = basis.omega(hi, lo)
            rows.append(RwaRatio("counter_rotating", (hi, lo),
                                 eps * amp / (w + drive.omega_d)))
            if (hi, lo) == (m, mp):
                continue
            detune = abs(w - drive.omega_d)
            if detune < collision_tol:
                raise ResonanceCollision(
                    f"transition {(hi, lo)} at frequency {w:g} collides with the "
                    f"drive {drive.omega_d:g} (tolerance {collision_tol:g})")
            rows.append(RwaRatio("off_resonant", (hi, lo), eps * amp / detune))
    for i in range(n):
        amp = abs(control.a[i, i])
        if amp > 0.0:
            rows.append(RwaRatio("diagonal", (i, i), eps * amp / drive.omega_d))
    rows = tuple(rows)
    flagged = tuple(r for r in rows if r.value > threshold)
    return RwaReport((m, mp), rows, flagged, threshold, collision_tol)
