"""Target gates, rotation decompositions, pulse synthesis and fidelity.

Single-qubit gates are products of x/y rotations realized by resonant Rabi
pulses; two-qubit gates use the four-level constructions (CSWAP, CU, CNOT'
and CNOT).  Schedules use a global clock: segment k applies
eps_k cos(w_k t + phi_k) over its window in absolute time, which keeps the
interaction-picture Rabi generator of every resonant segment
time-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import (Basis, ControlMatrix, DriveSpec, ZeroDriveParams,
                    check_unitary, propagate_stepped, rabi_propagator,
                    zero_drive_propagator, _builder, _check_dims)
from .errors import (DimensionMismatch, DomainError, PairError,
                     ResonanceCollision, ZeroCoupling)

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class Rotation:
    """Rotation by ``angle`` about the unit axis ``axis`` on the Bloch sphere."""

    axis: tuple
    angle: float

    def __post_init__(self):
        ax = tuple(float(x) for x in self.axis)
        if len(ax) != 3:
            raise DomainError("axis must be a 3-vector")
        norm = math.sqrt(sum(x * x for x in ax))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"axis norm {norm!r} is not 1 within 1e-12")
        object.__setattr__(self, "axis", ax)

    @classmethod
    def about_x(cls, angle):
        return cls((1.0, 0.0, 0.0), angle)

    @classmethod
    def about_y(cls, angle):
        return cls((0.0, 1.0, 0.0), angle)

    @classmethod
    def in_plane(cls, axis_angle, angle):
        """Axis (cos a, -sin a, 0) in the equatorial plane."""
        return cls((math.cos(axis_angle), -math.sin(axis_angle), 0.0), angle)


def rotation_matrix(rot: Rotation):
    """R_n(theta) = cos(theta/2) I - i sin(theta/2) (n . sigma)."""
    nx, ny, nz = rot.axis
    half = 0.5 * rot.angle
    sigma_n = nx * _SIGMA_X + ny * _SIGMA_Y + nz * _SIGMA_Z
    return math.cos(half) * np.eye(2, dtype=complex) - 1j * math.sin(half) * sigma_n


def recover_rotation(u):
    """(axis, angle in [0, 2 pi)) of a 2x2 special-unitary-like rotation."""
    if u.shape != (2, 2):
        raise DimensionMismatch("rotation recovery needs a 2x2 matrix")
    c = 0.5 * np.trace(u)
    s_vec = 0.5j * np.array([np.trace(_SIGMA_X @ u), np.trace(_SIGMA_Y @ u),
                             np.trace(_SIGMA_Z @ u)])
    s_norm = float(np.linalg.norm(s_vec.real))
    theta = 2.0 * math.atan2(s_norm, float(c.real))  # in [0, 2 pi]
    axis = tuple(s_vec.real / s_norm) if s_norm > 1e-15 else (1.0, 0.0, 0.0)
    return axis, theta


# ---------------------------------------------------------------------------
# standard gates: canonical matrices vs the rotation-product decompositions
# ---------------------------------------------------------------------------

def _block_embed4(u2):
    out = np.eye(4, dtype=complex)
    out[1:3, 1:3] = u2
    return out


def _control_u(u2):
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u2
    return out


_CANONICAL = {
    "I": np.eye(2, dtype=complex),
    "X": _SIGMA_X,
    "Y": _SIGMA_Y,
    "Z": _SIGMA_Z,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0),
    "S": np.diag([1.0, 1.0j]).astype(complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                      [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}


@dataclass(frozen=True)
class StandardGate:
    """Canonical matrix plus the rotation-product form and their relative phase."""

    name: str
    canonical: np.ndarray
    product: np.ndarray
    phase_to_canonical: complex


def standard_gate(name, theta=None, u=None) -> StandardGate:
    """Standard gate by name with both canonical and product-form matrices.

    ``CSWAP`` needs ``theta``; ``CU`` needs the 2x2 ``u``.  The two forms
    agree up to the recorded global phase (exactly 1 except for Z and S,
    whose printed decompositions carry explicit prefactors).
    """
    if name == "I":
        prod = rotation_matrix(Rotation.about_x(0.0))
        canon = _CANONICAL["I"]
    elif name == "X":
        prod = 1j * rotation_matrix(Rotation.about_x(math.pi))
        canon = _CANONICAL["X"]
    elif name == "Y":
        prod = 1j * rotation_matrix(Rotation.about_y(math.pi))
        canon = _CANONICAL["Y"]
    elif name == "Z":
        prod = rotation_matrix(Rotation.about_x(math.pi)) @ rotation_matrix(
            Rotation.about_y(math.pi))
        canon = _CANONICAL["Z"]
    elif name == "H":
        prod = 1j * rotation_matrix(Rotation.about_x(math.pi)) @ rotation_matrix(
            Rotation.about_y(0.5 * math.pi))
        canon = _CANONICAL["H"]
    elif name == "S":
        prod = (np.exp(-0.25j * math.pi)
                * rotation_matrix(Rotation.about_y(-0.5 * math.pi))
                @ rotation_matrix(Rotation.about_x(0.5 * math.pi))
                @ rotation_matrix(Rotation.about_y(0.5 * math.pi)))
        canon = _CANONICAL["S"]
    elif name == "CSWAP":
        if theta is None:
            raise DomainError("CSWAP needs an angle")
        prod = _block_embed4(rotation_matrix(Rotation.about_x(theta)))
        half = 0.5 * theta
        canon = np.array([
            [1, 0, 0, 0],
            [0, math.cos(half), -1j * math.sin(half), 0],
            [0, -1j * math.sin(half), math.cos(half), 0],
            [0, 0, 0, 1]], dtype=complex)
    elif name == "CU":
        if u is None:
            raise DomainError("CU needs the controlled unitary")
        u = np.asarray(u, dtype=complex)
        if u.shape != (2, 2):
            raise DimensionMismatch("CU controls a single-qubit gate")
        prod = _control_u(u)
        canon = _control_u(u)
    elif name == "CNOT_PRIME":
        prod = _control_u(rotation_matrix(Rotation.about_x(math.pi)))
        canon = _control_u(-1j * _SIGMA_X)
    elif name == "CNOT":
        cnot_prime = _control_u(rotation_matrix(Rotation.about_x(math.pi)))
        prod = np.kron(_CANONICAL["S"], np.eye(2, dtype=complex)) @ cnot_prime
        canon = _CANONICAL["CNOT"]
    else:
        raise DomainError(f"unknown gate {name!r}")
    tr = np.trace(prod.conj().T @ canon)
    phase = tr / abs(tr)
    if np.max(np.abs(prod * phase - canon)) > 1e-12:
        raise DomainError(f"product form of {name} deviates beyond a global phase")
    return StandardGate(name, canon, prod, complex(phase))


def fidelity(u, v) -> float:
    """Global-phase-invariant gate fidelity |tr(U^dag V)| / d."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"incompatible shapes {u.shape} vs {v.shape}")
    d = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) / d)


# ---------------------------------------------------------------------------
# pulse synthesis and schedule execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PulseSegment:
    """One drive window addressing a level pair for a given duration."""

    drive: DriveSpec
    duration: float
    pair: tuple

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration >= 0):
            raise DomainError("segment duration must be finite and >= 0")


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered drive segments; ``frame`` fixes the frame of the executed unitary."""

    segments: tuple
    frame: str = "interaction"

    def __post_init__(self):
        if self.frame not in ("interaction", "schrodinger"):
            raise DomainError(f"unknown frame {self.frame!r}")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_time(self):
        return sum(s.duration for s in self.segments)


def _axis_angle_of(rot: Rotation):
    nx, ny, nz = rot.axis
    if abs(nz) > 1e-12:
        raise DomainError("pulse synthesis needs an axis in the xy-plane")
    return math.atan2(-ny, nx)


def _wrap(angle):
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def synthesize_rotation(basis, control, pair, target: Rotation, epsilon,
                        check_collisions=True) -> PulseSegment:
    """Drive segment realizing ``target`` on ``pair`` in the interaction frame.

    Resonant route: w_d on the pair frequency, phi = axis_angle - phi_tilde,
    duration theta / (eps |a|).  Degenerate pairs take the zero-drive route,
    which only reaches axis angles phi_tilde mod pi and needs equal diagonal
    couplings.  Angles are normalized to [0, 2 pi) with the axis flipped for
    negative input angles.
    """
    _check_dims(basis, control)
    m, mp = pair
    amp = control.a[m, mp]
    if abs(amp) == 0.0:
        raise ZeroCoupling(f"control amplitude vanishes on pair {pair!r}")
    alpha = _axis_angle_of(target)
    theta = target.angle
    if theta < 0:
        theta, alpha = -theta, alpha + math.pi
    theta = theta % (2.0 * math.pi)
    phi_tilde = -math.atan2(amp.imag, amp.real)
    w = basis.omega(m, mp)
    scale = max(abs(e) for e in basis.energies) / basis.hbar or 1.0
    if abs(w) <= 1e-9 * scale:
        # zero-frequency pair: constant drive, axis pinned to the coupling phase
        if abs(control.a[m, m] - control.a[mp, mp]) > 1e-12:
            raise DomainError(
                "zero-drive route needs equal diagonal couplings on the pair")
        if abs(_wrap(alpha - phi_tilde)) <= 1e-9:
            phi = 0.0
        elif abs(_wrap(alpha - phi_tilde - math.pi)) <= 1e-9:
            phi = math.pi
        else:
            raise DomainError(
                "zero-drive route only reaches axis angles phi_tilde mod pi")
        duration = theta / (2.0 * epsilon * abs(amp)) if theta else 0.0
        return PulseSegment(DriveSpec(epsilon, 0.0, phi), duration, (m, mp))
    if basis.energies[m] <= basis.energies[mp]:
        raise PairError("pair must list the higher-energy state first")
    drive = DriveSpec(epsilon, w, _wrap(alpha - phi_tilde))
    if check_collisions:
        from .drive import rwa_validity_report
        rwa_validity_report(basis, control, drive, (m, mp))  # ResonanceCollision
    duration = theta / (epsilon * abs(amp)) if theta else 0.0
    return PulseSegment(drive, duration, (m, mp))


def _rabi_segment_unitary(basis, control, seg):
    if seg.drive.omega_d == 0.0:
        m, mp = seg.pair
        sub = Basis((basis.energies[mp], basis.energies[m]), hbar=basis.hbar)
        sub_a = control.a[np.ix_([mp, m], [mp, m])]
        params = ZeroDriveParams.from_system(sub, ControlMatrix(sub_a),
                                             seg.drive.epsilon, seg.drive.phi)
        u2 = zero_drive_propagator(params, seg.duration)
        # interaction frame of the degenerate pair: remove the free phase
        mean_e = 0.5 * (basis.energies[m] + basis.energies[mp])
        u2 = np.exp(1j * mean_e * seg.duration / basis.hbar) * u2
        out = np.eye(basis.dim, dtype=complex)
        out[np.ix_([mp, m], [mp, m])] = u2
        return out
    return rabi_propagator(basis, control, seg.drive, seg.pair, seg.duration)


def execute_schedule(basis, control, schedule: PulseSchedule, engine="rabi",
                     dt=None, static_extra=None):
    """Unitary realized by the schedule in the requested engine and frame.

    ``engine='rabi'`` composes the idealized per-segment propagators.
    ``engine='exact'`` integrates the full Hamiltonian segment by segment on
    the global clock with the midpoint stepper (``dt`` bounds the step; the
    default resolves the fastest system frequency to 0.02 rad per step) and
    converts to the interaction frame with the free propagator when asked.
    """
    _check_dims(basis, control)
    n = basis.dim
    if engine == "rabi":
        u = np.eye(n, dtype=complex)
        for seg in schedule.segments:
            u = _rabi_segment_unitary(basis, control, seg) @ u
        if schedule.frame == "schrodinger":
            u = basis.free_propagator(schedule.total_time) @ u
        return check_unitary(u)
    if engine != "exact":
        raise DomainError(f"unknown engine {engine!r}")
    if dt is None:
        w_scale = max(max(abs(e) for e in basis.energies) / basis.hbar,
                      max((s.drive.omega_d for s in schedule.segments), default=0.0),
                      1e-12)
        dt = 0.02 / w_scale
    u = np.eye(n, dtype=complex)
    t0 = 0.0
    for seg in schedule.segments:
        if seg.duration == 0.0:
            continue
        steps = max(1, math.ceil(seg.duration / dt))
        build = _builder(basis, control, seg.drive, "full", static_extra)
        u = propagate_stepped(build, t0, t0 + seg.duration, steps, basis.hbar) @ u
        t0 += seg.duration
    if schedule.frame == "interaction":
        u = basis.free_propagator(schedule.total_time).conj().T @ u
    return check_unitary(u)


# ---------------------------------------------------------------------------
# gate-level schedule builders
# ---------------------------------------------------------------------------

# rotation factors per gate, rightmost factor (applied first) listed first;
# entries are (axis_angle, angle) with axis (cos a, -sin a, 0)
_DECOMPOSITIONS = {
    "I": (),
    "X": ((0.0, math.pi),),
    "Y": ((-0.5 * math.pi, math.pi),),
    "Z": ((-0.5 * math.pi, math.pi), (0.0, math.pi)),
    "H": ((-0.5 * math.pi, 0.5 * math.pi), (0.0, math.pi)),
    "S": ((-0.5 * math.pi, 0.5 * math.pi), (0.0, 0.5 * math.pi),
          (0.5 * math.pi, 0.5 * math.pi)),
}


def single_qubit_schedule(name, basis, control, pair, epsilon,
                          frame="interaction", check_collisions=True) -> PulseSchedule:
    """Schedule of resonant pulses realizing the named single-qubit gate
    on ``pair`` up to the decomposition's global phase."""
    if name not in _DECOMPOSITIONS:
        raise DomainError(f"no rotation decomposition for gate {name!r}")
    segs = [synthesize_rotation(basis, control, pair,
                                Rotation.in_plane(alpha, theta), epsilon,
                                check_collisions=check_collisions)
            for alpha, theta in _DECOMPOSITIONS[name]]
    return PulseSchedule(tuple(segs), frame)


def cnot_schedule(basis, control, epsilon_cnot, epsilon_s=None,
                  frame="interaction", check_collisions=True) -> PulseSchedule:
    """Schedule realizing CNOT (up to global phase) on a four-level register.

    The CNOT' pulse drives the (3, 2) transition through a full pi rotation;
    the correcting phase gate on the control qubit is realized by its
    three-rotation decomposition on both of the (2, 0) and (3, 1) pairs.
    Requires all three transition frequencies distinct and coupled.
    """
    if basis.dim != 4:
        raise DomainError("CNOT construction needs a four-level basis")
    if epsilon_s is None:
        epsilon_s = epsilon_cnot
    segs = [synthesize_rotation(basis, control, (3, 2),
                                Rotation.about_x(math.pi), epsilon_cnot,
                                check_collisions=check_collisions)]
    for pair in ((2, 0), (3, 1)):
        for alpha, theta in _DECOMPOSITIONS["S"]:
            segs.append(synthesize_rotation(basis, control, pair,
                                            Rotation.in_plane(alpha, theta),
                                            epsilon_s,
                                            check_collisions=check_collisions))
    return PulseSchedule(tuple(segs), frame)
