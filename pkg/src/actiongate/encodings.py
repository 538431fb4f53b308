"""Logical-qubit encodings over action variables and their selectivity.

Covers single-system encodings in one, two or three action variables,
multi-system encodings (dual-rail, three-system repetition), frequency
selectivity diagnostics for the resonance method, and the three strategies
for continuous-SWAP two-qubit gates on a four-level register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import Basis, ControlMatrix, DriveSpec, rwa_validity_report
from .errors import (CutoffError, DomainError, NoStrategy, ResonanceCollision,
                     ZeroCoupling)
from .gates import (PulseSchedule, Rotation, execute_schedule,
                    rotation_matrix, synthesize_rotation)
from .spectra import ModelSpec, QuantumNumbers, energy_quantum

_VARIANT_SUBSYSTEMS = {
    "single_action": 1,
    "two_action": 1,
    "three_action": 1,
    "two_system": 2,
    "three_system": 3,
}

_ACTION_VARIANT_CHANGES = {"single_action": 1, "two_action": 2, "three_action": 3}


@dataclass(frozen=True)
class EncodingSpec:
    """A logical qubit: per-subsystem level labels for |0>_L and |1>_L.

    ``zero`` and ``one`` are tuples of QuantumNumbers, one per subsystem;
    ``models`` lists the subsystem ModelSpecs (identical subsystems repeat
    the same spec).
    """

    variant: str
    zero: tuple
    one: tuple
    models: tuple

    def __post_init__(self):
        if self.variant not in _VARIANT_SUBSYSTEMS:
            raise DomainError(f"unknown encoding variant {self.variant!r}")
        count = _VARIANT_SUBSYSTEMS[self.variant]
        zero = tuple(self.zero)
        one = tuple(self.one)
        models = tuple(self.models)
        if not (len(zero) == len(one) == len(models) == count):
            raise DomainError(
                f"variant {self.variant} needs {count} subsystem(s)")
        if zero == one:
            raise DomainError("|0>_L and |1>_L must differ")
        for qn, model in list(zip(zero, models)) + list(zip(one, models)):
            if model.dimension < 3 and qn.n_phi != 0:
                raise DomainError("n_phi must be 0 for dimension < 3")
            if model.dimension < 2 and qn.n_theta != 0:
                raise DomainError("n_theta must be 0 for dimension < 2")
        if self.variant in _ACTION_VARIANT_CHANGES:
            changed = sum(a != b for a, b in zip(zero[0].astuple(), one[0].astuple()))
            if changed != _ACTION_VARIANT_CHANGES[self.variant]:
                raise DomainError(
                    f"{self.variant} encoding must change exactly "
                    f"{_ACTION_VARIANT_CHANGES[self.variant]} action variable(s)")
        object.__setattr__(self, "zero", zero)
        object.__setattr__(self, "one", one)
        object.__setattr__(self, "models", models)


@dataclass(frozen=True)
class EncodingLabels:
    """Logical state positions inside the enumerated basis."""

    zero_index: int
    one_index: int
    level_labels: tuple


def _subsystem_levels(model, cutoff):
    levels = []
    for nr in range(cutoff + 1):
        for nt in range(cutoff + 1 - nr) if model.dimension >= 2 else (0,):
            for np_ in range(cutoff + 1 - nr - nt) if model.dimension >= 3 else (0,):
                qn = QuantumNumbers(nr, nt, np_)
                levels.append((qn, energy_quantum(model, qn)))
    return levels


def build_encoding_basis(spec: EncodingSpec, cutoffs):
    """Tensor-product basis of the encoding's subsystems up to ``cutoffs``.

    ``cutoffs`` bounds the total quantum number per subsystem (scalar or one
    per subsystem).  Returns (Basis, EncodingLabels); entries are sorted by
    total energy with lexicographic label tie-break.  Raises CutoffError
    when a logical label exceeds its cutoff.
    """
    k = len(spec.models)
    if isinstance(cutoffs, int):
        cutoffs = (cutoffs,) * k
    if len(cutoffs) != k:
        raise DomainError("need one cutoff per subsystem")
    per_sub = [_subsystem_levels(m, c) for m, c in zip(spec.models, cutoffs)]
    states = [((), 0.0)]
    for levels in per_sub:
        states = [(label + (qn.astuple(),), e + de)
                  for label, e in states for qn, de in levels]
    states.sort(key=lambda t: (t[1], t[0]))
    labels = tuple(label for label, _ in states)
    energies = tuple(e for _, e in states)
    zero_label = tuple(qn.astuple() for qn in spec.zero)
    one_label = tuple(qn.astuple() for qn in spec.one)
    try:
        zero_index = labels.index(zero_label)
        one_index = labels.index(one_label)
    except ValueError as exc:
        raise CutoffError(f"logical label {exc} lies beyond the cutoff") from None
    basis = Basis(energies, labels=labels, hbar=spec.models[0].hbar)
    return basis, EncodingLabels(zero_index, one_index, labels)


# ---------------------------------------------------------------------------
# selectivity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpuriousTransition:
    pair: tuple
    detuning: float
    coupling: float
    leakage_ratio: float


@dataclass(frozen=True)
class SelectivityReport:
    """Frequency-selection diagnosis for one target transition.

    ``verdict`` is ``selective``, ``collision``, ``needs_zero_drive`` or
    ``not_selective`` (guard exceeded without an outright collision).
    """

    target: tuple
    omega_target: float
    spurious: tuple
    verdict: str
    guard: float
    collision_tol: float


def selectivity_check(basis, control, target, epsilon, guard=0.05,
                      collision_tol=None) -> SelectivityReport:
    """Diagnose whether ``target`` can be addressed by frequency selection.

    A collision is any non-target coupled transition within the collision
    tolerance (default 10 eps max|a|) of the target frequency -- an exact
    frequency clash, independent of the guard.  A vanishing target
    frequency with nonzero coupling needs the zero-drive route instead.
    """
    m, mp = target
    n = basis.dim
    if not (0 <= m < n and 0 <= mp < n) or m == mp:
        raise DomainError(f"invalid target pair {target!r}")
    omega_t = abs(basis.omega(m, mp))
    eps = epsilon
    offdiag = np.abs(control.a - np.diag(np.diag(control.a)))
    max_a = float(offdiag.max()) if n > 1 else 0.0
    if collision_tol is None:
        collision_tol = 10.0 * eps * max_a
    scale = max(max(abs(e) for e in basis.energies) / basis.hbar, 1e-300)
    target_coupling = abs(control.a[m, mp])
    spurious = []
    collision = False
    all_within_guard = True
    for i in range(n):
        for j in range(i):
            if {i, j} == {m, mp}:
                continue
            coupling = eps * abs(control.a[i, j])
            if coupling == 0.0:
                continue
            detuning = abs(abs(basis.omega(i, j)) - omega_t)
            if detuning < collision_tol:
                collision = True
                ratio = math.inf
            else:
                ratio = coupling / detuning
            if not ratio < guard:
                all_within_guard = False
            spurious.append(SpuriousTransition((i, j), detuning, coupling, ratio))
    if omega_t <= 1e-9 * scale and target_coupling > 0:
        verdict = "needs_zero_drive"
    elif collision:
        verdict = "collision"
    elif all_within_guard:
        verdict = "selective"
    else:
        verdict = "not_selective"
    return SelectivityReport((m, mp), omega_t, tuple(spurious), verdict,
                             guard, collision_tol)


# ---------------------------------------------------------------------------
# two-qubit register and continuous-SWAP strategies
# ---------------------------------------------------------------------------

def build_two_qubit_basis(qubit_a: EncodingSpec, qubit_b: EncodingSpec):
    """Four-level register |0~>..|3~> = |00>,|01>,|10>,|11> of two encoded qubits.

    Each input must be a single-subsystem encoding; energies add.  Ordering
    is by the binary logical label, which coincides with the energy order
    whenever the four energies are strictly ascending.
    """
    for spec in (qubit_a, qubit_b):
        if len(spec.models) != 1:
            raise DomainError("two-qubit register needs single-subsystem qubits")
    e = {}
    for bit_a, qa in ((0, qubit_a.zero[0]), (1, qubit_a.one[0])):
        for bit_b, qb in ((0, qubit_b.zero[0]), (1, qubit_b.one[0])):
            e[2 * bit_a + bit_b] = (energy_quantum(qubit_a.models[0], qa)
                                    + energy_quantum(qubit_b.models[0], qb))
    labels = ("00", "01", "10", "11")
    return Basis(tuple(e[i] for i in range(4)), labels=labels,
                 hbar=qubit_a.models[0].hbar)


@dataclass(frozen=True)
class TwoQubitPlan:
    """Chosen continuous-SWAP strategy with pulse parameters and prediction."""

    chosen: str
    available: dict
    segment: object
    ideal: np.ndarray
    predicted_fidelity: float
    omega_21: float
    omega_30: float


def _embed_pair_rotation(dim, pair, rot):
    u = np.eye(dim, dtype=complex)
    lo, hi = min(pair), max(pair)
    u[np.ix_([lo, hi], [lo, hi])] = rotation_matrix(rot)
    return u


def two_qubit_plan(basis, control, epsilon, theta=math.pi, simulate=True,
                   dt=None, ztol=None) -> TwoQubitPlan:
    """Select a two-qubit gate strategy on the four-level register.

    Tries, in order: (a) zero-drive rotation in the {|1~>,|2~>} subspace
    when their frequency vanishes, (b') frequency selection at w_21 when it
    does not (the spaced-encoding route), and (b) frequency selection at
    w_30 in the {|0~>,|3~>} subspace.  Returns the chosen strategy, the
    synthesized pulse, the ideal embedded rotation and, when ``simulate``,
    the exact-engine fidelity against it.  Raises NoStrategy when none
    applies.
    """
    if basis.dim != 4:
        raise DomainError("two-qubit planning needs a four-level register")
    scale = max(max(abs(e) for e in basis.energies) / basis.hbar, 1e-300)
    if ztol is None:
        ztol = 1e-9 * scale
    w21 = basis.omega(2, 1)
    w30 = basis.omega(3, 0)
    available = {}
    candidates = []

    # (a) zero-drive in {1, 2}
    if abs(w21) <= ztol:
        if abs(control.a[1, 2]) == 0.0:
            available["zero_drive_12"] = "no coupling a_12"
        elif abs(control.a[1, 1] - control.a[2, 2]) > 1e-12:
            available["zero_drive_12"] = "diagonal couplings unequal: omega_r != 0"
        else:
            available["zero_drive_12"] = "ok"
            candidates.append("zero_drive_12")
    else:
        available["zero_drive_12"] = f"omega_21 = {w21:g} is not zero"

    # (c) frequency selection at omega_21 (spaced encodings)
    if abs(w21) > ztol:
        pair = (2, 1) if basis.energies[2] > basis.energies[1] else (1, 2)
        try:
            drive = DriveSpec(epsilon, abs(w21), 0.0)
            if abs(control.a[pair]) == 0.0:
                raise ZeroCoupling("no coupling a_12")
            rwa_validity_report(basis, control, drive, pair)
            available["frequency_selection_21"] = "ok"
            candidates.append("frequency_selection_21")
        except (ResonanceCollision, ZeroCoupling) as exc:
            available["frequency_selection_21"] = str(exc)
    else:
        available["frequency_selection_21"] = "omega_21 vanishes"

    # (b) frequency selection at omega_30
    if abs(w30) > ztol:
        pair = (3, 0) if basis.energies[3] > basis.energies[0] else (0, 3)
        try:
            drive = DriveSpec(epsilon, abs(w30), 0.0)
            if abs(control.a[pair]) == 0.0:
                raise ZeroCoupling("no coupling a_03")
            rwa_validity_report(basis, control, drive, pair)
            available["frequency_selection_30"] = "ok"
            candidates.append("frequency_selection_30")
        except (ResonanceCollision, ZeroCoupling) as exc:
            available["frequency_selection_30"] = str(exc)
    else:
        available["frequency_selection_30"] = "omega_30 vanishes"

    if not candidates:
        raise NoStrategy(f"all strategies failed: {available}")
    chosen = candidates[0]

    if chosen == "zero_drive_12":
        amp = control.a[2, 1]
        phi_tilde = -math.atan2(amp.imag, amp.real)
        rot = Rotation.in_plane(phi_tilde, theta)
        segment = synthesize_rotation(basis, control, (2, 1), rot, epsilon)
        ideal = _embed_pair_rotation(4, (1, 2), rot)
    elif chosen == "frequency_selection_21":
        pair = (2, 1) if basis.energies[2] > basis.energies[1] else (1, 2)
        rot = Rotation.about_x(theta)
        segment = synthesize_rotation(basis, control, pair, rot, epsilon)
        ideal = _embed_pair_rotation(4, (1, 2), rot)
    else:
        pair = (3, 0) if basis.energies[3] > basis.energies[0] else (0, 3)
        rot = Rotation.about_x(theta)
        segment = synthesize_rotation(basis, control, pair, rot, epsilon)
        ideal = _embed_pair_rotation(4, (0, 3), rot)

    predicted = math.nan
    if simulate:
        from .gates import fidelity
        schedule = PulseSchedule((segment,), frame="interaction")
        u = execute_schedule(basis, control, schedule, engine="exact", dt=dt)
        predicted = fidelity(ideal, u)
    return TwoQubitPlan(chosen, available, segment, ideal, predicted, w21, w30)
