"""Encodings: basis construction, selectivity verdicts, two-qubit plans."""

import math

import numpy as np
import pytest

from actiongate.drive import Basis, ControlMatrix
from actiongate.encodings import (EncodingSpec, build_encoding_basis,
                                  build_two_qubit_basis, selectivity_check,
                                  two_qubit_plan)
from actiongate.errors import CutoffError, DomainError, NoStrategy
from actiongate.spectra import ModelSpec, QuantumNumbers

QN = QuantumNumbers

COULOMB = ModelSpec("coulomb")
HARM_1D = ModelSpec("isotropic_harmonic", dimension=1)
ANH_1D = ModelSpec("anharmonic", c=0.01, dimension=1)


def test_single_action_coulomb_omega10():
    spec = EncodingSpec("single_action", (QN(0, 0, 0),), (QN(1, 0, 0),), (COULOMB,))
    basis, labels = build_encoding_basis(spec, 3)
    assert basis.omega(labels.one_index, labels.zero_index) == pytest.approx(
        0.375, abs=1e-12)


def test_identical_labels_rejected():
    with pytest.raises(DomainError):
        EncodingSpec("single_action", (QN(1, 0, 0),), (QN(1, 0, 0),), (COULOMB,))


def test_action_variant_change_counts():
    m2 = ModelSpec("anharmonic", c=0.01, dimension=2)
    EncodingSpec("two_action", (QN(0, 1, 0),), (QN(1, 0, 0),), (m2,))
    with pytest.raises(DomainError):
        EncodingSpec("two_action", (QN(0, 0, 0),), (QN(1, 0, 0),), (m2,))
    with pytest.raises(DomainError):
        EncodingSpec("single_action", (QN(0, 1, 0),), (QN(1, 0, 0),), (m2,))
    EncodingSpec("three_action", (QN(0, 0, 0),), (QN(1, 1, 1),),
                 (ModelSpec("coulomb_perturbed", beta=0.001),))


def test_dimension_respected():
    with pytest.raises(DomainError):
        EncodingSpec("single_action", (QN(0, 0, 0),), (QN(0, 0, 1),), (HARM_1D,))


def test_cutoff_error():
    spec = EncodingSpec("single_action", (QN(0),), (QN(4),), (ANH_1D,))
    with pytest.raises(CutoffError):
        build_encoding_basis(spec, 2)


def test_two_system_energy_identities():
    # identical subsystems, nearest-level logical states:
    # w_10 = w_32 and w_20 = w_31 exactly by energy additivity
    qubit = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    reg = build_two_qubit_basis(qubit, qubit)
    assert reg.omega(1, 0) == reg.omega(3, 2)
    assert reg.omega(2, 0) == reg.omega(3, 1)
    assert reg.omega(2, 1) == 0.0


def test_selectivity_harmonic_collision_for_every_epsilon():
    spec = EncodingSpec("single_action", (QN(0),), (QN(1),), (HARM_1D,))
    basis, labels = build_encoding_basis(spec, 3)
    ctrl = ControlMatrix.uniform_ladder(basis.dim)
    target = (labels.one_index, labels.zero_index)
    for eps in (1e-8, 1e-4, 1e-2, 0.5):
        rep = selectivity_check(basis, ctrl, target, eps)
        assert rep.verdict == "collision"


def test_selectivity_anharmonic_selective():
    spec = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    basis, labels = build_encoding_basis(spec, 2)
    ctrl = ControlMatrix.uniform_ladder(basis.dim)
    rep = selectivity_check(basis, ctrl, (labels.one_index, labels.zero_index),
                            1e-3 * ANH_1D.omega)
    assert rep.verdict == "selective"
    assert all(s.leakage_ratio < rep.guard for s in rep.spurious)


def test_selectivity_dual_rail_needs_zero_drive():
    spec = EncodingSpec("two_system", (QN(0), QN(1)), (QN(1), QN(0)),
                        (ANH_1D, ANH_1D))
    basis, labels = build_encoding_basis(spec, 1)
    a = np.zeros((basis.dim, basis.dim), dtype=complex)
    a[labels.zero_index, labels.one_index] = 1.0
    a[labels.one_index, labels.zero_index] = 1.0
    rep = selectivity_check(basis, ControlMatrix(a),
                            (labels.one_index, labels.zero_index), 1e-3)
    assert rep.verdict == "needs_zero_drive"


def test_selectivity_guard_monotone():
    spec = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    basis, labels = build_encoding_basis(spec, 2)
    ctrl = ControlMatrix.uniform_ladder(basis.dim)
    target = (labels.one_index, labels.zero_index)
    eps = 2e-3 * ANH_1D.omega
    verdicts = [selectivity_check(basis, ctrl, target, eps, guard=g).verdict
                for g in (1e-4, 1e-2, 0.05, 0.5)]
    # loosening the guard may turn not_selective into selective, never into
    # collision
    assert "collision" not in verdicts
    if "selective" in verdicts:
        first = verdicts.index("selective")
        assert all(v == "selective" for v in verdicts[first:])


def test_three_system_repetition_encoding():
    spec = EncodingSpec("three_system", (QN(0), QN(0), QN(0)),
                        (QN(1), QN(1), QN(1)), (ANH_1D,) * 3)
    basis, labels = build_encoding_basis(spec, 1)
    assert labels.zero_index != labels.one_index
    assert basis.dim == 8


def test_two_qubit_plan_nearest_level_zero_drive():
    qubit = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    reg = build_two_qubit_basis(qubit, qubit)
    a = np.zeros((4, 4), dtype=complex)
    a[1, 2] = a[2, 1] = 1.0
    a[0, 3] = a[3, 0] = 1.0
    plan = two_qubit_plan(reg, ControlMatrix(a), 0.005, simulate=False)
    assert plan.chosen == "zero_drive_12"
    assert plan.omega_21 == 0.0
    # strategy (b) at omega_30 = omega_10 + omega_32 != 0 is also available
    assert plan.available["frequency_selection_30"] == "ok"
    assert plan.omega_30 == pytest.approx(reg.omega(1, 0) + reg.omega(3, 2),
                                          rel=1e-12)


def test_two_qubit_plan_spaced_encoding():
    spaced = EncodingSpec("single_action", (QN(0),), (QN(2),), (ANH_1D,))
    nearest = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    reg = build_two_qubit_basis(spaced, nearest)
    a = np.zeros((4, 4), dtype=complex)
    a[1, 2] = a[2, 1] = 1.0
    plan = two_qubit_plan(reg, ControlMatrix(a), 0.002, simulate=False)
    assert plan.chosen == "frequency_selection_21"
    assert abs(plan.omega_21) > 1e-6


def test_two_qubit_plan_no_strategy():
    qubit = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    reg = build_two_qubit_basis(qubit, qubit)
    a = np.zeros((4, 4), dtype=complex)
    a[0, 1] = a[1, 0] = 1.0  # couples neither {1,2} nor {0,3}
    with pytest.raises(NoStrategy):
        two_qubit_plan(reg, ControlMatrix(a), 0.005, simulate=False)


def test_two_qubit_plan_simulated_fidelity():
    qubit = EncodingSpec("single_action", (QN(0),), (QN(1),), (ANH_1D,))
    reg = build_two_qubit_basis(qubit, qubit)
    a = np.zeros((4, 4), dtype=complex)
    a[1, 2] = a[2, 1] = 1.0
    plan = two_qubit_plan(reg, ControlMatrix(a), 0.02, theta=0.5 * math.pi,
                          simulate=True, dt=5e-3)
    assert plan.chosen == "zero_drive_12"
    assert plan.predicted_fidelity >= 0.999


def test_two_qubit_register_needs_single_subsystems():
    dual = EncodingSpec("two_system", (QN(0), QN(1)), (QN(1), QN(0)),
                        (ANH_1D, ANH_1D))
    with pytest.raises(DomainError):
        build_two_qubit_basis(dual, dual)
