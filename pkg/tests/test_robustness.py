"""Perturbed eigensystems, localization condition, fidelity sweeps."""

import math

import numpy as np
import pytest

from actiongate.drive import Basis, ControlMatrix
from actiongate.errors import SizeError
from actiongate.gates import (PulseSchedule, Rotation, execute_schedule,
                              fidelity, synthesize_rotation)
from actiongate.robustness import (PerturbationSpec, fidelity_sweep,
                                   first_order_overlap_estimate,
                                   localization_report, perturbation_matrix,
                                   perturbed_eigensystem)

GAPPED = Basis(tuple(n + 0.1 * n * n for n in range(8)))


def test_perturbation_matrix_deterministic_and_normalized():
    spec = PerturbationSpec(1.0, seed=42)
    p1 = perturbation_matrix(spec, 6)
    p2 = perturbation_matrix(spec, 6)
    assert np.array_equal(p1, p2)
    assert np.max(np.abs(p1 - p1.conj().T)) == 0.0
    assert np.max(np.abs(p1)) == pytest.approx(1.0, abs=1e-15)
    other = perturbation_matrix(PerturbationSpec(1.0, seed=43), 6)
    assert not np.array_equal(p1, other)


def test_perturbation_matrix_banded():
    spec = PerturbationSpec(1.0, seed=3, structure="banded", bandwidth=1)
    p = perturbation_matrix(spec, 6)
    idx = np.arange(6)
    assert np.max(np.abs(p[np.abs(idx[:, None] - idx[None, :]) > 1])) == 0.0


def test_unperturbed_eigensystem_is_trivial():
    vals, vecs = perturbed_eigensystem(GAPPED, PerturbationSpec(0.0, seed=1))
    assert np.allclose(vals, GAPPED.energies)
    assert np.max(np.abs(np.abs(vecs) - np.eye(8))) <= 1e-12


def test_eigenvalues_sorted_and_first_order_shift():
    spec = PerturbationSpec(1e-4, seed=5)
    vals, _ = perturbed_eigensystem(GAPPED, spec)
    assert np.all(np.diff(vals) > 0)
    p = perturbation_matrix(spec, 8)
    shift = vals - np.asarray(GAPPED.energies)
    first_order = spec.strength * np.real(np.diag(p))
    # remainder is O(strength^2)
    assert np.max(np.abs(shift - first_order)) <= 10 * spec.strength**2


def test_size_cap():
    big = Basis(tuple(range(20)))
    with pytest.raises(SizeError):
        perturbed_eigensystem(big, PerturbationSpec(0.1, seed=1), cap=10)


def test_localization_unperturbed():
    rep = localization_report(GAPPED, PerturbationSpec(0.0, seed=2))
    assert all(e.overlap == pytest.approx(1.0, abs=1e-12) for e in rep.entries)
    assert rep.persist_fraction == 1.0


def test_localization_matches_perturbation_theory():
    spec = PerturbationSpec(1e-3, seed=7)
    rep = localization_report(GAPPED, spec)
    est = first_order_overlap_estimate(GAPPED, spec)
    assert np.all(est >= 0.9)
    for entry, pt in zip(rep.entries, est):
        assert entry.match == entry.level
        assert abs(entry.overlap - pt) <= 0.1 * (1.0 - pt) + 1e-10
        assert abs(entry.overlap / pt - 1.0) <= 0.1


def test_localization_degenerate_pair_fails():
    basis = Basis((1.0, 1.0))
    # any coupling splits a degenerate pair into half-half superpositions
    rep = localization_report(basis, PerturbationSpec(1e-6, seed=11))
    assert all(abs(e.overlap - 0.5) <= 0.05 for e in rep.entries)
    assert not any(e.persists for e in rep.entries)


def test_overlap_matrix_doubly_stochastic():
    _, vecs = perturbed_eigensystem(GAPPED, PerturbationSpec(0.3, seed=9))
    w = np.abs(vecs) ** 2
    assert np.max(np.abs(w.sum(axis=0) - 1.0)) <= 1e-8
    assert np.max(np.abs(w.sum(axis=1) - 1.0)) <= 1e-8
    assert np.all(w >= 0.0) and np.all(w <= 1.0 + 1e-12)


def _x_gate_setup(g=5e-3):
    basis = Basis((0.0, 1.0))
    ctrl = ControlMatrix(np.array([[0, 1], [1, 0]], dtype=complex))
    seg = synthesize_rotation(basis, ctrl, (1, 0), Rotation.about_x(math.pi), g)
    return basis, ctrl, PulseSchedule((seg,))


def test_fidelity_sweep_zero_point_matches_unperturbed():
    basis, ctrl, sched = _x_gate_setup(2e-2)
    spec = PerturbationSpec(1.0, seed=13)
    points = fidelity_sweep(basis, ctrl, sched, spec, [0.0], dt=2e-3)
    target = execute_schedule(basis, ctrl, sched, engine="rabi")
    unperturbed = execute_schedule(basis, ctrl, sched, engine="exact", dt=2e-3)
    assert points[0].fidelity == pytest.approx(fidelity(target, unperturbed),
                                               abs=1e-14)
    assert points[0].min_overlap == 1.0
    assert points[0].persist_fraction == 1.0


def test_fidelity_sweep_continuity():
    basis, ctrl, sched = _x_gate_setup(2e-2)
    spec = PerturbationSpec(1.0, seed=13)
    eps = 1e-3
    deltas = [1e-4, 1e-5]
    diffs = []
    for d in deltas:
        pts = fidelity_sweep(basis, ctrl, sched, spec, [eps, eps + d], dt=2e-3)
        diffs.append(abs(pts[1].fidelity - pts[0].fidelity))
    assert diffs[1] < diffs[0]
    assert diffs[1] < 1e-3


def test_fidelity_sweep_quadratic_slope():
    basis, ctrl, sched = _x_gate_setup(5e-3)
    spec = PerturbationSpec(1.0, seed=17)
    grid = [2e-4, 4e-4, 8e-4, 1.6e-3]
    points = fidelity_sweep(basis, ctrl, sched, spec, grid, dt=1e-3)
    infid = np.array([1.0 - p.fidelity for p in points])
    assert np.all(infid > 0)
    slope = np.polyfit(np.log(grid), np.log(infid), 1)[0]
    assert abs(slope - 2.0) <= 0.5
