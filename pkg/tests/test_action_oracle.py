"""Action-integral quadrature and radial eigensolver oracles."""

import math

import numpy as np
import pytest

from actiongate.action_oracle import (OrbitSpec, RadialGrid, action_integrals,
                                      converged_radial_levels, default_box,
                                      eigensolve_radial, random_orbits,
                                      verify_closed_form)
from actiongate.errors import ConvergenceError, DomainError, NoBoundOrbit
from actiongate.spectra import ModelSpec, QuantumNumbers, energy_quantum

TWO_PI = 2.0 * math.pi


def test_harmonic_actions_frozen():
    m = ModelSpec("isotropic_harmonic")
    res = action_integrals(OrbitSpec(m, 2.0, 0.5, 0.3))
    assert res.actions.j_r == pytest.approx(1.5 * math.pi, rel=1e-10)
    assert res.actions.j_theta == pytest.approx(0.4 * math.pi, rel=1e-12)
    assert res.actions.j_phi == pytest.approx(0.6 * math.pi, rel=1e-12)
    assert res.quad_error < 1e-10


def test_circular_orbit_zero_radial_action():
    # E at the minimum of the effective potential: E = omega * L
    m = ModelSpec("isotropic_harmonic")
    res = action_integrals(OrbitSpec(m, 0.5, 0.5, 0.2))
    assert res.actions.j_r == 0.0


def test_coulomb_action_sum_frozen():
    m = ModelSpec("coulomb")
    res = action_integrals(OrbitSpec(m, -0.5, 0.3, 0.3))
    assert sum(res.actions.astuple()) == pytest.approx(TWO_PI, rel=1e-12)


def test_perturbed_radial_action_frozen():
    # closed form inverted: J_r = pi k sqrt(2m/|E|) - sqrt(4 pi^2 L^2 - 8 pi^2 m beta)
    m = ModelSpec("coulomb_perturbed", beta=0.005)
    e, l = -0.3, 0.5
    res = action_integrals(OrbitSpec(m, e, l, 0.5))
    expected = (math.pi * math.sqrt(2.0 / 0.3)
                - math.sqrt(4 * math.pi**2 * l**2 - 8 * math.pi**2 * 0.005))
    assert res.actions.j_r == pytest.approx(expected, rel=1e-10)


def test_round_trip_residuals_frozen_cases():
    assert verify_closed_form(ModelSpec("isotropic_harmonic"),
                              OrbitSpec(ModelSpec("isotropic_harmonic"), 2.0, 0.5, 0.3)) <= 1e-8
    mp = ModelSpec("coulomb_perturbed", beta=0.005)
    assert verify_closed_form(mp, OrbitSpec(mp, -0.3, 0.5, 0.5)) <= 1e-6


def test_anharmonic_closed_form_is_second_order_in_c():
    # Born's H0(J) for the quartic term is perturbative: the round-trip
    # residual scales as ~4.8 c^2, so 1e-6 needs c <~ 4e-4.  At c = 0.01 the
    # residual sits near 5e-4 by the formula's own accuracy, not quadrature.
    residuals = {}
    for c in (1e-2, 1e-3, 2e-4):
        m = ModelSpec("anharmonic", c=c)
        residuals[c] = verify_closed_form(m, OrbitSpec(m, 1.5, 0.4, 0.4))
    assert residuals[1e-2] == pytest.approx(4.8 * 1e-4, rel=0.2)
    assert residuals[1e-3] == pytest.approx(4.8 * 1e-6, rel=0.2)
    assert residuals[2e-4] <= 1e-6


@pytest.mark.parametrize("model,tol", [
    (ModelSpec("isotropic_harmonic", omega=1.1), 1e-8),
    (ModelSpec("anharmonic", c=2e-4), 1e-6),
    (ModelSpec("coulomb", k=1.3), 1e-6),
    (ModelSpec("coulomb_perturbed", beta=0.005), 1e-6),
])
def test_round_trip_residuals_seeded_sweep(model, tol):
    for orbit in random_orbits(model, 20, seed=2024):
        assert verify_closed_form(model, orbit) <= tol


def test_quadrature_node_doubling_invariance():
    m = ModelSpec("coulomb")
    orbit = OrbitSpec(m, -0.4, 0.6, 0.1)
    a = action_integrals(orbit, nodes=64)
    b = action_integrals(orbit, nodes=128)
    assert abs(a.actions.j_r - b.actions.j_r) <= 1e-8 * abs(a.actions.j_r)


def test_random_orbits_deterministic():
    m = ModelSpec("coulomb")
    assert random_orbits(m, 5, seed=9) == random_orbits(m, 5, seed=9)


def test_no_bound_orbit_errors():
    mc = ModelSpec("coulomb")
    with pytest.raises(NoBoundOrbit):
        OrbitSpec(mc, 0.2, 0.5, 0.0)  # positive energy
    with pytest.raises(NoBoundOrbit):
        action_integrals(OrbitSpec(mc, -0.5, 0.0, 0.0))  # L = 0 falls to centre
    mh = ModelSpec("isotropic_harmonic")
    with pytest.raises(NoBoundOrbit):
        action_integrals(OrbitSpec(mh, 0.3, 0.5, 0.0))  # below the circular energy
    with pytest.raises(DomainError):
        OrbitSpec(mh, 1.0, 0.3, 0.5)  # |Lz| > L


# ---------------------------------------------------------------------------
# radial eigensolver
# ---------------------------------------------------------------------------

def test_eigensolver_coulomb_lowest_two():
    m = ModelSpec("coulomb")
    conv = converged_radial_levels(m, 0, 2, rel_tol=1e-7)
    expected = np.array([-0.5, -0.125])
    assert np.max(np.abs(conv.energies - expected) / np.abs(expected)) <= 1e-6


def test_eigensolver_harmonic_ground():
    m = ModelSpec("isotropic_harmonic")
    conv = converged_radial_levels(m, 0, 1, rel_tol=1e-7)
    assert conv.energies[0] == pytest.approx(1.5, rel=1e-6)


def test_eigensolver_perturbed_ground():
    m = ModelSpec("coulomb_perturbed", beta=0.005)
    conv = converged_radial_levels(m, 0, 1, rel_tol=1e-7)
    closed = energy_quantum(m, QuantumNumbers(0, 0, 0))
    assert conv.energies[0] == pytest.approx(closed, rel=1e-6)


def test_eigensolver_coulomb_l_degeneracy():
    # E(n_r=1, l=0) and E(n_r=0, l=1) are both -1/8
    m = ModelSpec("coulomb")
    e_l0 = converged_radial_levels(m, 0, 2, rel_tol=1e-7).energies[1]
    e_l1 = converged_radial_levels(m, 1, 1, rel_tol=1e-7).energies[0]
    assert abs(e_l0 - e_l1) / abs(e_l1) <= 1e-5


def test_eigensolver_monotone_approach():
    # Under-resolving the Coulomb cusp costs binding energy, so the raw
    # eigenvalues decrease monotonically toward the converged value as the
    # spacing halves; the error shrinks monotonically as well.
    m = ModelSpec("coulomb")
    conv = converged_radial_levels(m, 0, 1, rel_tol=1e-7)
    raw = [h[0] for h in conv.raw_history]
    final = conv.energies[0]
    errors = [abs(r - final) for r in raw]
    assert errors == sorted(errors, reverse=True)
    assert raw == sorted(raw, reverse=True)


def test_eigensolver_convergence_error():
    m = ModelSpec("coulomb")
    with pytest.raises(ConvergenceError):
        converged_radial_levels(m, 0, 1, rel_tol=1e-12, n0=500, max_doublings=2)


def test_eigensolve_radial_grid_validation():
    m = ModelSpec("coulomb")
    with pytest.raises(DomainError):
        RadialGrid(1.0, 0.5, 100)
    with pytest.raises(DomainError):
        RadialGrid(0.0, 10.0, 100)
    with pytest.raises(DomainError):
        eigensolve_radial(m, -1, RadialGrid(1e-6, 30.0, 100), 1)


def test_eigensolve_radial_log_spacing():
    # log grid with a moderate inner wall reproduces the oscillator ground
    # state up to the wall shift ~ u'(0)^2 r_min / 2 ~ 1.1e-3
    m = ModelSpec("isotropic_harmonic")
    grid = RadialGrid(1e-3, 10.0, 4000, spacing="log")
    vals = eigensolve_radial(m, 0, grid, 1)
    assert vals[0] == pytest.approx(1.5, abs=2e-3)


def test_default_box_contains_turning_points():
    m = ModelSpec("coulomb")
    r_min, r_max = default_box(m, 0, 5)
    # outer turning point of the n = 4 state at 2 (n+1)^2
    assert r_max > 2 * 25 * 2
    assert 0 < r_min < 1e-6
