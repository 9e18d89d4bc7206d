import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glduality import DomainError, DragProfile, IntegratorConfig, TrueState, WrongClass, h_type, integrate, k_type
from glduality.integrate import pericenters
from glduality.invariants import (
    applicable_quantities,
    drift,
    fjh_complex,
    invariant_set,
    lrl_complex,
    pseudo_angular_momentum,
    pseudo_energy,
    series,
)
from glduality.periods import apsidal_radii, state_on_orbit

CFG = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)


def test_angular_momentum_examples():
    assert pseudo_angular_momentum(h_type(), TrueState(0, 1 + 0j, 1j)) == 1.0
    assert pseudo_angular_momentum(h_type(), TrueState(0, 1 + 0j, 1 + 0j)) == 0.0
    spec = h_type(1.0, DragProfile.log_radial(2.0))
    assert pseudo_angular_momentum(spec, TrueState(0, 2 + 0j, 1j)) == pytest.approx(1.0)


def test_energy_examples():
    assert pseudo_energy(h_type(), TrueState(0, 1 + 0j, 1j)) == 1.0
    assert pseudo_energy(k_type(), TrueState(0, 1 + 0j, 1j)) == -0.5
    assert pseudo_energy(h_type(1.0, DragProfile.log_radial(2.0)), TrueState(0, 1 + 0j, 1j)) == 1.0


def test_fjh_examples():
    assert fjh_complex(h_type(), TrueState(0, 1 + 0j, 1j)) == 0
    assert fjh_complex(h_type(), TrueState(0, 1 + 0j, 0j)) == 0.5
    with pytest.raises(WrongClass):
        fjh_complex(k_type(), TrueState(0, 1 + 0j, 1j))


def test_lrl_vanishes_on_circle():
    assert abs(lrl_complex(k_type(), TrueState(0, 1 + 0j, 1j))) < 1e-15
    with pytest.raises(WrongClass):
        lrl_complex(h_type(), TrueState(0, 1 + 0j, 1j))


def test_invariants_need_positive_radius():
    with pytest.raises(DomainError):
        pseudo_energy(h_type(), TrueState(0, 0j, 1j))


def test_invariant_set_views():
    inv = invariant_set(h_type(), TrueState(0, 1 + 0.5j, 0.2 + 0.9j))
    txx, tyy, txy = inv.fjh_tensor
    assert txx + tyy == pytest.approx(2 * inv.E_pseudo, rel=1e-15)
    assert txy == inv.fjh.imag
    with pytest.raises(WrongClass):
        inv.lrl_vector
    kinv = invariant_set(k_type(), TrueState(0, 1 + 0j, 0.9j))
    assert kinv.lrl_vector == (kinv.lrl.real, kinv.lrl.imag)
    assert applicable_quantities(k_type()) == ("L", "E", "A")


@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_no_drag_reduces_to_ordinary_quantities(z, v):
    spec = h_type(1.7)
    state = TrueState(0, z, v)
    assert pseudo_angular_momentum(spec, state) == (z.conjugate() * v).imag
    assert pseudo_energy(spec, state) == pytest.approx(0.5 * abs(v) ** 2 + 0.85 * abs(z) ** 2, rel=1e-14)


@given(st.floats(-3, 3), st.complex_numbers(min_magnitude=0.1, max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_fjh_trace_identity(p, z, v):
    inv = invariant_set(h_type(1.0, DragProfile.log_radial(p)), TrueState(0, z, v))
    txx, tyy, _ = inv.fjh_tensor
    assert txx + tyy == pytest.approx(2 * inv.E_pseudo, rel=1e-12, abs=1e-12)


@given(st.floats(-3, 3), st.complex_numbers(min_magnitude=0.2, max_magnitude=5),
       st.complex_numbers(min_magnitude=0.01, max_magnitude=3))
def test_lrl_modulus_identity(p, z, v):
    spec = k_type(1.0, DragProfile.log_radial(p))
    state = TrueState(0, z, v)
    inv = invariant_set(spec, state)
    lhs = abs(inv.lrl) ** 2
    rhs = 1 + 2 * inv.E_pseudo * inv.L_pseudo**2
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("p", [-1.0, 0.0, 1.0, 2.0])
def test_lrl_is_eccentricity_vector(p):
    """Constant, modulus = eccentricity from the apsides, pointing at the pericenter."""
    spec = k_type(1.0, DragProfile.log_radial(p))
    E, L = -1 / 1.5, math.sqrt(2 * 0.5 / 1.5)  # apsides 0.5 and 1
    traj = integrate(spec, state_on_orbit(spec, E, L, 0.3, angle=1.1), (0.0, 40.0), CFG)
    A = series(traj, "A")
    aps = apsidal_radii(spec, E, L)
    ecc = (aps.b - aps.a) / (aps.b + aps.a)
    assert np.max(np.abs(A - A[0])) < 1e-8
    assert abs(A[0]) == pytest.approx(ecc, rel=1e-8)
    peri = traj(pericenters(traj)[0].clock)
    assert cmath.phase(A[0]) == pytest.approx(math.atan2(peri[1], peri[0]), abs=1e-7)


@pytest.mark.parametrize("kind", ["H", "K"])
def test_conservation_over_ten_periods(kind):
    from glduality.periods import period_quadrature

    drag = DragProfile.log_radial(1.0)
    spec = h_type(1.0, drag) if kind == "H" else k_type(1.0, drag)
    E, L = (1.25, 0.5) if kind == "H" else (-1 / 1.5, math.sqrt(2 * 0.5 / 1.5))
    traj = integrate(spec, state_on_orbit(spec, E, L, 0.5), (0.0, 10.25 * period_quadrature(spec, E, L)), CFG)
    for q in applicable_quantities(spec):
        assert drift(traj, q).rel_drift < 100 * CFG.rel_tol


def test_fjh_on_circular_orbit_stays_zero():
    traj = integrate(h_type(), TrueState(0, 1 + 0j, 1j), (0.0, 20.0), CFG)
    rep = drift(traj, "T")
    assert rep.initial == 0
    # relative drift is against the 1e-12 floor here, so check the absolute deviation
    assert rep.max_abs_deviation < 1e-12


def test_drift_rejects_wrong_class():
    traj = integrate(h_type(), TrueState(0, 1 + 0j, 1j), (0.0, 1.0), CFG)
    with pytest.raises(WrongClass):
        drift(traj, "A")
    with pytest.raises(ValueError):
        series(traj, "Q")


@settings(max_examples=10, deadline=None)
@given(st.floats(-1, 3), st.floats(0.3, 0.7))
def test_pseudo_frame_invariants_match_true_frame(p, ratio):
    from glduality import to_pseudo

    spec = h_type(1.0, DragProfile.log_radial(p))
    state = state_on_orbit(spec, 0.5 * (ratio**2 + 1), ratio, 0.4)
    traj = integrate(spec, to_pseudo(spec, state), (0.0, 3.0), CFG)
    assert series(traj, "E")[0] == pytest.approx(pseudo_energy(spec, state), rel=1e-14)
    assert drift(traj, "L").rel_drift < 1e-8
