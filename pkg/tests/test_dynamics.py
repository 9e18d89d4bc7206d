import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glduality import (
    DomainError,
    DragProfile,
    IntegratorConfig,
    PseudoState,
    TrueState,
    h_type,
    integrate,
    k_type,
    make_equation,
    to_pseudo,
    to_true,
)
from glduality.dynamics import pseudo_rhs, radial_potential, true_rhs


def test_true_rhs_harmonic():
    d = true_rhs(h_type(), TrueState(0.0, 1 + 0j, 1j))
    assert d.dz == 1j
    assert d.dv == -1
    assert d.dclock == 1.0


def test_true_rhs_kepler():
    d = true_rhs(k_type(), TrueState(0.0, 1 + 0j, 1j))
    assert d.dv == pytest.approx(-1)


def test_true_rhs_log_drag_at_unit_radius():
    # alpha_dot = -1 and exp(-2 alpha(1)) = 1, so drag cancels the force
    d = true_rhs(h_type(1.0, DragProfile.log_radial(2.0)), TrueState(0.0, 1 + 0j, 1 + 0j))
    assert abs(d.dv) < 1e-15
    assert d.dclock == 1.0


def test_pseudo_rhs_examples():
    assert pseudo_rhs(h_type(), PseudoState(0.0, 1 + 0j, 1j)).dv == -1
    assert pseudo_rhs(k_type(), PseudoState(0.0, 2 + 0j, 0j)).dv == pytest.approx(-0.25)
    d = pseudo_rhs(h_type(1.0, DragProfile.log_radial(2.0)), PseudoState(0.0, 2 + 0j, 1j))
    assert d.dclock == pytest.approx(0.5)


def test_rhs_rejects_origin():
    with pytest.raises(DomainError):
        true_rhs(h_type(), TrueState(0.0, 0j, 1j))
    with pytest.raises(DomainError):
        pseudo_rhs(k_type(), PseudoState(0.0, 0j, 1j))


@pytest.mark.parametrize("nu,k,r,expected", [(2, 1, 2, 2.0), (-1, 1, 2, -0.5), (4, 4, 1, 1.0)])
def test_radial_potential_examples(nu, k, r, expected):
    assert radial_potential(make_equation(nu, k), r) == pytest.approx(expected)


@given(st.sampled_from([2.0, -1.0, 3.0, 0.5, -1.5]), st.floats(min_value=0.2, max_value=5.0))
def test_radial_potential_is_antiderivative(nu, r):
    spec = make_equation(nu, 1.3)
    h = 1e-5 * r
    dU = (radial_potential(spec, r + h) - radial_potential(spec, r - h)) / (2 * h)
    assert dU / r == pytest.approx(spec.k * r ** (nu - 2.0), rel=1e-8)


@given(st.floats(min_value=-3, max_value=3), st.complex_numbers(min_magnitude=0.1, max_magnitude=10),
       st.complex_numbers(max_magnitude=10))
def test_frame_conversion_round_trip(p, z, v):
    spec = h_type(1.0, DragProfile.log_radial(p))
    state = TrueState(1.5, z, v, 0.25)
    back = to_true(spec, to_pseudo(spec, state))
    assert back.t == state.t and back.s == state.s and back.z == state.z
    assert abs(back.v - state.v) <= 1e-12 * max(abs(v), 1e-300)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([-1.0, 1.0, 2.0]), st.sampled_from(["H", "K"]))
def test_frame_equivalence(p, kind):
    """True-time and pseudotime integrations trace the same motion."""
    drag = DragProfile.log_radial(p)
    spec = h_type(1.0, drag) if kind == "H" else k_type(1.0, drag)
    init = TrueState(0.0, 1 + 0j, 0.3 + 0.7j)
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    true_traj = integrate(spec, init, (0.0, 6.0), cfg)
    pseudo_traj = integrate(spec, to_pseudo(spec, init), (0.0, float(true_traj.s[-1])), cfg)
    # compare positions at matching pseudotimes via the accumulated clocks
    s_samples = true_traj.s[::7]
    y = pseudo_traj(s_samples)
    zp = y[:, 0] + 1j * y[:, 1]
    assert np.max(np.abs(zp - true_traj.z[::7])) < 10 * cfg.rel_tol
    assert abs(pseudo_traj.t[-1] - true_traj.t[-1]) < 10 * cfg.rel_tol
