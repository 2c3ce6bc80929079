"""Plateau fields, their flows, and the trajectory chart.

The field is 1 on the inner plateau and 0 beyond the edge, so the flow
must move at unit speed inside and freeze outside; the chart conjugates
the unit translation to the time-one map.
"""

import numpy as np
import pytest

from diffeolab import (
    compose,
    identity,
    inverse,
    make_rho,
    time_t_map,
    trajectory_chart,
    verify_chart_conjugation,
    verify_chart_fixes_support,
)
from _helpers import c0_gap, small_bump


def test_field_plateau_and_cutoff_values():
    field = make_rho(1)
    assert field.plateau == 2.0 and field.edge == 3.0
    xs = np.linspace(-2.0, 2.0, 101)
    np.testing.assert_array_equal(field(xs), np.ones(101))
    assert np.all(field.jets(xs, 2)[:, 1:] == 0.0)
    edge = np.array([-3.0, 3.0, -5.0, 7.0])
    np.testing.assert_array_equal(field(edge), np.zeros(4))
    mid = float(field(np.array([2.5]))[0])
    assert 0.0 < mid < 1.0
    # even profile
    ys = np.linspace(0.0, 3.5, 57)
    np.testing.assert_array_equal(field(ys), field(-ys))


def test_time_zero_map_is_identity():
    f = time_t_map(make_rho(1), 0.0, 2)
    assert np.all(f.jets == 0.0)


def test_flow_moves_at_unit_speed_on_the_plateau():
    field = make_rho(1)
    for t in (0.25, 0.7, -0.5):
        tau = time_t_map(field, t, 2)
        xs = np.linspace(-1.0, 1.0, 201)  # stays inside the plateau
        assert float(np.max(np.abs(tau(xs) - (xs + t)))) <= 1e-9
        jets = tau.jet_at(xs, 2)
        np.testing.assert_allclose(jets[:, 1], 1.0, atol=1e-9)


def test_flow_group_law_and_reversibility():
    field = make_rho(1)
    t1, t2 = 0.3, 0.4
    a = compose(time_t_map(field, t1, 2), time_t_map(field, t2, 2))
    b = time_t_map(field, t1 + t2, 2)
    assert c0_gap(a, b, -3.0, 3.0) <= 1e-8
    back = compose(time_t_map(field, 0.5, 2), time_t_map(field, -0.5, 2))
    assert c0_gap(back, identity(2, -3.0, 3.0), -3.0, 3.0) <= 1e-8


def test_flow_maps_keep_orientation_for_long_times():
    field = make_rho(1)
    xs = np.linspace(-3.0, 3.0, 601)
    for t in (-4.0, -1.0, 1.0, 4.0):
        tau = time_t_map(field, t, 2)
        slopes = tau.jet_at(xs, 1)[:, 1]
        assert np.all(slopes > 0.0)


def test_chart_is_identity_inside_and_bounded_outside():
    field = make_rho(1)
    chart = trajectory_chart(field, 2)
    xs = np.linspace(-2.0, 2.0, 201)
    vals = chart.jet_at(xs, 0)[:, 0]
    assert float(np.max(np.abs(vals - xs))) <= 1e-10
    # odd, monotone, and asymptotic strictly below the cutoff edge
    ys = np.linspace(0.0, chart.w, 400)
    v_pos = chart.jet_at(ys, 0)[:, 0]
    v_neg = chart.jet_at(-ys, 0)[:, 0]
    assert float(np.max(np.abs(v_pos + v_neg))) <= 1e-10
    assert np.all(np.diff(v_pos) > 0.0)
    far = float(chart.jet_at(np.array([10.0 * field.plateau]), 0)[0, 0])
    assert far < field.edge
    assert chart.attained < chart.asymptote


def test_chart_conjugates_translation_to_the_flow():
    field = make_rho(1)
    assert verify_chart_conjugation(field, 0.0, 101) <= 1e-12
    assert verify_chart_conjugation(field, 1.0, 1000) <= 1e-7
    assert verify_chart_conjugation(field, 0.6, 257) <= 1e-7
    assert verify_chart_conjugation(field, -0.8, 257) <= 1e-7


def test_chart_conjugation_fixes_small_supported_maps():
    field = make_rho(2)  # plateau [-4, 4]
    u = small_bump(1e-3, center=0.0, radius=1.5)
    assert verify_chart_fixes_support(field, u, 400) <= 1e-7


def test_chart_conjugation_rejects_escaping_support():
    field = make_rho(1)  # plateau [-2, 2]
    u = small_bump(1e-3, center=2.0, radius=1.0)
    with pytest.raises(ValueError):
        verify_chart_fixes_support(field, u, 100)


def test_flow_map_inversion_refuses_at_the_flat_edge():
    # the slope of the time-1 map collapses like the cutoff ratio near the
    # edge, so a faithful global inverse is not representable; the solver
    # must refuse instead of returning a stalled fit (the flow itself
    # provides the inverse as the time-(-1) map, checked above)
    from diffeolab import ConstructionError
    with pytest.raises(ConstructionError):
        inverse(time_t_map(make_rho(1), 1.0, 2))
