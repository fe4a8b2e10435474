import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darboux.geometry import (CONFORMAL, Chart, InvalidChart, InvalidSpace, LimitKind, NonConformalChart,
                              PointOutsideDomain, Signature, SpaceId, SpaceParams, SystemId, all_charts,
                              gaussian_curvature_closed, gaussian_curvature_numeric, limit_curvature,
                              limiting_space, metric_diag)

SPACES = [SpaceParams(SpaceId.DI, 1.0), SpaceParams(SpaceId.DII, -1.0, 1.0),
          SpaceParams(SpaceId.DIII, 1.0, 1.0), SpaceParams(SpaceId.DIV, 3.0, 1.2)]


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.space_id.value)
def test_curvature_closed_form_on_grid(space):
    chart = Chart(space, SystemId.UV)
    pts = chart.grid(10, 10)
    assert len(pts) == 100
    for q in pts:
        exact = gaussian_curvature_closed(space, q)
        assert abs(gaussian_curvature_numeric(chart, q) - exact) <= 1e-6 * abs(exact)


def test_curvature_known_values():
    assert gaussian_curvature_closed(SPACES[0], (2.0, 0.0)) == pytest.approx(1 / 32, rel=1e-15)
    assert gaussian_curvature_closed(SPACES[1], (1.0, 0.0)) == pytest.approx(-0.5, rel=1e-15)


@pytest.mark.parametrize("space,kind,K", [
    (SpaceParams(SpaceId.DII, -1.0, 0.0), LimitKind.HYPERBOLIC, -1.0),
    (SpaceParams(SpaceId.DII, -2.5, 0.0), LimitKind.HYPERBOLIC, -0.4),
    (SpaceParams(SpaceId.DIII, 1.0, 0.0), LimitKind.FLAT, 0.0),
    (SpaceParams(SpaceId.DIV, 2.0, 1.0), LimitKind.HYPERBOLIC, -1.0),
    (SpaceParams(SpaceId.DIV, 5.0, 2.5), LimitKind.HYPERBOLIC, -0.4),
])
def test_constant_curvature_limits(space, kind, K):
    assert limiting_space(space) == kind
    assert limit_curvature(space) == pytest.approx(K, abs=1e-15)
    chart = Chart(space, SystemId.UV)
    for q in chart.sample(20, np.random.default_rng(1), margin=0.1):
        assert abs(gaussian_curvature_numeric(chart, q) - K) < 1e-8


def test_generic_point_is_not_a_limit():
    assert limiting_space(SPACES[1]) == LimitKind.NONE
    assert limit_curvature(SPACES[1]) is None


@pytest.mark.parametrize("sid,a,b", [(SpaceId.DI, -1.0, 0.0), (SpaceId.DII, 1.0, 1.0),
                                     (SpaceId.DIII, -1.0, 0.5), (SpaceId.DIV, 1.0, 1.0)])
def test_inadmissible_parameters(sid, a, b):
    with pytest.raises(InvalidSpace):
        SpaceParams(sid, a, b)


def test_chart_validation():
    with pytest.raises(InvalidChart):
        Chart(SPACES[0], SystemId.POLAR)
    with pytest.raises(InvalidChart):
        Chart(SPACES[1], SystemId.ELLIPTIC, d=0.0)
    with pytest.raises(InvalidChart):
        Chart(SPACES[0], SystemId.ROTATED, theta=4.0)


def test_conformal_set_matches_metric():
    for space in SPACES:
        for chart in all_charts(space):
            q = chart.sample(1, np.random.default_rng(3), margin=0.2)[0]
            g11, g22 = chart.metric_components(*q)
            assert ((space.space_id, chart.system_id) in CONFORMAL) == math.isclose(g11, g22, rel_tol=1e-12)


def test_diii_hyperbolic_is_lorentzian():
    chart = Chart(SPACES[2], SystemId.HYPERBOLIC)
    q = chart.sample(1, np.random.default_rng(0), margin=0.2)[0]
    assert metric_diag(chart, q).signature == Signature.LORENTZIAN


@settings(max_examples=30, deadline=None)
@given(st.floats(-3.0, -0.2), st.floats(0.05, 2.0), st.floats(0.05, 0.95), st.floats(-2.0, 2.0))
def test_dii_curvature_property(a, b, t, v):
    # stay inside a - b u^2 < 0 is automatic for a < 0; keep u away from the origin
    space = SpaceParams(SpaceId.DII, a, b)
    u = 0.3 + 2.0 * t
    chart = Chart(space, SystemId.UV)
    exact = gaussian_curvature_closed(space, (u, v))
    assert abs(gaussian_curvature_numeric(chart, (u, v)) - exact) <= 1e-6 * abs(exact) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.0, 3.0), st.floats(-1.5, 2.5))
def test_diii_curvature_property(a, b, u):
    space = SpaceParams(SpaceId.DIII, a, b)
    chart = Chart(space, SystemId.UV)
    exact = gaussian_curvature_closed(space, (u, 0.3))
    assert abs(gaussian_curvature_numeric(chart, (u, 0.3)) - exact) <= 1e-6 * abs(exact) + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(0.0, 0.999), st.floats(0.2, 1.35))
def test_div_curvature_property(a, frac, u):
    space = SpaceParams(SpaceId.DIV, a, 0.5 * a * frac)
    chart = Chart(space, SystemId.UV)
    exact = gaussian_curvature_closed(space, (u, 0.1))
    assert abs(gaussian_curvature_numeric(chart, (u, 0.1)) - exact) <= 1e-6 * abs(exact)


def test_closed_form_rejects_points_outside():
    with pytest.raises(PointOutsideDomain):
        gaussian_curvature_closed(SPACES[0], (0.5, 0.0))


def test_to_uv_preserves_metric():
    # pulling the uv metric back through to_uv must reproduce the chart metric
    for space in SPACES:
        uv = Chart(space, SystemId.UV)
        for chart in all_charts(space):
            if chart.system_id == SystemId.UV or chart.signature == Signature.LORENTZIAN:
                continue
            q = chart.sample(1, np.random.default_rng(5), margin=0.2)[0]
            h = 1e-6
            for axis in (0, 1):
                dq = [0.0, 0.0]
                dq[axis] = h
                p1 = np.array(chart.to_uv(q[0] + dq[0], q[1] + dq[1]))
                p0 = np.array(chart.to_uv(q[0] - dq[0], q[1] - dq[1]))
                t = (p1 - p0) / (2 * h)
                f = uv.metric_components(*chart.to_uv(*q))[0]
                assert f * (t @ t) == pytest.approx(chart.metric_components(*q)[axis], rel=1e-6)


def test_nonconformal_error_type():
    assert issubclass(NonConformalChart, ValueError)
