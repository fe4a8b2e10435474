import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darboux import solutions as sol
from darboux.geometry import Chart, PointOutsideDomain, SpaceId, SpaceParams, SystemId
from darboux.kernels import PhysicalConstants
from darboux.verify import lb_residual

PC = PhysicalConstants(hbar=2.0, mass=3.0)
SPACES = {SpaceId.DII: SpaceParams(SpaceId.DII, -1.0, 1.0), SpaceId.DIII: SpaceParams(SpaceId.DIII, 1.0, 1.0),
          SpaceId.DIV: SpaceParams(SpaceId.DIV, 3.0, 1.2)}
WAVES = [
    (SpaceId.DII, SystemId.UV, dict(p=1.0, k=2.0)),
    (SpaceId.DII, SystemId.POLAR, dict(p=1.0, k=0.7)),
    (SpaceId.DII, SystemId.POLAR, dict(p=1.0, k=0.7, eps_signs=(-1, 1))),
    (SpaceId.DII, SystemId.PARABOLIC, dict(p=1.0, zeta=0.6)),
    (SpaceId.DIII, SystemId.UV, dict(p=1.3, l=2)),
    (SpaceId.DIII, SystemId.POLAR, dict(p=1.3, l=2)),
    (SpaceId.DIII, SystemId.PARABOLIC, dict(p=1.3, zeta=0.4, parity="even")),
    (SpaceId.DIII, SystemId.PARABOLIC, dict(p=1.3, zeta=0.4, parity="odd")),
    (SpaceId.DIII, SystemId.HYPERBOLIC, dict(p=1.3, k=0.8)),
    (SpaceId.DIV, SystemId.UV, dict(p=1.0, k=0.8)),
    (SpaceId.DIV, SystemId.EQUIDISTANT, dict(p=1.0, k=0.8)),
    (SpaceId.DIV, SystemId.HOROSPHERICAL, dict(p=1.0, k=0.8)),
    (SpaceId.DIV, SystemId.ELLIPTIC, dict(p=1.0, k=0.8)),
]


def _case(sid, system, qd):
    space = SPACES[sid]
    qn = sol.QuantumNumbers(**qd)
    E = sol.energy(space, system, qn, PC)
    return space, Chart(space, system), (lambda q: sol.wavefunction(space, system, qn, q, PC)), E


def test_catalog_full_entries_have_a_wave_case():
    full = {(e.space_id, e.system_id) for e in sol.catalog() if e.status == sol.Status.FULL}
    assert full == {(s, c) for s, c, _ in WAVES}


@pytest.mark.parametrize("sid,system,qd", WAVES, ids=lambda v: getattr(v, "value", None))
def test_wave_residual_order_and_energy_sensitivity(sid, system, qd):
    space, chart, psi, E = _case(sid, system, qd)
    pts = chart.sample(20, np.random.default_rng(0), margin=0.1)
    r = lb_residual(chart, psi, E, pts, PC, step=0.01)
    assert r.rel < 1e-5
    coarse = lb_residual(chart, psi, E, pts, PC, step=0.04, richardson=False).max_abs
    fine = lb_residual(chart, psi, E, pts, PC, step=0.02, richardson=False).max_abs
    assert math.log2(coarse / fine) >= 3.5
    # a wrong eigenvalue leaves an O(1) residual
    assert lb_residual(chart, psi, 1.1 * E, pts, PC, step=0.01).max_abs >= 100 * r.max_abs


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.1, 3.0))
def test_dii_uv_waves_for_random_labels(p, k):
    space, chart, psi, E = _case(SpaceId.DII, SystemId.UV, dict(p=p, k=k))
    pts = chart.sample(4, np.random.default_rng(1), margin=0.1)
    assert lb_residual(chart, psi, E, pts, PC, step=0.01).rel < 1e-5


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 2.0), st.integers(0, 4))
def test_diii_uv_waves_for_random_labels(p, l):
    space, chart, psi, E = _case(SpaceId.DIII, SystemId.UV, dict(p=p, l=l))
    pts = chart.sample(4, np.random.default_rng(2), margin=0.1)
    assert lb_residual(chart, psi, E, pts, PC, step=0.01).rel < 1e-5


GREENS = [
    (SpaceParams(SpaceId.DI, 1.0), SystemId.UV, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), {}),
    (SpaceParams(SpaceId.DI, 1.0), SystemId.UV, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), dict(v_mode="integral")),
    (SpaceParams(SpaceId.DI, 1.0), SystemId.ROTATED, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), dict(theta=0.3)),
    (SpaceParams(SpaceId.DII, -1.0, 1.0), SystemId.POLAR, 0.6 + 0.01j, (1.0, 0.2), (1.6, 0.7), {}),
    (SpaceParams(SpaceId.DIII, 1.0, 1.0), SystemId.PARABOLIC, -0.3 + 0.01j, (0.8, 0.3), (1.5, 1.4), {}),
    (SpaceParams(SpaceId.DIV, 3.0, 0.5), SystemId.HOROSPHERICAL, 0.6 + 0.01j, (1.0, 1.2), (1.6, 0.7), {}),
]


@pytest.mark.parametrize("space,system,E,q1,q2,od", GREENS)
def test_green_symmetric_and_solves_equation(space, system, E, q1, q2, od):
    opts = sol.GreenOptions(**od)
    g12 = sol.green(space, system, E, q1, q2, PC, opts)
    assert abs(g12 - sol.green(space, system, E, q2, q1, PC, opts)) <= 1e-10 * abs(g12)
    chart = Chart(space, system, theta=opts.theta, half_space=opts.half_space)
    r = lb_residual(chart, lambda q: sol.green(space, system, E, q, q2, PC, opts), E, [q1], PC, step=0.02)
    assert r.max_abs < 1e-5 * abs(g12)


def test_di_sum_and_integral_modes_differ_only_by_topology():
    # a cylinder (periodic v) and a strip (v on the line) give different kernels
    space = SpaceParams(SpaceId.DI, 1.0)
    a = sol.green(space, SystemId.UV, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), PC)
    b = sol.green(space, SystemId.UV, 0.7 + 0.05j, (1.8, 0.3), (2.6, 1.1), PC, sol.GreenOptions(v_mode="integral"))
    assert abs(a - b) > 1e-6 * abs(a)


def test_errors():
    with pytest.raises(sol.UnsolvedSystem):
        sol.green(SpaceParams(SpaceId.DI, 1.0), SystemId.DISPLACED_PARABOLIC, 0.5j, (1, 1), (2, 2), PC)
    with pytest.raises(ValueError):
        sol.green(SPACES[SpaceId.DII], SystemId.UV, 0.5 - 0.1j, (1.0, 0.0), (1.5, 0.7), PC)
    with pytest.raises(PointOutsideDomain):
        sol.green(SpaceParams(SpaceId.DI, 1.0), SystemId.UV, 0.5 + 0.1j, (0.5, 0.0), (1.5, 0.7), PC)
    with pytest.raises(ValueError):
        sol.QuantumNumbers(p=-1.0)
    with pytest.raises(ValueError):
        sol.QuantumNumbers(eps_signs=(2, 1))
