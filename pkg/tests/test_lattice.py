import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from darboux import lattice as lat
from darboux.geometry import (CONFORMAL, Chart, NonConformalChart, SpaceId, SpaceParams, SystemId, all_charts)
from darboux.kernels import MptParams, PhysicalConstants, mpt_bound_energy
from darboux.verify import StencilOutsideDomain

UNIT = PhysicalConstants()
HARM = lat.Potential1D("HARMONIC", {"omega": 1.0})


def test_free_kernel_rows_normalized_and_symmetric():
    free = lat.Potential1D("HARMONIC", {"omega": 0.0})
    s = lat.Slicing(-10.0, 10.0, 401, 0.05)
    M = lat.short_time_kernel(free, s)
    assert np.array_equal(M, M.T)
    rows = M.sum(axis=1)[150:251]
    assert np.max(np.abs(rows - 1.0)) < 1e-6


def test_kernel_on_exact_ground_state():
    eps = 0.05
    s = lat.Slicing(-8.0, 8.0, 300, eps)
    M = lat.short_time_kernel(HARM, s, prescription="symmetric")
    x = s.grid
    psi = np.exp(-x * x / 2)
    out = M @ psi
    ratio = out[100:200] / psi[100:200]
    assert np.max(np.abs(ratio / math.exp(-eps / 2) - 1.0)) < eps ** 2


def test_grid_too_coarse():
    with pytest.raises(lat.GridTooCoarse):
        lat.short_time_kernel(HARM, lat.Slicing(-8.0, 8.0, 40, 0.001))


def test_slicing_validation():
    with pytest.raises(ValueError):
        lat.Slicing(1.0, 0.0, 100, 0.1)
    with pytest.raises(ValueError):
        lat.Slicing(0.0, 1.0, 8, 0.1)
    assert lat.Slicing(0.0, 1.0, 100, 0.1, 50).total_time == pytest.approx(5.0)


def test_transfer_matrix_energy_matches_dense_eigenvalue():
    # power iteration against a direct symmetric eigensolver
    s = lat.Slicing(-8.0, 8.0, 200, 0.05)
    M = lat.short_time_kernel(HARM, s, prescription="symmetric")
    lam = linalg.eigh(M, eigvals_only=True)[-1]
    assert lat.lattice_energy(HARM, s) == pytest.approx(-math.log(lam) / s.epsilon, rel=1e-9)


def test_harmonic_ground_energy():
    e = lat.ground_energy(HARM, lat.Slicing(-8.0, 8.0, 200, 0.05))
    assert abs(e - 0.5) < 0.005


def test_harmonic_with_units():
    pc = PhysicalConstants(hbar=2.0, mass=3.0)
    e = lat.ground_energy(HARM, lat.Slicing(-6.0, 6.0, 200, 0.05), pc)
    assert e == pytest.approx(lat.exact_ground_energy(HARM, pc), rel=1e-3)


def test_morse_ground_energy():
    pot = lat.Potential1D("MORSE", {"V0": 5.0, "alpha": 1.0})
    exact = -0.5 * (5.0 - 0.5) ** 2
    assert lat.exact_ground_energy(pot) == pytest.approx(exact)
    assert lat.ground_energy(pot, lat.Slicing(-1.5, 6.0, 300, 0.01)) == pytest.approx(exact, rel=0.01)


def test_mpt_ground_energy_against_bound_state():
    pot = lat.Potential1D("MPT", {"eta": 1.5, "nu": 4.5})
    ref = mpt_bound_energy(0, MptParams(1.5, 4.5))
    assert lat.ground_energy(pot, lat.Slicing(0.02, 8.0, 300, 0.01)) == pytest.approx(ref, rel=0.01)


def test_linear_halfspace_pole_is_airy_zero():
    import mpmath as mp
    for hb, m, k in ((1.0, 1.0, 1.0), (2.0, 3.0, 2.0)):
        pc = PhysicalConstants(hbar=hb, mass=m)
        exact = -float(mp.airyaizero(1)) * (hb * hb * k * k / (2 * m)) ** (1 / 3)
        assert lat.linear_halfspace_pole(k, 0.0, pc) == pytest.approx(exact, rel=1e-10)


def test_dirichlet_linear_lattice_near_pole():
    pot = lat.Potential1D("LINEAR", {"k": 1.0})
    e = lat.ground_energy(pot, lat.Slicing(0.0, 10.0, 300, 0.01, 8000), dirichlet=True)
    assert e == pytest.approx(lat.linear_halfspace_pole(1.0, 0.0), rel=0.02)


def test_trotter_orders():
    s = lat.Slicing(-8.0, 8.0, 400, 0.2)
    eps = (0.2, 0.1, 0.05, 0.025)
    assert 1.5 <= lat.trotter_order(HARM, s, 0.5, eps) <= 2.5
    assert lat.trotter_order(HARM, s, 0.5, eps, prescription="midpoint") == pytest.approx(1.0, abs=0.15)


def test_quartic_grid_doubling():
    pot = lat.Potential1D("QUARTIC_DI", {"E": -1.0, "a": 0.5})
    e1 = lat.ground_energy(pot, lat.Slicing(-4.0, 4.0, 64, 0.15))
    e2 = lat.ground_energy(pot, lat.Slicing(-4.0, 4.0, 128, 0.15))
    assert abs(e2 - e1) < 0.01 * abs(e2)


def test_fluctuation_identity():
    n = 10 ** 6
    se = lat.FLUCTUATION_SE / math.sqrt(n)
    for eps in (0.01, 0.1):
        assert abs(lat.fluctuation_identity_check(eps, n, 0) - 1.0) < 3 * se
    assert lat.fluctuation_identity_check(0.01, 10 ** 4, 7) == lat.fluctuation_identity_check(0.01, 10 ** 4, 7)


def test_fluctuation_standard_error_constant():
    z = np.random.default_rng(1).normal(size=2 * 10 ** 6)
    assert np.std(z ** 4) / 3 == pytest.approx(lat.FLUCTUATION_SE, rel=0.05)


@pytest.mark.parametrize("F,q,expected", [(lambda t: t * t, 1.0, 0.375), (math.exp, 0.3, 0.125),
                                          (lambda t: t, 2.0, 0.0)], ids=["square", "exp", "identity"])
def test_schwarz_quantum_potential(F, q, expected):
    assert lat.schwarz_quantum_potential(F, q) == pytest.approx(expected, abs=1e-8)


def test_schwarz_singular():
    with pytest.raises(lat.DerivativeSingularity):
        lat.schwarz_quantum_potential(lambda t: t ** 3, 0.0)


def test_synthetic_three_dimensional_conformal():
    assert abs(lat.conformal_quantum_potential(lambda q: 1.7, (0.3, 0.4, 0.5))) < 1e-10
    val = lat.conformal_quantum_potential(lambda q: q[0], (1.3, 0.2, 0.1))
    assert val == pytest.approx(1.0 / (8 * 1.3 ** 4), rel=1e-9)


SPACES = [SpaceParams(SpaceId.DI, 1.0), SpaceParams(SpaceId.DII, -1.0, 1.0),
          SpaceParams(SpaceId.DIII, 1.0, 1.0), SpaceParams(SpaceId.DIV, 3.0, 1.2)]


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.space_id.value)
def test_quantum_potential_vanishes_on_conformal_charts(space):
    rng = np.random.default_rng(0)
    for chart in all_charts(space):
        if (space.space_id, chart.system_id) not in CONFORMAL:
            continue
        for q in chart.sample(100, rng, margin=0.1):
            assert abs(lat.quantum_potential_pf(chart, q)) < 1e-9
        # the general diagonal formula, by finite differences, agrees
        done = 0
        while done < 20:
            q = chart.sample(1, rng, margin=0.1)[0]
            try:
                assert abs(lat.diagonal_quantum_potential(chart, q, step=5e-3)) < 1e-9
            except StencilOutsideDomain:
                continue
            done += 1


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(0.5, 5.5))
def test_flat_polar_quantum_potential(r, phi):
    # D_III at b = 0 is flat; its polar chart is r^2-scaled in the angle
    space = SpaceParams(SpaceId.DIII, 1.0, 0.0)
    chart = Chart(space, SystemId.POLAR)
    expected = -1.0 / (8 * r * r)
    assert lat.diagonal_quantum_potential(chart, (r, phi)) == pytest.approx(expected, rel=1e-7)


def test_time_transform_examples():
    assert lat.time_transform_factor(SpaceParams(SpaceId.DI, 1.0), "UV", (3.0, 0.0)) == pytest.approx(6.0)
    assert lat.time_transform_factor(SpaceParams(SpaceId.DIII, 1.0, 1.0), "UV", (0.0, 0.0)) == pytest.approx(2.0)
    # a+ = 1, a- = 0.25 means a = 2.5, b = 0.75
    div = SpaceParams(SpaceId.DIV, 2.5, 0.75)
    assert lat.time_transform_factor(div, "HOROSPHERICAL", (1.0, 2.0)) == pytest.approx(0.5)


def test_time_transform_lorentzian():
    with pytest.raises(NonConformalChart):
        lat.time_transform_factor(SpaceParams(SpaceId.DIII, 1.0, 1.0), "HYPERBOLIC", (1.0, 1.0))
